//! Property checks shared by the `properties` and `acceptance` targets.

use proptest::prelude::*;
use proptest::test_runner::{TestCaseError, TestRunner};

use pdgen::annotations::parse_annotated;
use pdgen::binding_types::{
    filter_atom, gen_atom, gen_term, judge, BindingType, Division, MemoTable, TypeSystem,
};
use pdgen::bta::Norm;
use pdgen::engine::EngineConfig;
use pdgen::fixtures::{answers, KMP, MAP_LIST};
use pdgen::lix::specialise;
use pdgen::term::{is_variant, match_term, render_term, PredKey, Substitution, Term, Var};

pub const CASES: u32 = 1000;

/// Runs `test` on `CASES` inputs drawn from `strategy`.
fn check<S: Strategy>(
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = ProptestConfig {
        cases: CASES,
        failure_persistence: None,
        ..ProptestConfig::default()
    };
    TestRunner::new(config)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn atom() -> impl Strategy<Value = Term> {
    prop_oneof![
        Just(Term::atom("a")),
        Just(Term::atom("b")),
        Just(Term::nil()),
        (0i64..4).prop_map(Term::Int),
    ]
}

fn compound(leaf: impl Strategy<Value = Term> + 'static) -> impl Strategy<Value = Term> {
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|x| Term::app("f", vec![x])),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Term::app("g", vec![x, y])),
            (inner.clone(), inner).prop_map(|(h, t)| Term::cons(h, t)),
        ]
    })
}

/// Terms over variables `base..base+4`.
fn term_from(base: u32) -> impl Strategy<Value = Term> {
    compound(prop_oneof![atom(), (base..base + 4).prop_map(Term::var)])
}

fn term() -> impl Strategy<Value = Term> {
    term_from(0)
}

fn ground() -> impl Strategy<Value = Term> {
    compound(atom())
}

/// Binding types without parameters, over the built-in `list` constructor.
fn binding_type() -> impl Strategy<Value = BindingType> {
    let leaf = prop_oneof![
        Just(BindingType::Static),
        Just(BindingType::Dynamic),
        Just(BindingType::Nonvar),
        Just(BindingType::Mix),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(BindingType::list_of),
            (inner.clone(), inner.clone())
                .prop_map(|(x, y)| BindingType::Struct(pdgen::term::Atom::new("g"), vec![x, y])),
            (inner.clone(), inner).prop_map(|(x, y)| BindingType::Or(Box::new(x), Box::new(y))),
        ]
    })
}

/// A substitution for variables 0..4 whose range uses variables 10..14.
fn substitution() -> impl Strategy<Value = Substitution> {
    proptest::collection::vec(proptest::option::of(term_from(10)), 4).prop_map(|ts| {
        Substitution::from_bindings(
            ts.into_iter()
                .enumerate()
                .filter_map(|(i, t)| t.map(|t| (Var(i as u32), t))),
        )
    })
}

/// A term of the given binding type, built directly so that membership is
/// common rather than rare.
fn term_of(tau: &BindingType) -> BoxedStrategy<Term> {
    match tau {
        BindingType::Static => ground().boxed(),
        BindingType::Dynamic | BindingType::Mix => term().boxed(),
        BindingType::Nonvar => term().prop_filter("nonvar", |t| !t.is_var()).boxed(),
        BindingType::Or(a, b) => prop_oneof![term_of(a), term_of(b)].boxed(),
        BindingType::Struct(f, args) => {
            let f = *f;
            args.iter()
                .map(term_of)
                .collect::<Vec<_>>()
                .prop_map(move |xs| Term::compound(f, xs))
                .boxed()
        }
        BindingType::Ctor(_, elems) => {
            let elem = term_of(&elems[0]);
            proptest::collection::vec(elem, 0..4)
                .prop_map(Term::list)
                .boxed()
        }
        BindingType::Param(_) => unreachable!("generated types are closed"),
    }
}

fn typed_term() -> impl Strategy<Value = (BindingType, Term)> {
    binding_type().prop_flat_map(|tau| {
        let t = prop_oneof![term_of(&tau), term()];
        (Just(tau), t)
    })
}

pub fn judge_is_downward_closed() -> Result<(), String> {
    check((typed_term(), substitution()), |((tau, t), theta)| {
        let ts = TypeSystem::new();
        if judge(&t, &tau, &ts).unwrap() {
            let inst = theta.apply(&t);
            prop_assert!(
                judge(&inst, &tau, &ts).unwrap(),
                "{} in {} but not {}",
                render_term(&t),
                tau,
                render_term(&inst)
            );
        }
        Ok(())
    })
}

pub fn gen_term_generalises_within_the_type() -> Result<(), String> {
    check(typed_term(), |(tau, t)| {
        let ts = TypeSystem::new();
        let mut next = t.max_var().map_or(0, |m| m + 1);
        let start = next;
        let member = judge(&t, &tau, &ts).unwrap();
        match gen_term(&t, &tau, &ts, &mut next) {
            Ok(g) => {
                prop_assert!(
                    member,
                    "generalised a non-member {} of {}",
                    render_term(&t),
                    tau
                );
                prop_assert!(
                    match_term(&g, &t).is_some(),
                    "{} is not more general than {}",
                    render_term(&g),
                    render_term(&t)
                );
                prop_assert!(judge(&g, &tau, &ts).unwrap());
                prop_assert!(next >= start);
            }
            Err(_) => prop_assert!(
                !member,
                "member {} of {} not generalised",
                render_term(&t),
                tau
            ),
        }
        Ok(())
    })
}

pub fn filtering_is_stable() -> Result<(), String> {
    check(
        (
            proptest::collection::vec(binding_type(), 1..4).prop_flat_map(|types| {
                let args: Vec<_> = types.iter().map(term_of).collect();
                (Just(types), args)
            }),
            20u32..40,
        ),
        |((types, args), offset)| {
            let ts = TypeSystem::new();
            let pred = PredKey::new("p", types.len());
            let mut d = Division::new();
            d.insert(pred, types).unwrap();
            let a = Term::compound(pred.name, args);
            let mut memo = MemoTable::new();
            let first = filter_atom(&a, &d, &ts, &mut memo).unwrap();
            prop_assert_eq!(memo.len(), 1);
            // The same call again, a renamed copy, and its own generalisation all
            // land on the one entry.
            let again = filter_atom(&a, &d, &ts, &mut memo).unwrap();
            prop_assert_eq!(&again, &first);
            let renamed = filter_atom(&a.offset_vars(offset), &d, &ts, &mut memo).unwrap();
            prop_assert!(is_variant(&renamed, &first));
            let general = gen_atom(&a, &d, &ts).unwrap();
            filter_atom(&general, &d, &ts, &mut memo).unwrap();
            prop_assert_eq!(memo.len(), 1);
            prop_assert!(is_variant(&memo.entry(0).pattern, &general));
            let avars = a.vars();
            prop_assert!(first.vars().iter().all(|v| avars.contains(v)));
            Ok(())
        },
    )
}

pub fn hide_nf_does_not_propagate_bindings() -> Result<(), String> {
    check(proptest::collection::vec(ground(), 1..6), |facts| {
        let mut src = String::from("residual(p(_)).\nfilter(p(X),[dynamic]).\n");
        src.push_str("ann_clause(1,p(X),(rescall(print(X)),hide_nf(unfold(q(X))))).\n");
        for (i, f) in facts.iter().enumerate() {
            src.push_str(&format!(
                "ann_clause({},q({}),true).\n",
                i + 2,
                render_term(f)
            ));
        }
        let p = parse_annotated(&src).unwrap();
        let goal = Term::app("p", vec![Term::var(0)]);
        let r = specialise(&p, std::slice::from_ref(&goal)).unwrap();
        for c in r
            .program()
            .clauses
            .iter()
            .filter(|c| c.pred().name.name().starts_with("p__"))
        {
            // The head is left as general as the memoised call.
            let args = c.head.args();
            prop_assert!(args.iter().all(Term::is_var), "{}", r.render());
            let mut vs = c.head.vars();
            vs.dedup();
            prop_assert_eq!(vs.len(), args.len());
        }
        let orig = p.strip();
        let run = r.runnable(&orig);
        let cfg = EngineConfig::default();
        let mut queries = vec![goal];
        queries.extend(facts.iter().map(|f| Term::app("p", vec![f.clone()])));
        queries.push(Term::app("p", vec![Term::atom("zz")]));
        for q in &queries {
            prop_assert_eq!(
                answers(&orig, q, cfg).unwrap(),
                answers(&run, q, cfg).unwrap()
            );
        }
        Ok(())
    })
}

pub fn map_residuals_are_closed() -> Result<(), String> {
    check(
        (0usize..7, proptest::collection::vec(0i64..50, 7)),
        |(n, input)| {
            let p = MAP_LIST.program();
            let goal = Term::app(
                "map",
                vec![
                    Term::atom("inc"),
                    Term::list((0..n as u32).map(Term::var)),
                    Term::var(99),
                ],
            );
            let r = specialise(&p, std::slice::from_ref(&goal)).unwrap();
            prop_assert!(r.check_closed().is_ok(), "{}", r.render());
            let orig = p.strip();
            let run = r.runnable(&orig);
            let q = Term::app(
                "map",
                vec![
                    Term::atom("inc"),
                    Term::list(input[..n].iter().map(|&i| Term::Int(i))),
                    Term::var(0),
                ],
            );
            let cfg = EngineConfig::default();
            prop_assert_eq!(
                answers(&orig, &q, cfg).unwrap(),
                answers(&run, &q, cfg).unwrap()
            );
            Ok(())
        },
    )
}

pub fn kmp_residuals_are_closed() -> Result<(), String> {
    check(
        (
            proptest::collection::vec(prop_oneof![Just("a"), Just("b")], 1..5),
            proptest::collection::vec(prop_oneof![Just("a"), Just("b"), Just("c")], 0..8),
        ),
        |(pattern, text)| {
            let p = KMP.program();
            let pat = Term::list(pattern.iter().map(|s| Term::atom(s)));
            let goal = Term::app("match", vec![pat.clone(), Term::var(0)]);
            let r = specialise(&p, std::slice::from_ref(&goal)).unwrap();
            prop_assert!(r.check_closed().is_ok(), "{}", r.render());
            let orig = p.strip();
            let run = r.runnable(&orig);
            let q = Term::app(
                "match",
                vec![pat, Term::list(text.iter().map(|s| Term::atom(s)))],
            );
            let cfg = EngineConfig::default();
            prop_assert_eq!(
                answers(&orig, &q, cfg).unwrap(),
                answers(&run, &q, cfg).unwrap()
            );
            Ok(())
        },
    )
}

pub fn rigid_sizes_survive_instantiation() -> Result<(), String> {
    check((term(), substitution()), |(t, theta)| {
        for norm in [Norm::ListLength, Norm::TermSize] {
            if norm.is_rigid(&t) {
                prop_assert_eq!(norm.size(&theta.apply(&t)), norm.size(&t));
            }
        }
        Ok(())
    })
}

pub type Check = fn() -> Result<(), String>;

/// Every property, by name.
#[allow(dead_code)]
pub const ALL: &[(&str, Check)] = &[
    ("judge_is_downward_closed", judge_is_downward_closed),
    (
        "gen_term_generalises_within_the_type",
        gen_term_generalises_within_the_type,
    ),
    ("filtering_is_stable", filtering_is_stable),
    (
        "hide_nf_does_not_propagate_bindings",
        hide_nf_does_not_propagate_bindings,
    ),
    ("map_residuals_are_closed", map_residuals_are_closed),
    ("kmp_residuals_are_closed", kmp_residuals_are_closed),
    (
        "rigid_sizes_survive_instantiation",
        rigid_sizes_survive_instantiation,
    ),
];
