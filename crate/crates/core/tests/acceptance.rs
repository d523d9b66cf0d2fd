//! End-to-end acceptance checks. Prints one PASS or FAIL line per criterion
//! and exits with failure if any criterion fails.

mod props;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use pdgen::bench;
use pdgen::binding_types::BindingType;
use pdgen::bta::{bta, Norm};
use pdgen::engine::EngineConfig;
use pdgen::fixtures::{self, answers, Fixture};
use pdgen::lix::{specialise, specialise_with, LixConfig};
use pdgen::logen::{build_genex, run_genex, GenEx};
use pdgen::term::{is_variant, parse_program, parse_term, render_clauses, Clause, PredKey, Term};

/// Wall-time limit for specialising the parser example.
const PARSER_TIME_LIMIT: Duration = Duration::from_secs(1);
/// Step budget for the answer-preservation sweep.
const SWEEP_BUDGET: u64 = 1_000_000;
/// Minimum number of run-time queries per fixture in the sweep.
const MIN_QUERIES: usize = 5;
/// Required speedup of the vanilla residual over the interpreter.
const MIN_SPEEDUP: f64 = 1.5;
/// List length for the speedup measurement.
const SPEEDUP_LENGTH: usize = 1000;
/// Repetitions per timing; the median is used.
const REPS: usize = 5;
/// Most rounds the analysis may take on the vanilla interpreter.
const MAX_BTA_ROUNDS: usize = 2;

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn t(s: &str) -> Term {
    parse_term(s).expect("test terms parse").term
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden(f: &Fixture) -> Outcome {
    let want = f
        .golden
        .ok_or_else(|| format!("{} has no golden", f.name))?;
    let got = specialise(&f.program(), &[f.goal_term()])
        .map_err(|e| e.to_string())?
        .render();
    ensure(got == want, || {
        format!("{}: got\n{got}want\n{want}", f.name)
    })?;
    Ok(format!("{} golden", f.name))
}

fn same_clauses(got: &[Clause], want: &str) -> Result<(), String> {
    let want = parse_program(want).map_err(|e| e.to_string())?;
    ensure(got.len() == want.clauses.len(), || {
        format!("{} clauses, expected {}", got.len(), want.clauses.len())
    })?;
    for (g, w) in got.iter().zip(&want.clauses) {
        ensure(is_variant(&g.to_term(), &w.to_term()), || {
            format!(
                "{} is not a variant of {}",
                render_clauses([g]),
                render_clauses([w])
            )
        })?;
    }
    Ok(())
}

fn parser_golden() -> Outcome {
    let f = &fixtures::PARSER;
    let p = f.program();
    let start = Instant::now();
    let r = specialise(&p, &[f.goal_term()]).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let got = r.render();
    ensure(Some(got.as_str()) == f.golden, || format!("got\n{got}"))?;
    ensure(took < PARSER_TIME_LIMIT, || format!("took {took:?}"))?;
    Ok(format!("byte-identical in {took:?}"))
}

const PARSER_GENEX: &str = "
nont_m(B,C,D,E) :- (find_pattern(nont(B,C,D),E) -> true ;
    insert_pattern(nont(B,F,G),H),
    findall(I, (nont_u(B,F,G,J),I = clause(H,J)),K),
    pp(K), find_pattern(nont(B,C,D),E)).
nont_u(B,C,D,(E,F)) :- t_u(a,C,G,E), nont_m(B,G,D,F).
nont_u(H,I,J,K) :- t_u(H,I,J,K).
t_u(L,[L|M],M,true).
";

fn parser_genex() -> Outcome {
    let f = &fixtures::PARSER;
    let g = build_genex(&f.program()).map_err(|e| e.to_string())?;
    same_clauses(&g.program.clauses, PARSER_GENEX)?;
    // Run the generating extension as read back from its printed form.
    let reread = GenEx::parse(&g.render()).map_err(|e| e.to_string())?;
    let run = run_genex(&reread, &[f.goal_term()]).map_err(|e| e.to_string())?;
    let got = run.residual.render();
    ensure(Some(got.as_str()) == f.golden, || {
        format!("genex produced\n{got}")
    })?;
    Ok(format!(
        "memo clause plus {} unfolders; residual identical",
        g.program.clauses.len() - 1
    ))
}

fn lix_equals_logen() -> Outcome {
    for f in fixtures::ALL {
        let p = f.program();
        let goals = [f.goal_term()];
        let direct = specialise(&p, &goals).map_err(|e| format!("{}: {e}", f.name))?;
        let g = build_genex(&p).map_err(|e| format!("{}: {e}", f.name))?;
        let via = run_genex(&g, &goals).map_err(|e| format!("{}: {e}", f.name))?;
        ensure(direct.render() == via.residual.render(), || {
            format!(
                "{}: lix\n{}genex\n{}",
                f.name,
                direct.render(),
                via.residual.render()
            )
        })?;
    }
    Ok(format!("{} fixtures identical", fixtures::ALL.len()))
}

fn vanilla() -> Outcome {
    let f = &fixtures::VANILLA;
    golden(f)?;
    let r = specialise(&f.program(), &[f.goal_term()]).map_err(|e| e.to_string())?;
    let name = pdgen::term::Atom::new("demo__1");
    let inner: Vec<Clause> = r
        .program()
        .clauses
        .iter()
        .filter(|c| c.pred().name == name)
        .map(|c| {
            let rename = |t: &Term| match t.functor() {
                Some((n, _)) if n == name => Term::app("append", t.args().to_vec()),
                _ => t.clone(),
            };
            Clause::new(rename(&c.head), rename(&c.body))
        })
        .collect();
    same_clauses(
        &inner,
        "append([],L,L).\nappend([H|X],Y,[H|Z]) :- append(X,Y,Z).",
    )?;
    Ok("golden; demo__1 is append".into())
}

fn map_goldens() -> Outcome {
    for f in [
        &fixtures::MAP_BUILTIN,
        &fixtures::MAP_UCALL,
        &fixtures::MAP_LIST,
    ] {
        golden(f)?;
    }
    Ok("map_builtin, map_ucall, map_list".into())
}

fn hide_nf() -> Outcome {
    let f = &fixtures::HIDE_NF;
    golden(f)?;
    let p = f.program();
    let r = specialise(&p, &[f.goal_term()]).map_err(|e| e.to_string())?;
    let orig = p.strip();
    let run = r.runnable(&orig);
    let cfg = EngineConfig::default();
    for q in ["p(a)", "p(b)", "p(c)"] {
        let want = answers(&orig, &t(q), cfg).map_err(|e| e.to_string())?;
        let got = answers(&run, &t(q), cfg).map_err(|e| e.to_string())?;
        ensure(want == got, || format!("{q}: {want:?} vs {got:?}"))?;
    }
    Ok("golden; p(a), p(b), p(c) agree on answers and output".into())
}

fn sweep() -> Outcome {
    let cfg = EngineConfig::with_budget(SWEEP_BUDGET);
    let lix = LixConfig {
        budget: SWEEP_BUDGET,
        ..LixConfig::default()
    };
    let mut total = 0;
    for f in fixtures::ALL {
        ensure(f.queries.len() >= MIN_QUERIES, || {
            format!("{}: only {} queries", f.name, f.queries.len())
        })?;
        let p = f.program();
        let r =
            specialise_with(&p, &[f.goal_term()], lix).map_err(|e| format!("{}: {e}", f.name))?;
        let orig = p.strip();
        let run = r.runnable(&orig);
        for q in f.query_terms() {
            let want = answers(&orig, &q, cfg).map_err(|e| format!("{}: {e}", f.name))?;
            let got = answers(&run, &q, cfg).map_err(|e| format!("{}: {e}", f.name))?;
            ensure(want == got, || format!("{}: {want:?} vs {got:?}", f.name))?;
            total += 1;
        }
    }
    Ok(format!("{total} queries, same answers in the same order"))
}

fn vanilla_bta() -> Outcome {
    let p = parse_program(fixtures::VANILLA_SOLVE).map_err(|e| e.to_string())?;
    let r = bta(&p, &t("solve([mem(X,Xs)])"), Norm::ListLength).map_err(|e| e.to_string())?;
    let calls: Vec<String> = r.callset.calls().map(|c| c.to_string()).collect();
    ensure(
        calls == ["solve(true)", "solve_atom(false)", "clause(false,false)"],
        || format!("callset {calls:?}"),
    )?;
    let d = r.division();
    let dynamic = BindingType::Dynamic;
    let want = [
        (
            PredKey::new("solve", 1),
            vec![BindingType::list_of(dynamic.clone())],
        ),
        (PredKey::new("solve_atom", 1), vec![dynamic.clone()]),
        (PredKey::new("clause", 2), vec![dynamic.clone(), dynamic]),
    ];
    for (k, types) in &want {
        ensure(d.get(*k) == Some(types.as_slice()), || {
            format!("division for {k}: {:?}", d.get(*k))
        })?;
    }
    ensure(r.rounds <= MAX_BTA_ROUNDS, || {
        format!("{} rounds", r.rounds)
    })?;
    let memo = r.annotation.replaced_atoms();
    ensure(
        memo.len() == 1 && memo[0].pred_key() == Some(PredKey::new("solve_atom", 1)),
        || format!("memoised {memo:?}"),
    )?;
    Ok(format!(
        "{} rounds, callset {}, only solve_atom memoised",
        r.rounds,
        r.callset.render()
    ))
}

fn properties() -> Outcome {
    for (name, check) in props::ALL {
        check().map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!(
        "{} properties, {} cases each",
        props::ALL.len(),
        props::CASES
    ))
}

fn speedup() -> Outcome {
    let (s, steps0, steps1) =
        bench::vanilla_speedup(SPEEDUP_LENGTH, REPS).map_err(|e| e.to_string())?;
    let rows = fixtures::ALL
        .iter()
        .map(|f| bench::bench_fixture(f, REPS, EngineConfig::default()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let ratio = bench::lix_genex_ratio(&rows);
    let msg = format!(
        "residual {s:.2}x faster ({steps0} vs {steps1} steps); lix/genex time ratio {ratio:.3}"
    );
    ensure(s >= MIN_SPEEDUP, || msg.clone())?;
    Ok(msg)
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("1 parser golden", parser_golden),
        ("2 parser generating extension", parser_genex),
        ("3 lix equals logen", lix_equals_logen),
        ("4 vanilla", vanilla),
        ("5 map goldens", map_goldens),
        ("6 hide_nf", hide_nf),
        ("7 answer preservation", sweep),
        ("8 vanilla bta", vanilla_bta),
        ("9 properties", properties),
        ("10 vanilla speedup", speedup),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
