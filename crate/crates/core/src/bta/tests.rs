use super::*;
use crate::lix::specialise;
use crate::term::{parse_program, parse_term};

fn t(s: &str) -> Term {
    parse_term(s).unwrap().term
}

const VANILLA: &str = "solve([]).
solve([A|Gs]) :- solve_atom(A), solve(Gs).
solve_atom(A) :- clause(A,Body), solve(Body).
clause(member(X,Xs),[append(_,[X|_],_Xs)]).
clause(append([],L,L),[]).
clause(append([X|Xs],Y,[Z|Zs]),[append(Xs,Y,Zs)]).
";

const APP: &str = "app([],L,L).
app([H|X],Y,[H|Z]) :- app(X,Y,Z).
";

#[test]
fn norms() {
    let n = Norm::ListLength;
    assert!(n.is_rigid(&t("[X,Y]")));
    assert!(!n.is_rigid(&t("[X|Xs]")));
    assert!(n.is_rigid(&t("[a,b,c]")));
    assert!(n.is_rigid(&t("f(X)")));
    assert_eq!(n.size(&t("[a,b|T]")), 2);
    assert!(!Norm::TermSize.is_rigid(&t("f(X)")));
    assert_eq!(Norm::TermSize.size(&t("f(a,[b])")), 5);
    assert_eq!("termsize".parse::<Norm>().unwrap(), Norm::TermSize);
    assert!("depth".parse::<Norm>().is_err());
}

#[test]
fn linear_bounds() {
    // Both sides are read as one term so that they share variables.
    let rel = |n: Norm, pair: &str| {
        let p = t(pair);
        n.linear(p.arg(0)).bounds(&n.linear(p.arg(1)))
    };
    assert_eq!(rel(Norm::ListLength, "r([A|Gs],Gs)"), Some(true));
    assert_eq!(rel(Norm::ListLength, "r(Xs,Xs)"), Some(false));
    assert_eq!(rel(Norm::ListLength, "r([A|Gs],A)"), None);
    assert_eq!(rel(Norm::TermSize, "r(f(X,Y),g(Y))"), Some(false));
    assert_eq!(rel(Norm::TermSize, "r(f(X,Y),X)"), Some(true));
    assert_eq!(rel(Norm::TermSize, "r(f(X),g(X,X))"), None);
}

#[test]
fn vanilla_callset_and_division() {
    let p = parse_program(VANILLA).unwrap();
    let r = bta(&p, &t("solve([mem(X,Xs)])"), Norm::ListLength).unwrap();
    assert_eq!(r.rounds, 2);
    assert_eq!(r.annotation.replaced_atoms(), vec![t("solve_atom(A)")]);
    assert_eq!(r.annotation.replaced, BTreeSet::from([(1, 0)]));
    let want = ["solve(true)", "solve_atom(false)", "clause(false,false)"];
    let got: Vec<String> = r.callset.calls().map(|c| c.to_string()).collect();
    assert_eq!(got, want);
    let d = r.division();
    assert_eq!(
        d.get(PredKey::new("solve", 1)).unwrap(),
        &[BindingType::list_of(BindingType::Dynamic)]
    );
    assert_eq!(
        d.get(PredKey::new("solve_atom", 1)).unwrap(),
        &[BindingType::Dynamic]
    );
    assert_eq!(
        d.get(PredKey::new("clause", 2)).unwrap(),
        &[BindingType::Dynamic, BindingType::Dynamic]
    );
}

#[test]
fn vanilla_annotation_specialises() {
    let p = parse_program(VANILLA).unwrap();
    let r = bta(&p, &t("solve([mem(X,Xs)])"), Norm::ListLength).unwrap();
    let ap = r.annotated_program();
    let text = ap.render();
    assert!(
        text.contains("ann_clause(2,solve([A|B]),(memo(solve_atom(A)), unfold(solve(B))))"),
        "{text}"
    );
    assert!(
        text.contains("ann_clause(3,solve_atom(A),(unfold(clause(A,B)), unfold(solve(B))))"),
        "{text}"
    );
    assert!(crate::annotations::check_program(&ap)
        .iter()
        .all(|f| f.severity != crate::annotations::Severity::Error));
    let out = specialise(&ap, &[t("solve([member(X,Xs)])")]).unwrap();
    assert!(out.render().contains("solve_atom__"), "{}", out.render());
}

#[test]
fn terminating_program_is_left_alone() {
    let p = parse_program(APP).unwrap();
    let r = bta(&p, &t("app([a],Y,Z)"), Norm::ListLength).unwrap();
    assert_eq!(r.rounds, 1);
    assert!(r.annotation.replaced.is_empty());
    assert_eq!(r.annotation.t_program(), p);
    assert_eq!(r.callset.render(), "{app(true,false,false)}");
}

#[test]
fn unbound_goal_memoises_recursion() {
    let p = parse_program(APP).unwrap();
    let r = bta(&p, &t("app(X,Y,Z)"), Norm::TermSize).unwrap();
    assert_eq!(r.annotation.replaced, BTreeSet::from([(1, 0)]));
    let ap = r.annotated_program();
    assert!(ap.residual.contains(&PredKey::new("app", 3)));
}

#[test]
fn non_recursive_atoms_are_safe() {
    let p = parse_program("p(X) :- q(X), r(X).\nq(a).\nr(_).\n").unwrap();
    let r = bta(&p, &t("p(X)"), Norm::TermSize).unwrap();
    assert!(r.annotation.replaced.is_empty());
    assert_eq!(r.rounds, 1);
}

#[test]
fn builtins_follow_groundness() {
    let p = parse_program("len([],0).\nlen([_|T],N) :- len(T,M), N is M+1.\n").unwrap();
    let r = bta(&p, &t("len([a,b],N)"), Norm::TermSize).unwrap();
    assert!(r.annotation.replaced.is_empty());
    let ap = r.annotated_program();
    assert!(ap.render().contains("call(C is D + 1)"), "{}", ap.render());
    let r = bta(&p, &t("len([a,b],N)"), Norm::ListLength).unwrap();
    assert!(r
        .annotated_program()
        .render()
        .contains("rescall(C is D + 1)"));
}

#[test]
fn undefined_goal() {
    let p = parse_program(APP).unwrap();
    assert!(matches!(
        bta(&p, &t("rev(X,Y)"), Norm::ListLength),
        Err(BtaError::Undefined(_))
    ));
}

#[test]
fn interleaved_cycles_need_a_common_decrease() {
    // p decreases its first argument while q grows it back.
    let p = parse_program("p([_|X]) :- q(X).\nq(X) :- p([a,b|X]).\np([]).\n").unwrap();
    let r = bta(&p, &t("p([a])"), Norm::ListLength).unwrap();
    assert_eq!(r.annotation.replaced.len(), 1);
}
