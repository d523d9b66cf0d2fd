use super::*;
use crate::annotations::parse_annotated;
use crate::term::{parse_term, render_clauses};

fn t(s: &str) -> Term {
    parse_term(s).unwrap().term
}

const PARSER: &str = "residual(nont(_,_,_)).
filter(nont(X,T,R),[static,dynamic,dynamic]).
ann_clause(1,nont(X,T,R),(unfold(t(a,T,V)),memo(nont(X,V,R)))).
ann_clause(2,nont(X,T,R),unfold(t(X,T,R))).
ann_clause(3,t(X,[X|Es],Es),true).
";

#[test]
fn parser_resultants() {
    let p = parse_annotated(PARSER).unwrap();
    let mut s = Specialiser::new(&p, LixConfig::default()).unwrap();
    let rs = s.unfold_atom(&t("nont(c,T,R)")).unwrap();
    assert_eq!(rs.len(), 2);
    assert_eq!(render_term(&rs[0].head), "nont(c,[a|A],B)");
    assert_eq!(rs[0].body.len(), 1);
    assert_eq!(rs[1].body, Vec::<Term>::new());
    assert!(crate::term::is_variant(&rs[1].head, &t("nont(c,[c|R],R)")));
}

#[test]
fn parser_residual() {
    let p = parse_annotated(PARSER).unwrap();
    let r = specialise(&p, &[t("nont(c,T,R)")]).unwrap();
    assert_eq!(
        r.render(),
        "nont__0([a|A],B) :- nont__0(A,B).\nnont__0([c|A],A).\nnont(c,A,B) :- nont__0(A,B).\n"
    );
}

#[test]
fn fully_reducible_append() {
    let p = parse_annotated(
        "ann_clause(1,app([],L,L),true).
ann_clause(2,app([H|X],Y,[H|Z]),unfold(app(X,Y,Z))).",
    )
    .unwrap();
    let mut s = Specialiser::new(&p, LixConfig::default()).unwrap();
    let rs = s.unfold_atom(&t("app([a,b],Y,Z)")).unwrap();
    assert_eq!(rs.len(), 1);
    assert!(crate::term::is_variant(
        &rs[0].head,
        &t("app([a,b],Y,[a,b|Y])")
    ));
    assert!(rs[0].body.is_empty());
}

#[test]
fn hide_nf_keeps_bindings_local() {
    let p = parse_annotated(
        "residual(p(_)).
filter(p(X),[dynamic]).
ann_clause(1,p(X),(rescall(print(X)),hide_nf(unfold(q(X))))).
ann_clause(2,q(a),true).
ann_clause(3,q(b),true).",
    )
    .unwrap();
    let r = specialise(&p, &[t("p(X)")]).unwrap();
    assert_eq!(
        r.render(),
        "p__0(A) :- print(A), (A = a ; A = b).\np(A) :- p__0(A).\n"
    );
}

#[test]
fn conditionals_and_negation() {
    let p = parse_annotated(
        "residual(p(_,_)).
filter(p(X,Y),[static,dynamic]).
ann_clause(1,p(X,Y),(if(call(X == a),rescall(yes(Y)),rescall(no(Y))),not(call(X == b)))).
ann_clause(2,p(X,Y),resif(rescall(t(Y)),rescall(u(Y)),rescall(v(Y)))).
ann_clause(3,p(X,Y),(call(X = a) ; rescall(w(Y)))).",
    )
    .unwrap();
    let r = specialise(&p, &[t("p(a,Y)")]).unwrap();
    assert_eq!(
        render_clauses(&r.clauses),
        "p__0(A) :- yes(A).\np__0(A) :- t(A) -> u(A) ; v(A).\np__0(A).\np__0(A) :- w(A).\n"
    );
}

#[test]
fn empty_entry_fails() {
    let p = parse_annotated(
        "residual(p(_)).
filter(p(X),[static]).
ann_clause(1,p(a),true).",
    )
    .unwrap();
    let r = specialise(&p, &[t("p(b)")]).unwrap();
    assert_eq!(r.render(), "p__0 :- fail.\np(b) :- p__0.\n");
}

#[test]
fn unsafe_goal_is_rejected() {
    let p = parse_annotated(PARSER).unwrap();
    assert!(matches!(
        specialise(&p, &[t("nont(X,T,R)")]),
        Err(LixError::Unsafe { .. })
    ));
}

#[test]
fn budget_names_the_memo_table() {
    let p = parse_annotated(
        "residual(p(_)).
filter(p(X),[static]).
ann_clause(1,p(X),memo(p(s(X)))).",
    )
    .unwrap();
    let cfg = LixConfig {
        budget: 50,
        ..Default::default()
    };
    match specialise_with(&p, &[t("p(z)")], cfg) {
        Err(LixError::Budget {
            entries, latest, ..
        }) => {
            assert!(entries > 10);
            assert!(latest.starts_with("p(s(s("));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn interface_clause_for_registered_goal() {
    let p = parse_annotated(PARSER).unwrap();
    let mut s = Specialiser::new(&p, LixConfig::default()).unwrap();
    s.add_goal(&t("nont(c,T,R)")).unwrap();
    let c = make_interface_clause(&p, &t("nont(c,T,R)"), s.memo()).unwrap();
    assert_eq!(
        crate::term::render_clause(&c),
        "nont(c,A,B) :- nont__0(A,B)."
    );
    assert!(matches!(
        make_interface_clause(&p, &t("nont(d,T,R)"), s.memo()),
        Err(LixError::Unregistered(_))
    ));
}
