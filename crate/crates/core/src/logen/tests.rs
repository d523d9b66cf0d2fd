use super::*;
use crate::annotations::parse_annotated;
use crate::lix::specialise;
use crate::term::{is_variant, parse_program, parse_term};

fn t(s: &str) -> Term {
    parse_term(s).unwrap().term
}

const PARSER: &str = "residual(nont(_,_,_)).
filter(nont(X,T,R),[static,dynamic,dynamic]).
ann_clause(1,nont(X,T,R),(unfold(t(a,T,V)),memo(nont(X,V,R)))).
ann_clause(2,nont(X,T,R),unfold(t(X,T,R))).
ann_clause(3,t(X,[X|Es],Es),true).
";

fn assert_same_clauses(got: &[Clause], want: &str) {
    let want = parse_program(want).unwrap();
    assert_eq!(got.len(), want.clauses.len(), "{}", render_clauses(got));
    for (g, w) in got.iter().zip(&want.clauses) {
        assert!(
            is_variant(&g.to_term(), &w.to_term()),
            "{} vs {}",
            render_clauses([g]),
            render_clauses([w])
        );
    }
}

#[test]
fn parser_genex_clauses() {
    let g = build_genex(&parse_annotated(PARSER).unwrap()).unwrap();
    assert_eq!(g.memoised, vec![PredKey::new("nont", 3)]);
    assert_same_clauses(
        &g.program.clauses,
        "nont_m(B,C,D,E) :- (find_pattern(nont(B,C,D),E) -> true ;
            insert_pattern(nont(B,F,G),H),
            findall(I, (nont_u(B,F,G,J),I = clause(H,J)),K),
            pp(K), find_pattern(nont(B,C,D),E)).
         nont_u(B,C,D,(E,F)) :- t_u(a,C,G,E), nont_m(B,G,D,F).
         nont_u(H,I,J,K) :- t_u(H,I,J,K).
         t_u(L,[L|M],M,true).",
    );
}

#[test]
fn general_division_generalises_at_run_time() {
    let p = parse_annotated(
        "residual(len(_,_)).
filter(len(X,N),[list(dynamic),dynamic]).
ann_clause(1,len([],0),true).
ann_clause(2,len([_|T],N),(memo(len(T,M)),rescall(N is M+1))).",
    )
    .unwrap();
    let g = build_genex(&p).unwrap();
    let memo = render_clauses(&g.program.clauses[..1]);
    assert!(memo.contains("generalise(len(A,B),D)"), "{memo}");
    assert!(memo.contains("add_extra_argument('_u',D,E,F)"), "{memo}");
    assert_same_clauses(
        &g.program.clauses[1..],
        "len_u([],0,true).
         len_u([_|T],N,(V,N is M+1)) :- len_m(T,M,V).",
    );
}

#[test]
fn genex_round_trips_through_text() {
    let g = build_genex(&parse_annotated(PARSER).unwrap()).unwrap();
    let text = g.render();
    assert!(text.starts_with(HEADER));
    assert_eq!(GenEx::parse(&text).unwrap(), g);
}

fn same_as_lix(ann: &str, goals: &[&str]) {
    let p = parse_annotated(ann).unwrap();
    let goals: Vec<Term> = goals.iter().map(|g| t(g)).collect();
    let want = specialise(&p, &goals).unwrap();
    let got = run_genex(&build_genex(&p).unwrap(), &goals).unwrap();
    assert_eq!(got.residual.render(), want.render());
}

#[test]
fn parser_matches_lix() {
    same_as_lix(PARSER, &["nont(c,T,R)"]);
    same_as_lix(PARSER, &["nont(c,T,R)", "nont(a,T,R)"]);
}

#[test]
fn hide_nf_matches_lix() {
    same_as_lix(
        "residual(p(_)).
filter(p(X),[dynamic]).
ann_clause(1,p(X),(rescall(print(X)),hide_nf(unfold(q(X))))).
ann_clause(2,q(a),true).
ann_clause(3,q(b),true).",
        &["p(X)"],
    );
}

#[test]
fn conditionals_match_lix() {
    same_as_lix(
        "residual(p(_,_)).
filter(p(X,Y),[static,dynamic]).
ann_clause(1,p(X,Y),(if(call(X == a),rescall(yes(Y)),rescall(no(Y))),not(call(X == b)))).
ann_clause(2,p(X,Y),resif(rescall(t(Y)),rescall(u(Y)),rescall(v(Y)))).
ann_clause(3,p(X,Y),(call(X = a) ; rescall(w(Y)))).",
        &["p(a,Y)", "p(b,Y)"],
    );
}

#[test]
fn semif_matches_lix() {
    same_as_lix(
        "residual(m(_,_)).
filter(m(X,Y),[static,dynamic]).
ann_clause(1,m(X,Y),semif(semicall(X == Y),rescall(eq(Y)),rescall(ne(Y)))).",
        &["m(a,Y)"],
    );
}

#[test]
fn missing_memoiser() {
    let g = build_genex(&parse_annotated(PARSER).unwrap()).unwrap();
    assert!(matches!(
        run_genex(&g, &[t("t(a,T,R)")]),
        Err(LogenError::NoEntry(_))
    ));
}

#[test]
fn add_extra_argument_appends() {
    assert_eq!(
        add_extra_argument("_u", &t("p(a)"), t("X")).unwrap(),
        t("p_u(a,X)")
    );
    assert_eq!(
        add_extra_argument("_m", &t("q"), t("X")).unwrap(),
        t("q_m(X)")
    );
    assert_eq!(add_extra_argument("_m", &t("X"), t("Y")), None);
}
