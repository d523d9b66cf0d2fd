//! The compiler generator.
//!
//! [`build_genex`] turns an annotated program into a generating extension: a
//! plain program with an unfolder `p_u/(n+1)` for every predicate and a
//! memoiser `p_m/(n+1)` for every predicate that is ever memoised. Running
//! `p_m(Args,F)` on the engine with the runtime builtins of [`runtime`]
//! specialises the program for `p(Args)` and binds `F` to the filtered call.

mod runtime;
mod translate;

use thiserror::Error;

use crate::annotations::{residual_negations, AnnClause, AnnotatedProgram};
use crate::binding_types::{BindingType, Division, TypeDefinition, TypeError, TypeSystem};
use crate::engine::EngineError;
use crate::lix::LixError;
use crate::term::{
    atoms, canonical, conj_list, normalise_body, parse_terms, render_clauses, render_term, Atom,
    Clause, ParseError, PredKey, Program, Term,
};

pub use runtime::{run_genex, run_genex_with, GenexRun, Runtime, RUNTIME_BUILTINS};
pub use translate::{translate_body, BodyTranslation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogenError {
    #[error("memoised predicate {0} has no division entry")]
    MissingDivision(PredKey),
    #[error("clause {0}: reducible negation may leave residual code")]
    ResidualNegation(i64),
    #[error("the generating extension has no memo predicate for {0}; nothing to call")]
    NoEntry(PredKey),
    #[error("the generating extension failed for {0}")]
    Failed(String),
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("malformed generating extension: {0}")]
    Malformed(String),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Residual(#[from] LixError),
}

/// A generating extension together with the division its memoisers use at
/// run time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenEx {
    /// Memo clauses first, then unfolder clauses in source order.
    pub program: Program,
    pub division: Division,
    pub types: TypeSystem,
    /// Predicates with a memoiser, in the order of their memo clauses.
    pub memoised: Vec<PredKey>,
}

const HEADER: &str =
    "/*  --------------------  */\n/*  GENERATING EXTENSION  */\n/*  --------------------  */\n";

impl GenEx {
    /// The genex file: header comment, runtime directives, the division, and
    /// the clauses.
    pub fn render(&self) -> String {
        let mut out = String::from(HEADER);
        out.push_str(":- logen_reconsult(memo).\n:- logen_reconsult(pp).\n");
        for def in self.types.user_definitions() {
            out.push_str(&format!(
                ":- {}.\n",
                render_term(&Term::app("type", vec![def.to_term()]))
            ));
        }
        for (pred, types) in self.division.iter() {
            out.push_str(&format!(
                ":- {}.\n",
                render_term(&crate::annotations::filter_term(*pred, types))
            ));
        }
        out.push_str(&render_clauses(&self.program.clauses));
        out
    }

    /// Reads a genex file written by [`GenEx::render`].
    pub fn parse(text: &str) -> Result<GenEx, LogenError> {
        let mut clauses = Vec::new();
        let mut division = Division::new();
        let mut types = TypeSystem::new();
        for rt in parse_terms(text)? {
            let t = rt.term;
            if t.is_functor(atoms::NECK, 1) {
                let d = t.arg(0);
                match d.functor() {
                    Some((f, 1)) if f.name() == "logen_reconsult" => {}
                    Some((f, 1)) if f == atoms::TYPE => {
                        types.define(TypeDefinition::from_term(d.arg(0))?)?
                    }
                    Some((f, 2)) if f.name() == "filter" => {
                        let pred = d
                            .arg(0)
                            .pred_key()
                            .ok_or_else(|| LogenError::Malformed(render_term(d)))?;
                        let list = d
                            .arg(1)
                            .as_list()
                            .ok_or_else(|| LogenError::Malformed(render_term(d)))?;
                        let tys = list
                            .into_iter()
                            .map(BindingType::from_term)
                            .collect::<Result<Vec<_>, _>>()?;
                        division.insert(pred, tys)?;
                    }
                    _ => return Err(LogenError::Malformed(render_term(&t))),
                }
            } else {
                clauses.push(Clause::from_term(&t).map_err(LogenError::Malformed)?);
            }
        }
        let mut memoised = Vec::new();
        for c in &clauses {
            let k = c.pred();
            if let Some(base) = k.name.name().strip_suffix("_m") {
                let orig = PredKey::new(base, k.arity - 1);
                if !memoised.contains(&orig) {
                    memoised.push(orig);
                }
            }
        }
        Ok(GenEx {
            program: Program::new(clauses),
            division,
            types,
            memoised,
        })
    }
}

/// `p` with `suffix` appended to its name and `extra` as a last argument.
pub fn add_extra_argument(suffix: &str, call: &Term, extra: Term) -> Option<Term> {
    let (f, _) = call.functor()?;
    let mut args = call.args().to_vec();
    args.push(extra);
    Some(Term::compound(
        Atom::new(&format!("{}{}", f.name(), suffix)),
        args,
    ))
}

/// The unfolder clause for an annotated clause: the head gains the residual
/// code as a last argument and the body is the translated annotations.
pub fn gen_unfold_clause(c: &AnnClause) -> Clause {
    let mut next = [c.head.max_var(), c.body.to_term().max_var()]
        .into_iter()
        .flatten()
        .max()
        .map_or(0, |m| m + 1);
    let tr = translate_body(&c.body, &mut next);
    let head = add_extra_argument("_u", &c.head, normalise_body(&tr.residual))
        .expect("clause heads are callable");
    Clause::new(head, normalise_body(&tr.goal))
}

fn fresh(next: &mut u32) -> Term {
    let v = Term::var(*next);
    *next += 1;
    v
}

/// The memo clause for `pred`. With a division of only `static` and
/// `dynamic` the generalisation is computed here; otherwise the clause calls
/// `generalise/2` at run time.
pub fn gen_memo_clause(pred: PredKey, d: &Division) -> Result<Clause, LogenError> {
    let types = d.get(pred).ok_or(LogenError::MissingDivision(pred))?;
    let n = pred.arity as u32;
    let mut next = n + 1;
    let args: Vec<Term> = (0..n).map(Term::var).collect();
    let call = Term::compound(pred.name, args.clone());
    let v = Term::var(n);
    let head = add_extra_argument("_m", &call, v.clone()).expect("callable");
    let find = Term::app("find_pattern", vec![call.clone(), v.clone()]);
    let simple = types
        .iter()
        .all(|t| matches!(t, BindingType::Static | BindingType::Dynamic));
    let miss = if simple {
        let gargs = args
            .iter()
            .zip(types)
            .map(|(a, t)| match t {
                BindingType::Static => a.clone(),
                _ => fresh(&mut next),
            })
            .collect();
        let gcall = Term::compound(pred.name, gargs);
        let (h, body, i, k) = (
            fresh(&mut next),
            fresh(&mut next),
            fresh(&mut next),
            fresh(&mut next),
        );
        let rcall = add_extra_argument("_u", &gcall, body.clone()).expect("callable");
        conj_list(vec![
            Term::app("insert_pattern", vec![gcall, h.clone()]),
            findall_clauses(i, rcall, h, body, k.clone()),
            Term::app("pp", vec![k]),
            find.clone(),
        ])
    } else {
        let [e, f, g, h, i, j] = [(); 6].map(|_| fresh(&mut next));
        conj_list(vec![
            Term::app("generalise", vec![call.clone(), e.clone()]),
            Term::app(
                "add_extra_argument",
                vec![Term::atom("_u"), e.clone(), f.clone(), g.clone()],
            ),
            Term::app("insert_pattern", vec![e, h.clone()]),
            findall_clauses(i, g, h, f, j.clone()),
            Term::app("pp", vec![j]),
            find.clone(),
        ])
    };
    let body = Term::pair(
        atoms::SEMI,
        Term::pair(atoms::ARROW, find, Term::truth()),
        miss,
    );
    Ok(Clause::new(head, body))
}

/// `findall(I, (Goal, I = clause(H,Body)), K)`.
fn findall_clauses(i: Term, goal: Term, h: Term, body: Term, k: Term) -> Term {
    let item = Term::pair(atoms::EQ, i.clone(), Term::app("clause", vec![h, body]));
    Term::compound(
        atoms::FINDALL,
        vec![i, Term::pair(atoms::COMMA, goal, item), k],
    )
}

/// Compiles an annotated program into its generating extension.
pub fn build_genex(p: &AnnotatedProgram) -> Result<GenEx, LogenError> {
    if let Some(&id) = residual_negations(p).first() {
        return Err(LogenError::ResidualNegation(id));
    }
    let memoised = p.memoised_predicates();
    let mut clauses = Vec::new();
    for pred in &memoised {
        clauses.push(gen_memo_clause(*pred, &p.division)?);
    }
    clauses.extend(p.clauses.iter().map(gen_unfold_clause));
    // Number variables in order of appearance, as a reader of the file would.
    let clauses = clauses
        .iter()
        .map(|c| Clause::from_term(&canonical(&c.to_term())).expect("a clause term"))
        .collect();
    Ok(GenEx {
        program: Program::new(clauses),
        division: p.division.clone(),
        types: p.types.clone(),
        memoised,
    })
}

#[cfg(test)]
mod tests;
