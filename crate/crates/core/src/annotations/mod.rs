//! Annotated programs: clauses whose body literals are marked reducible or
//! residual, together with the division and the residual entry points.
//!
//! The file format is a list of facts:
//!
//! ```text
//! static_consult([]).
//! residual(nont(_,_,_)).
//! filter(nont(X,T,R),[static,dynamic,dynamic]).
//! ann_clause(1,nont(X,T,R),(unfold(t(a,T,V)),memo(nont(X,V,R)))).
//! ```
//!
//! Type definitions are given as `:- type list(T) ---> [] ; [T|list(T)].`

mod validate;

use indexmap::IndexSet;
use thiserror::Error;

use crate::binding_types::{BindingType, Division, TypeDefinition, TypeError, TypeSystem};
use crate::term::{
    atoms, conj, parse_terms, render_term, Clause, ParseError, PredKey, Program, Term,
};

pub use validate::{
    check_hide, check_program, classify_impure, hidden, residual_negations, Finding, HideViolation,
    Impurity, Severity,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotationError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("line {line}: unknown annotation {found}")]
    UnknownAnnotation { line: usize, found: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: filter for {pred} gives {given} binding types")]
    FilterArity {
        line: usize,
        pred: PredKey,
        given: usize,
    },
    #[error("line {line}: {source}")]
    Type { line: usize, source: TypeError },
    #[error("clause id {0} is used twice")]
    DuplicateId(i64),
}

/// An annotated clause body.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AnnBody {
    True,
    /// Reducible user predicate call.
    Unfold(Term),
    /// Residual user predicate call, specialised separately.
    Memo(Term),
    /// Builtin or open call executed at specialisation time.
    Call(Term),
    /// Builtin or open call left in the residual program.
    Rescall(Term),
    /// Builtin tested at specialisation time, residualised when undecided.
    Semicall(Term),
    /// `call/1` of a goal that is unfolded once known.
    Ucall(Term),
    /// `call/1` of a goal that is memoised once known.
    Mcall(Term),
    Conj(Box<AnnBody>, Box<AnnBody>),
    If(Box<AnnBody>, Box<AnnBody>, Box<AnnBody>),
    Resif(Box<AnnBody>, Box<AnnBody>, Box<AnnBody>),
    Semif(Box<AnnBody>, Box<AnnBody>, Box<AnnBody>),
    Not(Box<AnnBody>),
    Resnot(Box<AnnBody>),
    Disj(Box<AnnBody>, Box<AnnBody>),
    Resdisj(Box<AnnBody>, Box<AnnBody>),
    /// Hides bindings; failure of the inner goal still fails.
    Hide(Box<AnnBody>),
    /// Hides bindings and failure.
    HideNf(Box<AnnBody>),
}

fn bx(b: AnnBody) -> Box<AnnBody> {
    Box::new(b)
}

impl AnnBody {
    /// Reads an annotated body term.
    pub fn from_term(t: &Term) -> Result<AnnBody, String> {
        let Some((f, n)) = t.functor() else {
            return Err(render_term(t));
        };
        let a = t.args();
        let sub = |i: usize| AnnBody::from_term(&a[i]).map(bx);
        Ok(match (f.name(), n) {
            ("true", 0) => AnnBody::True,
            (",", 2) => AnnBody::Conj(sub(0)?, sub(1)?),
            ("unfold", 1) => AnnBody::Unfold(a[0].clone()),
            ("memo", 1) => AnnBody::Memo(a[0].clone()),
            ("call", 1) => AnnBody::Call(a[0].clone()),
            ("rescall", 1) => AnnBody::Rescall(a[0].clone()),
            ("semicall", 1) => AnnBody::Semicall(a[0].clone()),
            ("ucall", 1) => AnnBody::Ucall(a[0].clone()),
            ("mcall", 1) => AnnBody::Mcall(a[0].clone()),
            ("if", 3) => AnnBody::If(sub(0)?, sub(1)?, sub(2)?),
            ("resif", 3) => AnnBody::Resif(sub(0)?, sub(1)?, sub(2)?),
            ("semif", 3) => AnnBody::Semif(sub(0)?, sub(1)?, sub(2)?),
            ("not", 1) => AnnBody::Not(sub(0)?),
            ("resnot", 1) => AnnBody::Resnot(sub(0)?),
            (";", 2) => AnnBody::Disj(sub(0)?, sub(1)?),
            ("resdisj", 2) => AnnBody::Resdisj(sub(0)?, sub(1)?),
            ("hide", 1) => AnnBody::Hide(sub(0)?),
            ("hide_nf", 1) => AnnBody::HideNf(sub(0)?),
            _ => return Err(render_term(t)),
        })
    }

    pub fn to_term(&self) -> Term {
        let un = |name: &str, b: &AnnBody| Term::app(name, vec![b.to_term()]);
        let tri = |name: &str, a: &AnnBody, b: &AnnBody, c: &AnnBody| {
            Term::app(name, vec![a.to_term(), b.to_term(), c.to_term()])
        };
        match self {
            AnnBody::True => Term::truth(),
            AnnBody::Unfold(g) => Term::app("unfold", vec![g.clone()]),
            AnnBody::Memo(g) => Term::app("memo", vec![g.clone()]),
            AnnBody::Call(g) => Term::app("call", vec![g.clone()]),
            AnnBody::Rescall(g) => Term::app("rescall", vec![g.clone()]),
            AnnBody::Semicall(g) => Term::app("semicall", vec![g.clone()]),
            AnnBody::Ucall(g) => Term::app("ucall", vec![g.clone()]),
            AnnBody::Mcall(g) => Term::app("mcall", vec![g.clone()]),
            AnnBody::Conj(a, b) => Term::pair(atoms::COMMA, a.to_term(), b.to_term()),
            AnnBody::If(a, b, c) => tri("if", a, b, c),
            AnnBody::Resif(a, b, c) => tri("resif", a, b, c),
            AnnBody::Semif(a, b, c) => tri("semif", a, b, c),
            AnnBody::Not(a) => un("not", a),
            AnnBody::Resnot(a) => un("resnot", a),
            AnnBody::Disj(a, b) => Term::pair(atoms::SEMI, a.to_term(), b.to_term()),
            AnnBody::Resdisj(a, b) => Term::app("resdisj", vec![a.to_term(), b.to_term()]),
            AnnBody::Hide(a) => un("hide", a),
            AnnBody::HideNf(a) => un("hide_nf", a),
        }
    }

    /// The same annotations with `f` applied to every goal argument.
    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> AnnBody {
        let mut sub = |b: &AnnBody| bx(b.map_terms(&mut *f));
        match self {
            AnnBody::True => AnnBody::True,
            AnnBody::Unfold(g) => AnnBody::Unfold(f(g)),
            AnnBody::Memo(g) => AnnBody::Memo(f(g)),
            AnnBody::Call(g) => AnnBody::Call(f(g)),
            AnnBody::Rescall(g) => AnnBody::Rescall(f(g)),
            AnnBody::Semicall(g) => AnnBody::Semicall(f(g)),
            AnnBody::Ucall(g) => AnnBody::Ucall(f(g)),
            AnnBody::Mcall(g) => AnnBody::Mcall(f(g)),
            AnnBody::Conj(a, b) => AnnBody::Conj(sub(a), sub(b)),
            AnnBody::If(a, b, c) => AnnBody::If(sub(a), sub(b), sub(c)),
            AnnBody::Resif(a, b, c) => AnnBody::Resif(sub(a), sub(b), sub(c)),
            AnnBody::Semif(a, b, c) => AnnBody::Semif(sub(a), sub(b), sub(c)),
            AnnBody::Not(a) => AnnBody::Not(sub(a)),
            AnnBody::Resnot(a) => AnnBody::Resnot(sub(a)),
            AnnBody::Disj(a, b) => AnnBody::Disj(sub(a), sub(b)),
            AnnBody::Resdisj(a, b) => AnnBody::Resdisj(sub(a), sub(b)),
            AnnBody::Hide(a) => AnnBody::Hide(sub(a)),
            AnnBody::HideNf(a) => AnnBody::HideNf(sub(a)),
        }
    }

    /// The plain goal this annotation marks.
    pub fn strip(&self) -> Term {
        let ite = |a: &AnnBody, b: &AnnBody, c: &AnnBody| {
            Term::pair(
                atoms::SEMI,
                Term::pair(atoms::ARROW, a.strip(), b.strip()),
                c.strip(),
            )
        };
        match self {
            AnnBody::True => Term::truth(),
            AnnBody::Unfold(g)
            | AnnBody::Memo(g)
            | AnnBody::Call(g)
            | AnnBody::Rescall(g)
            | AnnBody::Semicall(g) => g.clone(),
            AnnBody::Ucall(g) | AnnBody::Mcall(g) => Term::compound(atoms::CALL, vec![g.clone()]),
            AnnBody::Conj(a, b) => conj(a.strip(), b.strip()),
            AnnBody::If(a, b, c) | AnnBody::Resif(a, b, c) | AnnBody::Semif(a, b, c) => {
                ite(a, b, c)
            }
            AnnBody::Not(a) | AnnBody::Resnot(a) => {
                Term::compound(atoms::NOT_PROVABLE, vec![a.strip()])
            }
            AnnBody::Disj(a, b) | AnnBody::Resdisj(a, b) => {
                Term::pair(atoms::SEMI, a.strip(), b.strip())
            }
            AnnBody::Hide(a) | AnnBody::HideNf(a) => a.strip(),
        }
    }

    /// Conjuncts of a body, flattening nested conjunctions.
    pub fn conjuncts(&self) -> Vec<&AnnBody> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(b) = stack.pop() {
            if let AnnBody::Conj(x, y) = b {
                stack.push(y);
                stack.push(x);
            } else {
                out.push(b);
            }
        }
        out
    }

    /// Immediate sub-bodies.
    pub fn children(&self) -> Vec<&AnnBody> {
        match self {
            AnnBody::Conj(a, b) | AnnBody::Disj(a, b) | AnnBody::Resdisj(a, b) => vec![a, b],
            AnnBody::If(a, b, c) | AnnBody::Resif(a, b, c) | AnnBody::Semif(a, b, c) => {
                vec![a, b, c]
            }
            AnnBody::Not(a) | AnnBody::Resnot(a) | AnnBody::Hide(a) | AnnBody::HideNf(a) => vec![a],
            _ => Vec::new(),
        }
    }

    /// Calls the body makes, with their annotation, in textual order.
    pub fn leaves(&self) -> Vec<&AnnBody> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(b) = stack.pop() {
            let kids = b.children();
            if kids.is_empty() {
                if *b != AnnBody::True {
                    out.push(b);
                }
            } else {
                stack.extend(kids.into_iter().rev());
            }
        }
        out
    }

    /// Builds a right-associated conjunction; `true` when empty.
    pub fn conj_list(parts: Vec<AnnBody>) -> AnnBody {
        parts
            .into_iter()
            .rev()
            .reduce(|acc, b| AnnBody::Conj(bx(b), bx(acc)))
            .unwrap_or(AnnBody::True)
    }
}

/// `ann_clause(Id, Head, Body)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AnnClause {
    pub id: i64,
    pub head: Term,
    pub body: AnnBody,
}

impl AnnClause {
    pub fn pred(&self) -> PredKey {
        self.head.pred_key().expect("clause heads are callable")
    }

    pub fn to_term(&self) -> Term {
        Term::app(
            "ann_clause",
            vec![Term::Int(self.id), self.head.clone(), self.body.to_term()],
        )
    }

    /// The unannotated clause.
    pub fn strip(&self) -> Clause {
        Clause::new(self.head.clone(), self.body.strip())
    }
}

/// An annotated program with its division and entry points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotatedProgram {
    pub clauses: Vec<AnnClause>,
    pub division: Division,
    /// Predicates declared `residual/1`, in declaration order.
    pub residual: IndexSet<PredKey>,
    pub types: TypeSystem,
    /// Arguments of `static_consult/1` facts.
    pub static_consult: Vec<Term>,
}

impl AnnotatedProgram {
    pub fn predicates(&self) -> Vec<PredKey> {
        let mut out: IndexSet<PredKey> = IndexSet::new();
        for c in &self.clauses {
            out.insert(c.pred());
        }
        out.into_iter().collect()
    }

    pub fn clauses_for(&self, pred: PredKey) -> impl Iterator<Item = &AnnClause> {
        self.clauses.iter().filter(move |c| c.pred() == pred)
    }

    pub fn defines(&self, pred: PredKey) -> bool {
        self.clauses.iter().any(|c| c.pred() == pred)
    }

    /// Predicates that get a memo clause: residual entries followed by
    /// memoised predicates, in first-mention order.
    ///
    /// The target of an `mcall` is only known at specialisation time, so a
    /// program using `mcall` also memoises every defined predicate that has a
    /// division entry.
    pub fn memoised_predicates(&self) -> Vec<PredKey> {
        let mut out: IndexSet<PredKey> = self.residual.clone();
        let mut has_mcall = false;
        for c in &self.clauses {
            for leaf in c.body.leaves() {
                match leaf {
                    AnnBody::Memo(g) => {
                        if let Some(k) = g.pred_key() {
                            out.insert(k);
                        }
                    }
                    AnnBody::Mcall(_) => has_mcall = true,
                    _ => {}
                }
            }
        }
        if has_mcall {
            for (k, _) in self.division.iter() {
                if self.defines(*k) {
                    out.insert(*k);
                }
            }
        }
        out.into_iter().collect()
    }

    /// The plain program obtained by dropping every annotation.
    pub fn strip(&self) -> Program {
        Program::new(self.clauses.iter().map(AnnClause::strip).collect())
    }

    /// The annotated file text. Reading it back yields an equal program.
    pub fn render(&self) -> String {
        let mut lines = Vec::new();
        for sc in &self.static_consult {
            lines.push(render_term(&Term::app("static_consult", vec![sc.clone()])));
        }
        for def in self.types.user_definitions() {
            lines.push(format!(
                ":- {}",
                render_term(&Term::app("type", vec![def.to_term()]))
            ));
        }
        for r in &self.residual {
            lines.push(render_term(&Term::app("residual", vec![open_atom(*r)])));
        }
        for (pred, types) in self.division.iter() {
            lines.push(render_term(&filter_term(*pred, types)));
        }
        for c in &self.clauses {
            lines.push(render_term(&c.to_term()));
        }
        let mut out = String::new();
        for l in lines {
            out.push_str(&l);
            out.push_str(".\n");
        }
        out
    }
}

/// `p(A1,..,An)` with distinct variables.
pub(crate) fn open_atom(pred: PredKey) -> Term {
    Term::compound(pred.name, (0..pred.arity as u32).map(Term::var).collect())
}

/// `filter(p(A1,..), [τ1,..])`.
pub(crate) fn filter_term(pred: PredKey, types: &[BindingType]) -> Term {
    Term::app(
        "filter",
        vec![
            open_atom(pred),
            Term::list(types.iter().map(BindingType::to_term)),
        ],
    )
}

/// Reads an annotated file.
pub fn parse_annotated(text: &str) -> Result<AnnotatedProgram, AnnotationError> {
    let mut prog = AnnotatedProgram::default();
    let mut ids: IndexSet<i64> = IndexSet::new();
    for rt in parse_terms(text)? {
        let line = rt.line;
        let mut item = rt.term;
        if item.is_functor(atoms::NECK, 1) {
            item = item.arg(0).clone();
        }
        let malformed = |message: String| AnnotationError::Malformed { line, message };
        let type_err = |source: TypeError| AnnotationError::Type { line, source };
        let Some((f, n)) = item.functor() else {
            return Err(malformed(format!("unexpected item {}", render_term(&item))));
        };
        match (f.name(), n) {
            ("static_consult", 1) => prog.static_consult.push(item.arg(0).clone()),
            ("residual", 1) => {
                let pred = item.arg(0).pred_key().ok_or_else(|| {
                    malformed(format!(
                        "residual/1 needs an atom, found {}",
                        render_term(item.arg(0))
                    ))
                })?;
                prog.residual.insert(pred);
            }
            ("filter", 2) => {
                let pred = item.arg(0).pred_key().ok_or_else(|| {
                    malformed(format!(
                        "filter/2 needs an atom, found {}",
                        render_term(item.arg(0))
                    ))
                })?;
                let items = item.arg(1).as_list().ok_or_else(|| {
                    malformed("filter/2 needs a list of binding types".to_string())
                })?;
                if items.len() != pred.arity {
                    return Err(AnnotationError::FilterArity {
                        line,
                        pred,
                        given: items.len(),
                    });
                }
                let types = items
                    .into_iter()
                    .map(BindingType::from_term)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(type_err)?;
                prog.division.insert(pred, types).map_err(type_err)?;
            }
            ("type", 1) => {
                let def = TypeDefinition::from_term(item.arg(0)).map_err(type_err)?;
                prog.types.define(def).map_err(type_err)?;
            }
            ("ann_clause", 3) => {
                let Term::Int(id) = item.arg(0) else {
                    return Err(malformed("ann_clause/3 needs an integer id".to_string()));
                };
                if !ids.insert(*id) {
                    return Err(AnnotationError::DuplicateId(*id));
                }
                let head = item.arg(1).clone();
                if !head.is_callable() {
                    return Err(malformed(format!(
                        "clause head must be callable, found {}",
                        render_term(&head)
                    )));
                }
                let body = AnnBody::from_term(item.arg(2))
                    .map_err(|found| AnnotationError::UnknownAnnotation { line, found })?;
                prog.clauses.push(AnnClause {
                    id: *id,
                    head,
                    body,
                });
            }
            _ => return Err(malformed(format!("unexpected item {}", render_term(&item)))),
        }
    }
    Ok(prog)
}

/// How a builtin can be treated in a mixline fashion.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mixline {
    /// Failure at specialisation time is final; success proves nothing.
    Varlike,
    /// Success at specialisation time is final; failure proves nothing.
    Groundlike,
}

/// The mixline class of a builtin call, if it has one.
pub fn mixline_kind(goal: &Term) -> Option<Mixline> {
    let (f, n) = goal.functor()?;
    match (f, n) {
        (f, 1) if f == atoms::VAR => Some(Mixline::Varlike),
        (f, 2) if f == atoms::COPY_TERM || f == atoms::NOT_IDENTICAL => Some(Mixline::Varlike),
        (f, 1)
            if f == atoms::GROUND
                || f == atoms::NONVAR
                || f == atoms::ATOM
                || f == atoms::INTEGER =>
        {
            Some(Mixline::Groundlike)
        }
        (f, 2) if f == atoms::IDENTICAL => Some(Mixline::Groundlike),
        _ => None,
    }
}

/// Builtins whose outcome depends on how instantiated their arguments are.
pub fn is_propagation_sensitive(goal: &Term) -> bool {
    mixline_kind(goal).is_some()
}

/// Builtins with a visible side effect.
pub fn is_side_effect(goal: &Term) -> bool {
    goal.functor() == Some((atoms::PRINT, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Atom;

    const PARSER: &str = "static_consult([]).
residual(nont(_,_,_)).
filter(nont(X,T,R),[static,dynamic,dynamic]).
ann_clause(1,nont(X,T,R), (unfold(t(a,T,V)),memo(nont(X,V,R)))).
ann_clause(2,nont(X,T,R), (unfold(t(X,T,R)))).
ann_clause(3,t(X,[X|Es],Es),true).
";

    #[test]
    fn parses_the_parser_file() {
        let p = parse_annotated(PARSER).unwrap();
        assert_eq!(p.clauses.len(), 3);
        assert_eq!(
            p.residual.iter().copied().collect::<Vec<_>>(),
            vec![PredKey::new("nont", 3)]
        );
        assert_eq!(
            p.division.get(PredKey::new("nont", 3)).unwrap(),
            &[
                BindingType::Static,
                BindingType::Dynamic,
                BindingType::Dynamic
            ]
        );
        assert_eq!(p.memoised_predicates(), vec![PredKey::new("nont", 3)]);
        assert_eq!(
            crate::term::render_clauses(&p.strip().clauses),
            "nont(A,B,C) :- t(a,B,D), nont(A,D,C).\nnont(A,B,C) :- t(A,B,C).\nt(A,[A|B],B).\n"
        );
    }

    #[test]
    fn render_then_parse_is_identity() {
        let p = parse_annotated(PARSER).unwrap();
        let text = p.render();
        let q = parse_annotated(&text).unwrap();
        assert_eq!(q.render(), text);
        assert_eq!(q.clauses.len(), p.clauses.len());
        assert!(text.contains("filter(nont(A,B,C),[static,dynamic,dynamic])."));
    }

    #[test]
    fn nested_and_unknown_annotations() {
        let p = parse_annotated("ann_clause(1,p(X),(rescall(print(X)),hide_nf(unfold(q(X))))).")
            .unwrap();
        assert_eq!(
            p.clauses[0].body,
            AnnBody::Conj(
                bx(AnnBody::Rescall(Term::app("print", vec![Term::var(0)]))),
                bx(AnnBody::HideNf(bx(AnnBody::Unfold(Term::app(
                    "q",
                    vec![Term::var(0)]
                )))))
            )
        );
        assert!(matches!(
            parse_annotated("ann_clause(1,p(X),frobnicate(q(X)))."),
            Err(AnnotationError::UnknownAnnotation { .. })
        ));
        assert!(matches!(
            parse_annotated("filter(p(X),[static,dynamic])."),
            Err(AnnotationError::FilterArity { .. })
        ));
        assert_eq!(parse_annotated("").unwrap(), AnnotatedProgram::default());
    }

    #[test]
    fn type_declarations_are_read() {
        let p = parse_annotated(
            ":- type arg1 ---> [] ; [list(dynamic)|list(dynamic)].\nfilter(t(A),[type(arg1)]).",
        )
        .unwrap();
        assert!(p.types.get(Atom::new("arg1")).is_some());
        let again = parse_annotated(&p.render()).unwrap();
        assert_eq!(again.types, p.types);
    }
}
