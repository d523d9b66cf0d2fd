use std::fmt;

use super::parse::{parse_terms, ParseError};
use super::{atoms, Atom, Term};

/// Predicate identity: name and arity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PredKey {
    pub name: Atom,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: &str, arity: usize) -> PredKey {
        PredKey {
            name: Atom::new(name),
            arity,
        }
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// A program clause `head :- body`. Facts have body `true`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Clause {
    pub head: Term,
    pub body: Term,
}

impl Clause {
    pub fn new(head: Term, body: Term) -> Clause {
        Clause { head, body }
    }

    pub fn fact(head: Term) -> Clause {
        Clause {
            head,
            body: Term::truth(),
        }
    }

    pub fn pred(&self) -> PredKey {
        self.head.pred_key().expect("clause head is callable")
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_atom(atoms::TRUE)
    }

    /// The clause as a single term, `:-(H, B)` or just `H` for facts.
    pub fn to_term(&self) -> Term {
        if self.is_fact() {
            self.head.clone()
        } else {
            Term::pair(atoms::NECK, self.head.clone(), self.body.clone())
        }
    }

    /// Interprets a read term as a clause. Fails on directives and on heads
    /// that are variables or numbers.
    pub fn from_term(t: &Term) -> Result<Clause, String> {
        let (head, body) = if t.is_functor(atoms::NECK, 2) {
            (t.arg(0).clone(), t.arg(1).clone())
        } else {
            (t.clone(), Term::truth())
        };
        if !head.is_callable() {
            return Err(format!(
                "clause head must be an atom or compound term, found {head}"
            ));
        }
        Ok(Clause { head, body })
    }

    /// Largest variable number used in the clause.
    pub fn max_var(&self) -> Option<u32> {
        self.head.max_var().max(self.body.max_var())
    }
}

/// An ordered list of clauses. Clause order is significant and preserved.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Program {
    pub clauses: Vec<Clause>,
    /// `:- Goal` items met while reading; the engine ignores them.
    pub directives: Vec<Term>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Program {
        Program {
            clauses,
            directives: Vec::new(),
        }
    }

    /// Predicates defined by the program, in order of first clause.
    pub fn predicates(&self) -> Vec<PredKey> {
        let mut out: Vec<PredKey> = Vec::new();
        for c in &self.clauses {
            let k = c.pred();
            if !out.contains(&k) {
                out.push(k);
            }
        }
        out
    }

    pub fn clauses_for(&self, key: PredKey) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(move |c| c.pred() == key)
    }

    pub fn defines(&self, key: PredKey) -> bool {
        self.clauses.iter().any(|c| c.pred() == key)
    }

    pub fn extend(&mut self, other: &Program) {
        self.clauses.extend(other.clauses.iter().cloned());
    }
}

/// Parses a plain program. Directives are recorded, not executed.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut prog = Program::default();
    for rt in parse_terms(src)? {
        if rt.term.is_functor(atoms::NECK, 1) || rt.term.is_functor(atoms::QUERY, 1) {
            prog.directives.push(rt.term.arg(0).clone());
            continue;
        }
        let clause = Clause::from_term(&rt.term).map_err(|message| ParseError {
            line: rt.line,
            col: 1,
            message,
        })?;
        prog.clauses.push(clause);
    }
    Ok(prog)
}

/// `(a, b)` with `true` operands dropped.
pub fn conj(a: Term, b: Term) -> Term {
    if a.is_atom(atoms::TRUE) {
        b
    } else if b.is_atom(atoms::TRUE) {
        a
    } else {
        Term::pair(atoms::COMMA, a, b)
    }
}

/// Right-associated conjunction of `goals`; `true` when empty.
pub fn conj_list(goals: Vec<Term>) -> Term {
    goals.into_iter().rev().fold(Term::truth(), |acc, g| {
        if acc.is_atom(atoms::TRUE) {
            g
        } else {
            Term::pair(atoms::COMMA, g, acc)
        }
    })
}

pub fn disj(a: Term, b: Term) -> Term {
    Term::pair(atoms::SEMI, a, b)
}

/// Conjuncts of a body, flattening nested conjunctions left to right.
pub fn body_goals(body: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    let mut stack = vec![body];
    while let Some(g) = stack.pop() {
        if g.is_functor(atoms::COMMA, 2) {
            stack.push(g.arg(1));
            stack.push(g.arg(0));
        } else {
            out.push(g.clone());
        }
    }
    out
}

/// Normal form shared by residual code and generating extensions.
///
/// Conjunctions are flattened and right-associated with `true` conjuncts
/// removed; `call(G)` with a callable `G` becomes `G`; `not/1` becomes `\+`.
/// Disjunctions, conditionals and negations are normalised inside.
pub fn normalise_body(body: &Term) -> Term {
    let mut parts = Vec::new();
    for g in body_goals(body) {
        let g = normalise_goal(&g);
        if g.is_functor(atoms::COMMA, 2) {
            parts.extend(body_goals(&g));
        } else if !g.is_atom(atoms::TRUE) {
            parts.push(g);
        }
    }
    conj_list(parts)
}

fn normalise_goal(g: &Term) -> Term {
    match g {
        Term::Compound(c) => match (c.functor, c.args.len()) {
            (f, 2) if f == atoms::SEMI => {
                disj(normalise_goal(&c.args[0]), normalise_body(&c.args[1]))
            }
            (f, 2) if f == atoms::ARROW => Term::pair(
                atoms::ARROW,
                normalise_body(&c.args[0]),
                normalise_body(&c.args[1]),
            ),
            (f, 1) if f == atoms::NOT_PROVABLE || f == atoms::NOT => {
                Term::compound(atoms::NOT_PROVABLE, vec![normalise_body(&c.args[0])])
            }
            (f, 1) if f == atoms::CALL && c.args[0].is_callable() => normalise_body(&c.args[0]),
            (f, 2) if f == atoms::COMMA => normalise_body(g),
            _ => g.clone(),
        },
        _ => g.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap().term
    }

    #[test]
    fn fact_and_rule_clauses() {
        let p = parse_program("app([],L,L).\napp([H|X],Y,[H|Z]) :- app(X,Y,Z).\np.").unwrap();
        assert_eq!(p.clauses.len(), 3);
        assert!(p.clauses[0].is_fact());
        assert_eq!(p.clauses[0].head.args().len(), 3);
        assert_eq!(p.clauses[2].head, Term::atom("p"));
        assert_eq!(p.predicates().len(), 2);
    }

    #[test]
    fn variable_heads_are_rejected() {
        assert!(parse_program("X :- true.").is_err());
    }

    #[test]
    fn same_name_different_arity_is_two_predicates() {
        let p = parse_program("p(a). p(a,b).").unwrap();
        assert_eq!(p.predicates().len(), 2);
    }

    #[test]
    fn normalisation_flattens_and_drops_true() {
        let b = normalise_body(&t("((true, a), (b, true)), call(c(X)), true"));
        assert_eq!(b, t("a, b, c(X)"));
        assert_eq!(normalise_body(&t("true, true")), Term::truth());
        let n = normalise_body(&t("not((true, p))"));
        assert_eq!(n, t("\\+ p"));
    }

    #[test]
    fn normalisation_keeps_conditionals() {
        let b = normalise_body(&t("(true, a -> b, true ; c)"));
        assert_eq!(b, t("(a -> b ; c)"));
    }
}
