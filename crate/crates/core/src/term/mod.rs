//! Terms of the object language, their concrete syntax and basic operations.

mod atom;
mod parse;
mod program;
mod render;
mod subst;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

pub use atom::{atoms, Atom};
pub use parse::{parse_term, parse_terms, ParseError, ReadTerm};
pub use program::{
    body_goals, conj, conj_list, disj, normalise_body, parse_program, Clause, PredKey, Program,
};
pub use render::{render_clause, render_clauses, render_term, render_term_with, VarNamer};
pub use subst::{canonical, is_variant, match_term, rename_apart, unify, Substitution};

/// A logic variable, identified by a number.
///
/// Numbers are meaningful only relative to a clause, a canonical term, or a
/// running engine store; they carry no name.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var(pub u32);

/// A term: variable, symbol, integer, or compound.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Atom(Atom),
    Int(i64),
    Compound(Arc<Compound>),
}

/// Functor and argument vector of a compound term. Arity is `args.len()`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Compound {
    pub functor: Atom,
    pub args: Box<[Term]>,
}

impl Term {
    pub fn var(n: u32) -> Term {
        Term::Var(Var(n))
    }

    pub fn atom(name: &str) -> Term {
        Term::Atom(Atom::new(name))
    }

    /// Builds `f(args..)`, or the bare atom when `args` is empty.
    pub fn compound(functor: Atom, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Atom(functor)
        } else {
            Term::Compound(Arc::new(Compound {
                functor,
                args: args.into_boxed_slice(),
            }))
        }
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::compound(Atom::new(name), args)
    }

    pub fn nil() -> Term {
        Term::Atom(atoms::NIL)
    }

    pub fn truth() -> Term {
        Term::Atom(atoms::TRUE)
    }

    pub fn fail() -> Term {
        Term::Atom(atoms::FAIL)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::compound(atoms::DOT, vec![head, tail])
    }

    pub fn pair(functor: Atom, a: Term, b: Term) -> Term {
        Term::compound(functor, vec![a, b])
    }

    /// Builds a list from `items` ending in `tail`.
    pub fn list_with_tail(items: impl IntoIterator<Item = Term>, tail: Term) -> Term {
        let items: Vec<Term> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::cons(item, acc))
    }

    pub fn list(items: impl IntoIterator<Item = Term>) -> Term {
        Term::list_with_tail(items, Term::nil())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<Atom> {
        match self {
            Term::Atom(a) => Some(*a),
            _ => None,
        }
    }

    pub fn is_atom(&self, a: Atom) -> bool {
        matches!(self, Term::Atom(b) if *b == a)
    }

    /// Name and arity of an atom or compound; `None` for variables and numbers.
    pub fn functor(&self) -> Option<(Atom, usize)> {
        match self {
            Term::Atom(a) => Some((*a, 0)),
            Term::Compound(c) => Some((c.functor, c.args.len())),
            _ => None,
        }
    }

    pub fn pred_key(&self) -> Option<PredKey> {
        self.functor().map(|(name, arity)| PredKey { name, arity })
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(c) => &c.args,
            _ => &[],
        }
    }

    pub fn arg(&self, i: usize) -> &Term {
        &self.args()[i]
    }

    /// True for a compound with exactly this functor and arity.
    pub fn is_functor(&self, name: Atom, arity: usize) -> bool {
        match self {
            Term::Compound(c) => c.functor == name && c.args.len() == arity,
            Term::Atom(a) => arity == 0 && *a == name,
            _ => false,
        }
    }

    pub fn is_callable(&self) -> bool {
        matches!(self, Term::Atom(_) | Term::Compound(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) | Term::Int(_) => true,
            Term::Compound(c) => c.args.iter().all(Term::is_ground),
        }
    }

    /// Splits a proper or partial list into its elements and final tail.
    pub fn list_parts(&self) -> (Vec<&Term>, &Term) {
        let mut items = Vec::new();
        let mut cur = self;
        while let Term::Compound(c) = cur {
            if c.functor == atoms::DOT && c.args.len() == 2 {
                items.push(&c.args[0]);
                cur = &c.args[1];
            } else {
                break;
            }
        }
        (items, cur)
    }

    /// Elements of a proper list, or `None` if `self` is not one.
    pub fn as_list(&self) -> Option<Vec<&Term>> {
        let (items, tail) = self.list_parts();
        if tail.is_atom(atoms::NIL) {
            Some(items)
        } else {
            None
        }
    }

    /// Distinct variables in depth-first, left-to-right order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.collect_vars(&mut seen, &mut out);
        out
    }

    pub(crate) fn collect_vars(&self, seen: &mut HashSet<Var>, out: &mut Vec<Var>) {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(v) => {
                    if seen.insert(*v) {
                        out.push(*v);
                    }
                }
                Term::Compound(c) => stack.extend(c.args.iter().rev()),
                _ => {}
            }
        }
    }

    pub fn occurs(&self, v: Var) -> bool {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(w) if *w == v => return true,
                Term::Compound(c) => stack.extend(c.args.iter()),
                _ => {}
            }
        }
        false
    }

    /// Largest variable number in the term, if any.
    pub fn max_var(&self) -> Option<u32> {
        let mut best = None;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Var(v) => best = best.max(Some(v.0)),
                Term::Compound(c) => stack.extend(c.args.iter()),
                _ => {}
            }
        }
        best
    }

    /// Rebuilds the term, replacing every variable by `f(var)`.
    ///
    /// List spines are walked iteratively, so long lists are safe.
    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(*v),
            Term::Compound(c) if c.functor == atoms::DOT && c.args.len() == 2 => {
                let mut items = Vec::new();
                let mut cur = self;
                while let Term::Compound(k) = cur {
                    if k.functor != atoms::DOT || k.args.len() != 2 {
                        break;
                    }
                    items.push(k.args[0].map_vars(f));
                    cur = &k.args[1];
                }
                let tail = cur.map_vars(f);
                Term::list_with_tail(items, tail)
            }
            Term::Compound(c) => {
                let args: Vec<Term> = c.args.iter().map(|a| a.map_vars(f)).collect();
                Term::compound(c.functor, args)
            }
            other => other.clone(),
        }
    }

    /// Shifts every variable number by `offset`.
    pub fn offset_vars(&self, offset: u32) -> Term {
        if offset == 0 {
            return self.clone();
        }
        self.map_vars(&mut |v| Term::Var(Var(v.0 + offset)))
    }

    /// Number of nodes (symbols, numbers, variables and compound cells).
    pub fn size(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            n += 1;
            if let Term::Compound(c) = t {
                stack.extend(c.args.iter());
            }
        }
        n
    }
}

// Dropping a long list would otherwise recurse once per cell.
impl Drop for Compound {
    fn drop(&mut self) {
        if !self.args.iter().any(|a| matches!(a, Term::Compound(_))) {
            return;
        }
        let mut stack: Vec<Term> = std::mem::take(&mut self.args).into_vec();
        while let Some(t) = stack.pop() {
            if let Term::Compound(arc) = t {
                if let Ok(mut c) = Arc::try_unwrap(arc) {
                    stack.extend(std::mem::take(&mut c.args).into_vec());
                }
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render_debug(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render_debug(self))
    }
}

impl From<Atom> for Term {
    fn from(a: Atom) -> Term {
        Term::Atom(a)
    }
}

impl From<i64> for Term {
    fn from(n: i64) -> Term {
        Term::Int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compound_with_no_args_is_an_atom() {
        assert_eq!(Term::app("p", vec![]), Term::atom("p"));
    }

    #[test]
    fn list_parts_of_partial_list() {
        let t = Term::list_with_tail(vec![Term::atom("a"), Term::atom("b")], Term::var(3));
        let (items, tail) = t.list_parts();
        assert_eq!(items.len(), 2);
        assert_eq!(tail, &Term::var(3));
        assert!(t.as_list().is_none());
    }

    #[test]
    fn vars_in_first_occurrence_order() {
        let t = Term::app(
            "f",
            vec![
                Term::var(5),
                Term::app("g", vec![Term::var(2), Term::var(5)]),
            ],
        );
        assert_eq!(t.vars(), vec![Var(5), Var(2)]);
        assert_eq!(t.max_var(), Some(5));
    }
}
