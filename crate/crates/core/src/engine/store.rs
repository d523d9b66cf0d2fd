//! Mutable binding store with a trail, used by the resolution engine.

use std::collections::HashMap;

use crate::term::{Term, Var};

/// Position in the store that can be restored on backtracking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark {
    trail: usize,
    vars: usize,
}

#[derive(Default, Debug)]
pub struct Store {
    vals: Vec<Option<Term>>,
    trail: Vec<u32>,
    pub occurs_check: bool,
}

impl Store {
    pub fn new(occurs_check: bool) -> Store {
        Store {
            vals: Vec::new(),
            trail: Vec::new(),
            occurs_check,
        }
    }

    pub fn clear(&mut self) {
        self.vals.clear();
        self.trail.clear();
    }

    pub fn var_count(&self) -> usize {
        self.vals.len()
    }

    pub fn fresh(&mut self) -> Term {
        let v = self.vals.len() as u32;
        self.vals.push(None);
        Term::Var(Var(v))
    }

    /// Allocates `n` consecutive unbound variables and returns the first index.
    pub fn alloc(&mut self, n: u32) -> u32 {
        let base = self.vals.len() as u32;
        self.vals.resize(self.vals.len() + n as usize, None);
        base
    }

    /// Makes sure every variable number in `t` exists in the store.
    pub fn reserve_for(&mut self, t: &Term) {
        if let Some(m) = t.max_var() {
            if m as usize >= self.vals.len() {
                self.vals.resize(m as usize + 1, None);
            }
        }
    }

    pub fn mark(&self) -> Mark {
        Mark {
            trail: self.trail.len(),
            vars: self.vals.len(),
        }
    }

    /// Undoes bindings made since `m` and forgets variables allocated since.
    pub fn undo(&mut self, m: Mark) {
        while self.trail.len() > m.trail {
            let v = self.trail.pop().unwrap();
            if let Some(slot) = self.vals.get_mut(v as usize) {
                *slot = None;
            }
        }
        self.vals.truncate(m.vars);
    }

    /// Undoes bindings made since `m` but keeps the variables.
    pub fn undo_bindings(&mut self, m: Mark) {
        while self.trail.len() > m.trail {
            let v = self.trail.pop().unwrap();
            self.vals[v as usize] = None;
        }
    }

    pub fn deref(&self, t: &Term) -> Term {
        let mut cur = t;
        loop {
            match cur {
                Term::Var(v) => match self.vals.get(v.0 as usize) {
                    Some(Some(next)) => cur = next,
                    _ => return cur.clone(),
                },
                _ => return cur.clone(),
            }
        }
    }

    fn bind(&mut self, v: Var, t: Term) {
        self.vals[v.0 as usize] = Some(t);
        self.trail.push(v.0);
    }

    fn occurs(&self, v: Var, t: &Term) -> bool {
        let mut stack = vec![t.clone()];
        while let Some(t) = stack.pop() {
            match self.deref(&t) {
                Term::Var(w) => {
                    if w == v {
                        return true;
                    }
                }
                Term::Compound(c) => stack.extend(c.args.iter().cloned()),
                _ => {}
            }
        }
        false
    }

    fn bind_var(&mut self, v: Var, t: Term) -> bool {
        if self.occurs_check && !t.is_var() && self.occurs(v, &t) {
            return false;
        }
        self.bind(v, t);
        true
    }

    /// Unifies two terms. On failure some bindings may remain; callers undo
    /// to a mark taken beforehand.
    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((x, y)) = stack.pop() {
            let x = self.deref(&x);
            let y = self.deref(&y);
            match (x, y) {
                (Term::Var(v), Term::Var(w)) => {
                    if v != w {
                        // Bind the younger variable to the older one.
                        if v.0 > w.0 {
                            self.bind(v, Term::Var(w));
                        } else {
                            self.bind(w, Term::Var(v));
                        }
                    }
                }
                (Term::Var(v), t) | (t, Term::Var(v)) => {
                    if !self.bind_var(v, t) {
                        return false;
                    }
                }
                (Term::Atom(p), Term::Atom(q)) => {
                    if p != q {
                        return false;
                    }
                }
                (Term::Int(p), Term::Int(q)) => {
                    if p != q {
                        return false;
                    }
                }
                (Term::Compound(p), Term::Compound(q)) => {
                    if std::sync::Arc::ptr_eq(&p, &q) {
                        continue;
                    }
                    if p.functor != q.functor || p.args.len() != q.args.len() {
                        return false;
                    }
                    for (s, t) in p.args.iter().zip(q.args.iter()).rev() {
                        stack.push((s.clone(), t.clone()));
                    }
                }
                _ => return false,
            }
        }
        true
    }

    /// Unifies a clause-local `pattern`, whose variable `i` stands for store
    /// variable `base + i`, against `term` without first copying the pattern.
    pub fn unify_offset(&mut self, pattern: &Term, base: u32, term: &Term) -> bool {
        match pattern {
            Term::Var(v) => self.unify(&Term::Var(Var(v.0 + base)), term),
            Term::Atom(a) => match self.deref(term) {
                Term::Atom(b) => *a == b,
                Term::Var(w) => {
                    self.bind(w, pattern.clone());
                    true
                }
                _ => false,
            },
            Term::Int(n) => match self.deref(term) {
                Term::Int(m) => *n == m,
                Term::Var(w) => {
                    self.bind(w, pattern.clone());
                    true
                }
                _ => false,
            },
            Term::Compound(p) => match self.deref(term) {
                Term::Compound(q) => {
                    if p.functor != q.functor || p.args.len() != q.args.len() {
                        return false;
                    }
                    p.args
                        .iter()
                        .zip(q.args.iter())
                        .all(|(s, t)| self.unify_offset(s, base, t))
                }
                Term::Var(w) => {
                    let built = pattern.offset_vars(base);
                    self.bind_var(w, built)
                }
                _ => false,
            },
        }
    }

    /// Applies all current bindings.
    pub fn resolve(&self, t: &Term) -> Term {
        match self.deref(t) {
            Term::Compound(c) => {
                if c.functor == crate::term::atoms::DOT && c.args.len() == 2 {
                    return self.resolve_list(&Term::Compound(c));
                }
                let args: Vec<Term> = c.args.iter().map(|a| self.resolve(a)).collect();
                Term::compound(c.functor, args)
            }
            other => other,
        }
    }

    /// Resolves list spines iteratively so long lists do not deepen the stack.
    fn resolve_list(&self, t: &Term) -> Term {
        let mut items = Vec::new();
        let mut cur = t.clone();
        loop {
            match self.deref(&cur) {
                Term::Compound(c) if c.functor == crate::term::atoms::DOT && c.args.len() == 2 => {
                    items.push(self.resolve(&c.args[0]));
                    cur = c.args[1].clone();
                }
                other => {
                    let tail = match other {
                        Term::Compound(_) => self.resolve(&other),
                        o => o,
                    };
                    return Term::list_with_tail(items, tail);
                }
            }
        }
    }

    /// Copies a resolved term out of the store with variables renumbered
    /// `0..n`; returns the copy and `n`.
    pub fn export(&self, t: &Term) -> (Term, u32) {
        let r = self.resolve(t);
        let mut map: HashMap<Var, u32> = HashMap::new();
        let out = r.map_vars(&mut |v| {
            let n = map.len() as u32;
            Term::Var(Var(*map.entry(v).or_insert(n)))
        });
        (out, map.len() as u32)
    }

    /// Brings a standalone term with variables `0..n` into the store with
    /// fresh variables.
    pub fn import(&mut self, t: &Term, n: u32) -> Term {
        let base = self.alloc(n);
        t.offset_vars(base)
    }

    /// Structural identity of two terms under the current bindings.
    pub fn identical(&self, a: &Term, b: &Term) -> bool {
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((x, y)) = stack.pop() {
            match (self.deref(&x), self.deref(&y)) {
                (Term::Var(v), Term::Var(w)) => {
                    if v != w {
                        return false;
                    }
                }
                (Term::Atom(p), Term::Atom(q)) => {
                    if p != q {
                        return false;
                    }
                }
                (Term::Int(p), Term::Int(q)) => {
                    if p != q {
                        return false;
                    }
                }
                (Term::Compound(p), Term::Compound(q)) => {
                    if p.functor != q.functor || p.args.len() != q.args.len() {
                        return false;
                    }
                    stack.extend(p.args.iter().cloned().zip(q.args.iter().cloned()));
                }
                _ => return false,
            }
        }
        true
    }

    pub fn is_ground(&self, t: &Term) -> bool {
        let mut stack = vec![t.clone()];
        while let Some(t) = stack.pop() {
            match self.deref(&t) {
                Term::Var(_) => return false,
                Term::Compound(c) => stack.extend(c.args.iter().cloned()),
                _ => {}
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, render_term};

    #[test]
    fn unify_and_undo() {
        let mut s = Store::new(false);
        let t = parse_term("f(X, g(Y), X)").unwrap().term;
        let u = parse_term("f(a, Z, W)").unwrap().term.offset_vars(10);
        s.reserve_for(&t);
        s.reserve_for(&u);
        let m = s.mark();
        assert!(s.unify(&t, &u));
        assert_eq!(render_term(&s.resolve(&u)), "f(a,g(A),a)");
        s.undo_bindings(m);
        assert_eq!(s.resolve(&u), u);
    }

    #[test]
    fn occurs_check_flag() {
        let mut s = Store::new(true);
        let x = s.fresh();
        let fx = Term::app("f", vec![x.clone()]);
        assert!(!s.unify(&x, &fx));
    }

    #[test]
    fn offset_unification_builds_only_when_needed() {
        let mut s = Store::new(false);
        let pat = parse_term("t(X,[X|Es],Es)").unwrap().term;
        let goal = s.fresh();
        let t = s.fresh();
        let v = s.fresh();
        let call = Term::app("t", vec![Term::atom("a"), t.clone(), v.clone()]);
        let _ = goal;
        let base = s.alloc(2);
        assert!(s.unify_offset(&pat, base, &call));
        assert_eq!(
            render_term(&s.resolve(&Term::app("p", vec![t, v]))),
            "p([a|A],A)"
        );
    }

    #[test]
    fn export_import_round_trip() {
        let mut s = Store::new(false);
        let x = s.fresh();
        let t = Term::app("f", vec![x.clone(), x.clone(), Term::atom("b")]);
        let (standalone, n) = s.export(&t);
        assert_eq!(n, 1);
        let back = s.import(&standalone, n);
        assert!(crate::term::is_variant(&back, &t));
        assert_ne!(back, t);
    }
}
