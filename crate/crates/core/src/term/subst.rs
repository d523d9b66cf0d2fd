use std::collections::{BTreeMap, HashMap, HashSet};

use super::{Term, Var};

/// A finite map from variables to terms, kept idempotent: no bound variable
/// occurs in any range term.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    /// Builds a substitution from bindings that are already idempotent.
    /// Identity bindings are dropped.
    pub fn from_bindings(pairs: impl IntoIterator<Item = (Var, Term)>) -> Substitution {
        Substitution {
            map: pairs
                .into_iter()
                .filter(|(v, t)| t != &Term::Var(*v))
                .collect(),
        }
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.map.get(&v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    /// Applies the substitution. Because it is idempotent one pass suffices.
    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        t.map_vars(&mut |v| self.map.get(&v).cloned().unwrap_or(Term::Var(v)))
    }

    /// `self` followed by `other`: applying the result equals applying
    /// `self` and then `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut map: BTreeMap<Var, Term> = self
            .map
            .iter()
            .map(|(v, t)| (*v, other.apply(t)))
            .filter(|(v, t)| t != &Term::Var(*v))
            .collect();
        for (v, t) in &other.map {
            map.entry(*v).or_insert_with(|| t.clone());
        }
        Substitution { map }
    }

    /// Builds an idempotent substitution from triangular bindings.
    fn from_triangular(bindings: &HashMap<Var, Term>) -> Substitution {
        fn resolve(t: &Term, b: &HashMap<Var, Term>) -> Term {
            match t {
                Term::Var(v) => match b.get(v) {
                    Some(u) => resolve(u, b),
                    None => t.clone(),
                },
                Term::Compound(c) => {
                    Term::compound(c.functor, c.args.iter().map(|a| resolve(a, b)).collect())
                }
                _ => t.clone(),
            }
        }
        let map = bindings
            .keys()
            .map(|v| (*v, resolve(&Term::Var(*v), bindings)))
            .collect();
        Substitution { map }
    }
}

fn walk<'a>(t: &'a Term, b: &'a HashMap<Var, Term>) -> &'a Term {
    let mut cur = t;
    while let Term::Var(v) = cur {
        match b.get(v) {
            Some(next) => cur = next,
            None => break,
        }
    }
    cur
}

fn occurs_in(v: Var, t: &Term, b: &HashMap<Var, Term>) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match t {
            Term::Var(w) => {
                if *w == v {
                    return true;
                }
                if seen.insert(*w) {
                    if let Some(next) = b.get(w) {
                        stack.push(next);
                    }
                }
            }
            Term::Compound(c) => stack.extend(c.args.iter()),
            _ => {}
        }
    }
    false
}

/// Most general unifier of `a` and `b`, or `None` if they do not unify.
/// With `occurs_check` set, bindings that would create cyclic terms fail.
pub fn unify(a: &Term, b: &Term, occurs_check: bool) -> Option<Substitution> {
    let mut bindings: HashMap<Var, Term> = HashMap::new();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = stack.pop() {
        let x = walk(&x, &bindings).clone();
        let y = walk(&y, &bindings).clone();
        match (&x, &y) {
            (Term::Var(v), Term::Var(w)) if v == w => {}
            (Term::Var(v), other) | (other, Term::Var(v)) => {
                if occurs_check && occurs_in(*v, other, &bindings) {
                    return None;
                }
                bindings.insert(*v, other.clone());
            }
            (Term::Atom(p), Term::Atom(q)) if p == q => {}
            (Term::Int(p), Term::Int(q)) if p == q => {}
            (Term::Compound(p), Term::Compound(q)) => {
                if p.functor != q.functor || p.args.len() != q.args.len() {
                    return None;
                }
                for (s, t) in p.args.iter().zip(q.args.iter()) {
                    stack.push((s.clone(), t.clone()));
                }
            }
            _ => return None,
        }
    }
    if !occurs_check {
        // Without the occurs check a cyclic binding cannot be made idempotent;
        // such a pair has no finite unifier, so report failure.
        for (v, t) in &bindings {
            if occurs_in(*v, t, &bindings) {
                return None;
            }
        }
    }
    Some(Substitution::from_triangular(&bindings))
}

/// One-way matching: a substitution θ over the variables of `pattern` with
/// `pattern θ == term`. Variables of `term` are treated as constants.
pub fn match_term(pattern: &Term, term: &Term) -> Option<Substitution> {
    let mut map: BTreeMap<Var, Term> = BTreeMap::new();
    let mut stack = vec![(pattern, term)];
    while let Some((p, t)) = stack.pop() {
        match (p, t) {
            (Term::Var(v), _) => match map.get(v) {
                Some(bound) => {
                    if bound != t {
                        return None;
                    }
                }
                None => {
                    map.insert(*v, t.clone());
                }
            },
            (Term::Atom(a), Term::Atom(b)) if a == b => {}
            (Term::Int(a), Term::Int(b)) if a == b => {}
            (Term::Compound(a), Term::Compound(b)) => {
                if a.functor != b.functor || a.args.len() != b.args.len() {
                    return None;
                }
                stack.extend(a.args.iter().zip(b.args.iter()));
            }
            _ => return None,
        }
    }
    Some(Substitution { map })
}

/// Renumbers variables `0, 1, ..` in order of first occurrence.
pub fn canonical(t: &Term) -> Term {
    let mut map: HashMap<Var, u32> = HashMap::new();
    t.map_vars(&mut |v| {
        let n = map.len() as u32;
        Term::Var(Var(*map.entry(v).or_insert(n)))
    })
}

/// True iff each term is an instance of the other.
pub fn is_variant(a: &Term, b: &Term) -> bool {
    canonical(a) == canonical(b)
}

/// A variant of `t` sharing no variable with `reserved`.
pub fn rename_apart(t: &Term, reserved: &HashSet<Var>) -> Term {
    let base = reserved
        .iter()
        .map(|v| v.0)
        .chain(t.max_var())
        .max()
        .map_or(0, |m| m + 1);
    let mut map: HashMap<Var, u32> = HashMap::new();
    t.map_vars(&mut |v| {
        let n = base + map.len() as u32;
        Term::Var(Var(*map.entry(v).or_insert(n)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, render_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap().term
    }

    /// Parses two terms so that equal names denote the same variable.
    fn pair(a: &str, b: &str) -> (Term, Term) {
        let both = t(&format!("f({a}, {b})"));
        (both.arg(0).clone(), both.arg(1).clone())
    }

    #[test]
    fn unify_list_cell() {
        let (a, b) = pair("t(a,T,V)", "t(X,[X|R],R)");
        let s = unify(&a, &b, false).unwrap();
        assert_eq!(s.apply(&a), s.apply(&b));
        let both = t("f(t(a,T,V), t(X,[X|R],R))");
        assert_eq!(render_term(&s.apply(&both)), "f(t(a,[a|A],A),t(a,[a|A],A))");
    }

    #[test]
    fn occurs_check() {
        let (a, b) = pair("X", "f(X)");
        assert!(unify(&a, &b, true).is_none());
        assert!(unify(&a, &b, false).is_none());
    }

    #[test]
    fn aliasing() {
        let (a, b) = pair("p(X)", "p(Y)");
        let s = unify(&a, &b, false).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.apply(&a), s.apply(&b));
    }

    #[test]
    fn variants() {
        assert!(is_variant(&t("p(X,Y)"), &t("p(A,B)")));
        assert!(!is_variant(&t("p(X,X)"), &t("p(A,B)")));
        assert!(is_variant(&t("nont(c,V,R)"), &t("nont(c,T,R)")));
    }

    #[test]
    fn rename_apart_preserves_sharing() {
        let x = t("q(X,X)");
        let reserved: HashSet<Var> = x.vars().into_iter().collect();
        let r = rename_apart(&x, &reserved);
        assert!(is_variant(&x, &r));
        assert!(r.vars().iter().all(|v| !reserved.contains(v)));
        assert_eq!(rename_apart(&t("p(a)"), &HashSet::new()), t("p(a)"));
    }

    #[test]
    fn matching_is_one_way() {
        let (p, q) = pair("f(X, g(Y))", "f(a, g(Z))");
        assert!(match_term(&p, &q).is_some());
        assert!(match_term(&q, &p).is_none());
        let (p, q) = pair("f(X, X)", "f(a, b)");
        assert!(match_term(&p, &q).is_none());
    }

    #[test]
    fn compose_applies_in_sequence() {
        let all = t("f(f(X), f(g(Y)), Y, h)");
        let s1 = unify(all.arg(0), all.arg(1), false).unwrap();
        let s2 = unify(all.arg(2), all.arg(3), false).unwrap();
        let s = s1.compose(&s2);
        assert_eq!(s.apply(all.arg(0)), s2.apply(&s1.apply(all.arg(0))));
        assert_eq!(render_term(&s.apply(all.arg(0))), "f(g(h))");
    }
}
