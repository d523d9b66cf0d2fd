//! Helpers for building residual code, shared with the generating-extension
//! runtime so that both specialisers emit identical terms.

use std::collections::HashMap;

use crate::term::{atoms, conj_list, normalise_body, Term, Var};

/// Distinct variables of `t` in textual order, as terms.
pub fn varlist(t: &Term) -> Vec<Term> {
    t.vars().into_iter().map(Term::Var).collect()
}

/// Turns the collected solutions of a hidden goal into one residual goal.
///
/// Each solution is a pair of the goal's residual code and the values the
/// variables `vars` had when it was found. Solutions must be copies that
/// share no variables with `vars`. Within a solution, the first variable
/// value standing for `vars[i]` is renamed to `vars[i]`; every other value
/// becomes an explicit equality in front of the code. No solutions give
/// `fail`.
pub fn make_disjunction(solutions: &[(Term, Vec<Term>)], vars: &[Term]) -> Term {
    let disjuncts: Vec<Term> = solutions
        .iter()
        .map(|(code, values)| disjunct(code, values, vars))
        .collect();
    disjuncts
        .into_iter()
        .rev()
        .reduce(|rest, d| Term::pair(atoms::SEMI, d, rest))
        .unwrap_or_else(Term::fail)
}

fn disjunct(code: &Term, values: &[Term], vars: &[Term]) -> Term {
    let mut renaming: HashMap<Var, Term> = HashMap::new();
    for (value, var) in values.iter().zip(vars) {
        if let Term::Var(w) = value {
            renaming.entry(*w).or_insert_with(|| var.clone());
        }
    }
    let rename = |t: &Term| t.map_vars(&mut |v| renaming.get(&v).cloned().unwrap_or(Term::Var(v)));
    let mut goals = Vec::new();
    for (value, var) in values.iter().zip(vars) {
        let value = rename(value);
        if &value != var {
            goals.push(Term::pair(atoms::EQ, var.clone(), value));
        }
    }
    goals.push(rename(code));
    normalise_body(&conj_list(goals))
}
