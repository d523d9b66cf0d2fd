//! Automatic binding-time analysis.
//!
//! The analysis works on a t-annotated program, a copy of the source in
//! which the atoms that will be memoised are replaced by `true`. Unfolding
//! with the annotation terminates exactly when plain evaluation of the
//! t-annotated program does, so the analysis repeatedly looks for a body
//! atom that cannot be shown loop safe and replaces it, until none is left.
//!
//! Calls are abstracted to one boolean per argument, telling whether its
//! size under a chosen [`Norm`] is fixed. The final callset gives the
//! division: rigid arguments get the norm's rigid type and the others are
//! `dynamic`.

mod callset;
mod loops;
mod norm;

use std::collections::BTreeSet;

use indexmap::IndexSet;
use thiserror::Error;

use crate::annotations::{is_side_effect, AnnBody, AnnClause, AnnotatedProgram};
use crate::binding_types::{BindingType, Division, TypeError, TypeSystem};
use crate::engine::is_core_builtin;
use crate::term::{body_goals, conj_list, render_term, Clause, PredKey, Program, Term};

pub use callset::{abstract_callset, abstract_goal, AbstractCall, AbstractCallset};
pub use loops::{CallEdge, LoopAnalysis, SizeGraph, COMPOSITION_ROUNDS};
pub use norm::{Linear, Norm, UnknownNorm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BtaError {
    #[error("goal {0} is not a callable term")]
    NotCallable(String),
    #[error("goal predicate {0} has no clauses")]
    Undefined(PredKey),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// A program with some body atoms marked for replacement by `true`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TAnnotation {
    /// The source program, unchanged.
    pub program: Program,
    /// Replaced atoms as (clause index, body position), both from 0.
    pub replaced: BTreeSet<(usize, usize)>,
    defined: BTreeSet<PredKey>,
}

impl TAnnotation {
    /// The t-annotation that replaces nothing.
    pub fn new(program: Program) -> TAnnotation {
        let defined = program.clauses.iter().map(Clause::pred).collect();
        TAnnotation {
            program,
            replaced: BTreeSet::new(),
            defined,
        }
    }

    pub fn is_replaced(&self, clause: usize, position: usize) -> bool {
        self.replaced.contains(&(clause, position))
    }

    /// Builtins are core builtins the program does not redefine.
    pub fn is_builtin(&self, pred: PredKey) -> bool {
        !self.defined.contains(&pred) && is_core_builtin(pred)
    }

    /// The program with replaced atoms turned into `true`.
    pub fn t_program(&self) -> Program {
        let clauses = self
            .program
            .clauses
            .iter()
            .enumerate()
            .map(|(ci, c)| {
                let goals = body_goals(&c.body)
                    .into_iter()
                    .enumerate()
                    .map(|(j, g)| {
                        if self.is_replaced(ci, j) {
                            Term::truth()
                        } else {
                            g
                        }
                    })
                    .collect();
                Clause::new(c.head.clone(), conj_list(goals))
            })
            .collect();
        Program::new(clauses)
    }

    /// The replaced atoms themselves, in program order.
    pub fn replaced_atoms(&self) -> Vec<Term> {
        self.replaced
            .iter()
            .map(|&(ci, j)| body_goals(&self.program.clauses[ci].body)[j].clone())
            .collect()
    }
}

/// What [`bta`] computes.
#[derive(Clone, Debug)]
pub struct BtaResult {
    pub annotation: TAnnotation,
    pub callset: AbstractCallset,
    /// Termination analyses run, including the final successful one.
    pub rounds: usize,
    /// Builtin atoms with only rigid arguments, as (clause, position).
    pub rigid_builtins: BTreeSet<(usize, usize)>,
    pub norm: Norm,
    pub goal: Term,
}

/// The first atom, by clause and then by position, that is not provably
/// loop safe.
pub fn first_unsafe(t: &TAnnotation, s: &AbstractCallset, norm: Norm) -> Option<(usize, usize)> {
    let la = LoopAnalysis::new(t, s, norm);
    la.edges
        .iter()
        .map(|e| (e.clause, e.position))
        .find(|&(c, j)| !la.loop_safe(c, j))
}

/// Replaces non-loop-safe atoms by `true`, one per round, until every
/// remaining atom is loop safe.
pub fn bta(p: &Program, goal: &Term, norm: Norm) -> Result<BtaResult, BtaError> {
    let g = abstract_goal(goal, norm).ok_or_else(|| BtaError::NotCallable(render_term(goal)))?;
    let mut t = TAnnotation::new(p.clone());
    if !t.defined.contains(&g.pred) {
        return Err(BtaError::Undefined(g.pred));
    }
    let mut s = abstract_callset(&t, goal, norm);
    let mut rounds = 0;
    loop {
        rounds += 1;
        match first_unsafe(&t, &s, norm) {
            Some(atom) => {
                t.replaced.insert(atom);
                s = s.lub(&abstract_callset(&t, goal, norm));
            }
            None => break,
        }
    }
    // Builtins are judged against the final callset, which is what the
    // division lets through memoisation.
    let analysis = callset::analyse(&t, &s, norm);
    Ok(BtaResult {
        annotation: t,
        callset: analysis.callset,
        rounds,
        rigid_builtins: analysis.rigid_builtins,
        norm,
        goal: goal.clone(),
    })
}

/// Rigid arguments get the norm's rigid type, the others `dynamic`.
pub fn division_from_callset(s: &AbstractCallset, norm: Norm) -> Division {
    let mut d = Division::new();
    for c in s.calls() {
        let types = c
            .rigid
            .iter()
            .map(|&r| {
                if r {
                    norm.rigid_type()
                } else {
                    BindingType::Dynamic
                }
            })
            .collect();
        d.insert(c.pred, types).expect("norm types are well formed");
    }
    d
}

impl BtaResult {
    pub fn division(&self) -> Division {
        division_from_callset(&self.callset, self.norm)
    }

    /// The annotated program: replaced atoms are memoised, other user atoms
    /// unfolded, and builtins evaluated only when the norm makes rigid
    /// arguments ground and all of them are rigid.
    pub fn annotated_program(&self) -> AnnotatedProgram {
        to_annotated_program(self, &self.division())
    }
}

/// Builds the annotated program for a BTA result and a division.
pub fn to_annotated_program(r: &BtaResult, d: &Division) -> AnnotatedProgram {
    let t = &r.annotation;
    let mut residual: IndexSet<PredKey> = IndexSet::new();
    if let Some(k) = r.goal.pred_key() {
        residual.insert(k);
    }
    let mut clauses = Vec::new();
    for (ci, c) in t.program.clauses.iter().enumerate() {
        let mut parts = Vec::new();
        for (j, g) in body_goals(&c.body).into_iter().enumerate() {
            let ann = match g.pred_key() {
                None => AnnBody::Rescall(g),
                Some(_) if g.is_atom(crate::term::atoms::TRUE) => AnnBody::True,
                Some(q) if t.is_builtin(q) => {
                    if r.norm.rigid_is_ground()
                        && r.rigid_builtins.contains(&(ci, j))
                        && !is_side_effect(&g)
                    {
                        AnnBody::Call(g)
                    } else {
                        AnnBody::Rescall(g)
                    }
                }
                Some(q) if t.is_replaced(ci, j) => {
                    residual.insert(q);
                    AnnBody::Memo(g)
                }
                Some(_) => AnnBody::Unfold(g),
            };
            parts.push(ann);
        }
        clauses.push(AnnClause {
            id: ci as i64 + 1,
            head: c.head.clone(),
            body: AnnBody::conj_list(parts),
        });
    }
    AnnotatedProgram {
        clauses,
        division: d.clone(),
        residual,
        types: TypeSystem::new(),
        static_consult: Vec::new(),
    }
}

#[cfg(test)]
mod tests;
