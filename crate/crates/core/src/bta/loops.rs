//! Loop safety by size-change graphs.
//!
//! Each unfoldable body atom gives a graph from the argument positions of
//! the clause head to those of the atom. An arc `a -> b` says the size of
//! argument `b` of the call is at most that of argument `a` of the head; a
//! strict arc says it is smaller. Only positions that are rigid in the
//! callset carry arcs, since only their sizes are fixed while unfolding.
//!
//! An atom is loop safe when no cycle back to the head predicate passes
//! through it, or when every idempotent graph of such cycles has a strict
//! arc from a position to itself. Cycles are found by composing graphs a
//! bounded number of rounds; if the set of graphs has not settled by then the
//! atom is reported unsafe.

use std::collections::{BTreeMap, BTreeSet};

use super::{AbstractCallset, Norm, TAnnotation};
use crate::term::{body_goals, PredKey};

/// Rounds of pairwise composition before giving up.
pub const COMPOSITION_ROUNDS: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SizeGraph {
    pub from: PredKey,
    pub to: PredKey,
    /// `(a, b) -> strict`.
    pub arcs: BTreeMap<(usize, usize), bool>,
}

impl SizeGraph {
    pub fn compose(&self, next: &SizeGraph) -> SizeGraph {
        debug_assert_eq!(self.to, next.from);
        let mut arcs = BTreeMap::new();
        for (&(a, b), &s1) in &self.arcs {
            for (&(b2, c), &s2) in &next.arcs {
                if b == b2 {
                    let e = arcs.entry((a, c)).or_insert(false);
                    *e |= s1 || s2;
                }
            }
        }
        SizeGraph {
            from: self.from,
            to: next.to,
            arcs,
        }
    }

    fn has_strict_self_arc(&self) -> bool {
        self.arcs.iter().any(|(&(a, b), &s)| a == b && s)
    }
}

/// A call edge: the atom at `position` of `clause`, with its size graph.
#[derive(Clone, Debug)]
pub struct CallEdge {
    pub clause: usize,
    pub position: usize,
    pub graph: SizeGraph,
}

/// The size-change graphs of a t-annotated program under a callset.
pub struct LoopAnalysis {
    pub edges: Vec<CallEdge>,
    closure: BTreeSet<SizeGraph>,
    saturated: bool,
    reach: BTreeMap<PredKey, BTreeSet<PredKey>>,
}

impl LoopAnalysis {
    pub fn new(t: &TAnnotation, s: &AbstractCallset, norm: Norm) -> LoopAnalysis {
        let mut edges = Vec::new();
        for (ci, c) in t.program.clauses.iter().enumerate() {
            let p = c.pred();
            let Some(pr) = s.get(p) else { continue };
            for (j, g) in body_goals(&c.body).iter().enumerate() {
                let Some(q) = g.pred_key() else { continue };
                if t.is_builtin(q) || t.is_replaced(ci, j) {
                    continue;
                }
                let Some(qr) = s.get(q) else { continue };
                let mut arcs = BTreeMap::new();
                for (a, h) in c.head.args().iter().enumerate() {
                    if !pr[a] {
                        continue;
                    }
                    let lh = norm.linear(h);
                    for (b, x) in g.args().iter().enumerate() {
                        if qr[b] {
                            if let Some(strict) = lh.bounds(&norm.linear(x)) {
                                arcs.insert((a, b), strict);
                            }
                        }
                    }
                }
                edges.push(CallEdge {
                    clause: ci,
                    position: j,
                    graph: SizeGraph {
                        from: p,
                        to: q,
                        arcs,
                    },
                });
            }
        }

        let mut closure: BTreeSet<SizeGraph> = edges.iter().map(|e| e.graph.clone()).collect();
        let mut saturated = false;
        for _ in 0..COMPOSITION_ROUNDS {
            let mut fresh = Vec::new();
            for g in &closure {
                for h in &closure {
                    if g.to == h.from {
                        let k = g.compose(h);
                        if !closure.contains(&k) {
                            fresh.push(k);
                        }
                    }
                }
            }
            if fresh.is_empty() {
                saturated = true;
                break;
            }
            closure.extend(fresh);
        }

        let mut reach: BTreeMap<PredKey, BTreeSet<PredKey>> = BTreeMap::new();
        for e in &edges {
            reach.entry(e.graph.from).or_default().insert(e.graph.to);
        }
        loop {
            let mut grew = false;
            let keys: Vec<PredKey> = reach.keys().copied().collect();
            for k in keys {
                let next: BTreeSet<PredKey> = reach[&k]
                    .iter()
                    .flat_map(|q| reach.get(q).into_iter().flatten().copied())
                    .collect();
                let entry = reach.get_mut(&k).expect("present");
                let before = entry.len();
                entry.extend(next);
                grew |= entry.len() > before;
            }
            if !grew {
                break;
            }
        }

        LoopAnalysis {
            edges,
            closure,
            saturated,
            reach,
        }
    }

    fn reaches(&self, from: PredKey, to: PredKey) -> bool {
        self.reach.get(&from).is_some_and(|s| s.contains(&to))
    }

    /// Whether the atom at `position` of `clause` is loop safe. Atoms that
    /// are not call edges (builtins, replaced atoms, unreached code) are.
    pub fn loop_safe(&self, clause: usize, position: usize) -> bool {
        let Some(e) = self
            .edges
            .iter()
            .find(|e| e.clause == clause && e.position == position)
        else {
            return true;
        };
        let (p, q) = (e.graph.from, e.graph.to);
        if p != q && !self.reaches(q, p) {
            return true;
        }
        if !self.saturated {
            return false;
        }
        let mut cycles: Vec<SizeGraph> = Vec::new();
        if p == q {
            cycles.push(e.graph.clone());
        }
        for g in &self.closure {
            if g.from == q && g.to == p {
                cycles.push(e.graph.compose(g));
            }
        }
        // The cycles are closed under composition, so their idempotent
        // elements are among them.
        cycles
            .iter()
            .filter(|h| h.compose(h) == **h)
            .all(SizeGraph::has_strict_self_arc)
    }
}
