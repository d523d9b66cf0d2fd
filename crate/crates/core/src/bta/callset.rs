//! Abstract call patterns: for each argument, whether its size under the
//! chosen norm is fixed.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;

use super::{Norm, TAnnotation};
use crate::annotations::is_side_effect;
use crate::term::{body_goals, PredKey, Term, Var};

/// One abstract call. `true` marks an argument whose size is rigid; `false`
/// is the top of the per-argument order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractCall {
    pub pred: PredKey,
    pub rigid: Vec<bool>,
}

impl AbstractCall {
    pub fn to_term(&self) -> Term {
        Term::compound(
            self.pred.name,
            self.rigid
                .iter()
                .map(|&b| Term::atom(if b { "true" } else { "false" }))
                .collect(),
        )
    }
}

impl fmt::Display for AbstractCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::term::render_term(&self.to_term()))
    }
}

/// A monovariant callset: at most one abstract call per predicate, in order
/// of discovery.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AbstractCallset {
    calls: IndexMap<PredKey, Vec<bool>>,
}

/// Pointwise least upper bound; `false` absorbs.
fn lub_into(into: &mut [bool], other: &[bool]) -> bool {
    let mut changed = false;
    for (a, b) in into.iter_mut().zip(other) {
        if *a && !*b {
            *a = false;
            changed = true;
        }
    }
    changed
}

impl AbstractCallset {
    pub fn new() -> AbstractCallset {
        AbstractCallset::default()
    }

    pub fn get(&self, pred: PredKey) -> Option<&[bool]> {
        self.calls.get(&pred).map(Vec::as_slice)
    }

    pub fn contains(&self, pred: PredKey) -> bool {
        self.calls.contains_key(&pred)
    }

    pub fn len(&self) -> usize {
        self.calls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.calls.is_empty()
    }

    /// Adds a call, joining it with the one already present. Returns whether
    /// the set changed.
    pub fn add(&mut self, pred: PredKey, rigid: &[bool]) -> bool {
        match self.calls.get_mut(&pred) {
            Some(old) => lub_into(old, rigid),
            None => {
                self.calls.insert(pred, rigid.to_vec());
                true
            }
        }
    }

    pub fn lub(&self, other: &AbstractCallset) -> AbstractCallset {
        let mut out = self.clone();
        for (k, v) in &other.calls {
            out.add(*k, v);
        }
        out
    }

    pub fn calls(&self) -> impl Iterator<Item = AbstractCall> + '_ {
        self.calls.iter().map(|(k, v)| AbstractCall {
            pred: *k,
            rigid: v.clone(),
        })
    }

    /// `{p(true), q(false)}` sorted by predicate for stable comparison.
    pub fn render(&self) -> String {
        let mut items: Vec<String> = self.calls().map(|c| c.to_string()).collect();
        items.sort();
        format!("{{{}}}", items.join(", "))
    }
}

/// The outcome of abstract interpretation of a t-annotated program.
#[derive(Debug, Clone)]
pub(crate) struct Analysis {
    pub callset: AbstractCallset,
    /// Builtin atoms, as (clause, position), that can be evaluated on every
    /// visit.
    pub rigid_builtins: BTreeSet<(usize, usize)>,
}

struct Interp<'a> {
    t: &'a TAnnotation,
    norm: Norm,
    calls: AbstractCallset,
    /// Rigidity of the arguments on success; absent while no clause is known
    /// to succeed.
    success: HashMap<PredKey, Vec<bool>>,
}

impl Interp<'_> {
    fn rigid(&self, env: &HashSet<Var>, t: &Term) -> bool {
        self.norm.rigid_vars(t).iter().all(|v| env.contains(v))
    }

    /// Whether a builtin can run at specialisation time: only when rigid
    /// arguments are ground, and then only when the arguments it reads are
    /// rigid. Control constructs and side effects always stay residual.
    fn evaluable(&self, env: &HashSet<Var>, g: &Term) -> bool {
        if !self.norm.rigid_is_ground() || is_side_effect(g) {
            return false;
        }
        let (f, n) = g.functor().expect("builtin goals are callable");
        let a = g.args();
        let r = |i: usize| self.rigid(env, &a[i]);
        match (f.name(), n) {
            (",", 2)
            | (";", 2)
            | ("->", 2)
            | ("\\+", 1)
            | ("not", 1)
            | ("findall", 3)
            | ("call", _) => false,
            ("=", 2) => r(0) || r(1),
            ("is", 2) => r(1),
            ("functor", 3) | ("=..", 2) => r(0),
            ("arg", 3) => r(0) && r(1),
            _ => (0..n).all(r),
        }
    }

    /// Runs every clause of `pred` once under its current call pattern.
    /// Returns whether anything changed. With `loose`, records builtin
    /// atoms that cannot be evaluated.
    fn visit(&mut self, pred: PredKey, mut loose: Option<&mut BTreeSet<(usize, usize)>>) -> bool {
        let pattern = self
            .calls
            .get(pred)
            .expect("visited predicates are called")
            .to_vec();
        let mut changed = false;
        for (ci, c) in self.t.program.clauses.iter().enumerate() {
            if c.pred() != pred {
                continue;
            }
            let mut env = HashSet::new();
            for (arg, &r) in c.head.args().iter().zip(&pattern) {
                if r {
                    env.extend(self.norm.rigid_vars(arg));
                }
            }
            let mut reached = true;
            for (j, g) in body_goals(&c.body).iter().enumerate() {
                let Some(q) = g.pred_key() else {
                    // A variable goal: nothing is known after it.
                    continue;
                };
                if self.t.is_builtin(q) {
                    if self.evaluable(&env, g) {
                        // Evaluated during specialisation: every argument
                        // is ground afterwards.
                        for a in g.args() {
                            env.extend(self.norm.rigid_vars(a));
                        }
                    } else if let Some(l) = loose.as_deref_mut() {
                        l.insert((ci, j));
                    }
                    continue;
                }
                let call: Vec<bool> = g.args().iter().map(|a| self.rigid(&env, a)).collect();
                changed |= self.calls.add(q, &call);
                if self.t.is_replaced(ci, j) {
                    continue;
                }
                match self.success.get(&q) {
                    None => {
                        reached = false;
                        break;
                    }
                    Some(s) => {
                        for (a, &r) in g.args().iter().zip(s) {
                            if r {
                                env.extend(self.norm.rigid_vars(a));
                            }
                        }
                    }
                }
            }
            if reached {
                let out: Vec<bool> = c.head.args().iter().map(|a| self.rigid(&env, a)).collect();
                match self.success.get_mut(&pred) {
                    Some(old) => changed |= lub_into(old, &out),
                    None => {
                        self.success.insert(pred, out);
                        changed = true;
                    }
                }
            }
        }
        changed
    }
}

/// Abstract interpretation of `t` starting from `seeds`, to a fixpoint.
pub(crate) fn analyse(t: &TAnnotation, seeds: &AbstractCallset, norm: Norm) -> Analysis {
    let mut it = Interp {
        t,
        norm,
        calls: seeds.clone(),
        success: HashMap::new(),
    };
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < it.calls.len() {
            let pred = *it.calls.calls.get_index(i).expect("in range").0;
            changed |= it.visit(pred, None);
            i += 1;
        }
        if !changed {
            break;
        }
    }
    let mut loose = BTreeSet::new();
    let preds: Vec<PredKey> = it.calls.calls.keys().copied().collect();
    for pred in preds {
        it.visit(pred, Some(&mut loose));
    }
    let mut rigid_builtins = BTreeSet::new();
    for (ci, c) in t.program.clauses.iter().enumerate() {
        if !it.calls.contains(c.pred()) {
            continue;
        }
        for (j, g) in body_goals(&c.body).iter().enumerate() {
            if g.pred_key().is_some_and(|q| t.is_builtin(q)) && !loose.contains(&(ci, j)) {
                rigid_builtins.insert((ci, j));
            }
        }
    }
    Analysis {
        callset: it.calls,
        rigid_builtins,
    }
}

/// The abstract call of `goal`.
pub fn abstract_goal(goal: &Term, norm: Norm) -> Option<AbstractCall> {
    Some(AbstractCall {
        pred: goal.pred_key()?,
        rigid: goal.args().iter().map(|a| norm.is_rigid(a)).collect(),
    })
}

/// The abstract callset of `t` for `goal`.
pub fn abstract_callset(t: &TAnnotation, goal: &Term, norm: Norm) -> AbstractCallset {
    let mut seeds = AbstractCallset::new();
    if let Some(c) = abstract_goal(goal, norm) {
        seeds.add(c.pred, &c.rigid);
    }
    analyse(t, &seeds, norm).callset
}
