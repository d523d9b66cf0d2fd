use std::collections::HashMap;

use super::{gen_atom, Division, TypeError, TypeSystem};
use crate::term::{canonical, match_term, Atom, Term};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MemoStatus {
    Pending,
    Done,
}

/// A generalised atom together with its residual name.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MemoEntry {
    /// The generalised atom, variables numbered canonically.
    pub pattern: Term,
    /// Per-name counter value: the `N` of `p__N`.
    pub index: usize,
    /// `p__N(V0,..)` over the variables of `pattern`.
    pub skeleton: Term,
    pub status: MemoStatus,
}

impl MemoEntry {
    pub fn residual_name(&self) -> Atom {
        self.skeleton
            .functor()
            .map(|(f, _)| f)
            .expect("skeleton is callable")
    }
}

/// The global-control state of a specialisation session: every generalised
/// atom seen so far, keyed by variance.
#[derive(Clone, Debug, Default)]
pub struct MemoTable {
    entries: Vec<MemoEntry>,
    by_pattern: HashMap<Term, usize>,
    counters: HashMap<Atom, usize>,
}

impl MemoTable {
    pub fn new() -> MemoTable {
        MemoTable::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[MemoEntry] {
        &self.entries
    }

    pub fn entry(&self, id: usize) -> &MemoEntry {
        &self.entries[id]
    }

    /// The entry whose pattern is a variant of `g`.
    pub fn lookup(&self, g: &Term) -> Option<usize> {
        self.by_pattern.get(&canonical(g)).copied()
    }

    /// Registers `g` unless a variant is already present. Returns the entry id
    /// and whether it was new.
    pub fn register(&mut self, g: &Term) -> (usize, bool) {
        let pattern = canonical(g);
        if let Some(&id) = self.by_pattern.get(&pattern) {
            return (id, false);
        }
        let (name, _) = pattern.functor().expect("memoised atoms are callable");
        let counter = self.counters.entry(name).or_insert(0);
        let index = *counter;
        *counter += 1;
        let nvars = pattern.max_var().map_or(0, |m| m + 1);
        let skeleton = Term::compound(
            Atom::new(&format!("{}__{}", name.name(), index)),
            (0..nvars).map(Term::var).collect(),
        );
        let id = self.entries.len();
        self.entries.push(MemoEntry {
            pattern: pattern.clone(),
            index,
            skeleton,
            status: MemoStatus::Pending,
        });
        self.by_pattern.insert(pattern, id);
        (id, true)
    }

    pub fn mark_done(&mut self, id: usize) {
        self.entries[id].status = MemoStatus::Done;
    }

    /// Oldest entry still waiting to be specialised.
    pub fn next_pending(&self) -> Option<usize> {
        self.entries
            .iter()
            .position(|e| e.status == MemoStatus::Pending)
    }

    /// The residual call for `call`, an instance of entry `id`'s pattern.
    pub fn filtered_call(&self, id: usize, call: &Term) -> Option<Term> {
        let e = &self.entries[id];
        match_term(&e.pattern, call).map(|theta| theta.apply(&e.skeleton))
    }

    /// Entry id of the residual predicate named `name`, if any.
    pub fn by_residual_name(&self, name: Atom) -> Option<usize> {
        self.entries.iter().position(|e| e.residual_name() == name)
    }
}

/// Generalises `a`, registers the generalisation and returns the renamed and
/// filtered call.
pub fn filter_atom(
    a: &Term,
    d: &Division,
    ts: &TypeSystem,
    memo: &mut MemoTable,
) -> Result<Term, TypeError> {
    let g = gen_atom(a, d, ts)?;
    let (id, _) = memo.register(&g);
    Ok(memo
        .filtered_call(id, a)
        .expect("an atom is an instance of its generalisation"))
}
