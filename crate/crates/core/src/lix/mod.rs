//! Direct offline partial deduction of annotated programs.
//!
//! [`specialise`] drives the memo table: every memoised call is generalised
//! by its division, registered, and specialised straight away by unfolding
//! the generalised atom according to the annotations. The resultants of each
//! entry become the clauses of its residual predicate `p__N`.

mod code;
mod residual;
mod unfold;

use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use crate::annotations::{residual_negations, AnnBody, AnnotatedProgram};
use crate::binding_types::{gen_atom, MemoTable, TypeError};
use crate::engine::{EngineError, Store, DEFAULT_BUDGET};
use crate::term::{render_term, Clause, PredKey, Term};

pub use code::{make_disjunction, varlist};
pub use residual::ResidualProgram;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LixError {
    #[error("{atom} cannot be generalised: {source}")]
    Unsafe { atom: String, source: TypeError },
    #[error("no annotated clauses for {0}")]
    Undefined(PredKey),
    #[error("instantiation error: {0}")]
    Instantiation(String),
    #[error("clause {0}: reducible negation may leave residual code")]
    ResidualNegation(i64),
    #[error("specialisation budget of {budget} steps exhausted; memo table has {entries} entries, latest: {latest}")]
    Budget {
        budget: u64,
        entries: usize,
        latest: String,
    },
    #[error("{0} was never registered in the memo table")]
    Unregistered(String),
    #[error("residual program is not closed: {0} is called but has no clauses")]
    NotClosed(PredKey),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LixConfig {
    /// Limit on unfolding and builtin steps for the whole session.
    pub budget: u64,
    pub occurs_check: bool,
}

impl Default for LixConfig {
    fn default() -> Self {
        LixConfig {
            budget: DEFAULT_BUDGET,
            occurs_check: false,
        }
    }
}

/// One leaf of an unfolding tree: the instantiated atom and the residual
/// goals left on the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resultant {
    pub head: Term,
    pub body: Vec<Term>,
}

#[derive(Debug)]
struct Compiled {
    head: Term,
    body: AnnBody,
    nvars: u32,
}

/// A specialisation session over one annotated program.
pub struct Specialiser<'p> {
    program: &'p AnnotatedProgram,
    clauses: HashMap<PredKey, Rc<[Compiled]>>,
    config: LixConfig,
    store: Store,
    memo: MemoTable,
    residual: Vec<Vec<Clause>>,
    interface: Vec<Clause>,
    log: Vec<String>,
    steps: u64,
    next_cut: usize,
}

impl<'p> Specialiser<'p> {
    pub fn new(program: &'p AnnotatedProgram, config: LixConfig) -> Result<Self, LixError> {
        if let Some(&id) = residual_negations(program).first() {
            return Err(LixError::ResidualNegation(id));
        }
        let mut grouped: HashMap<PredKey, Vec<Compiled>> = HashMap::new();
        for c in &program.clauses {
            let nvars = [c.head.max_var(), c.body.to_term().max_var()]
                .into_iter()
                .flatten()
                .max()
                .map_or(0, |m| m + 1);
            grouped.entry(c.pred()).or_default().push(Compiled {
                head: c.head.clone(),
                body: c.body.clone(),
                nvars,
            });
        }
        Ok(Specialiser {
            program,
            clauses: grouped.into_iter().map(|(k, v)| (k, Rc::from(v))).collect(),
            config,
            store: Store::new(config.occurs_check),
            memo: MemoTable::new(),
            residual: Vec::new(),
            interface: Vec::new(),
            log: Vec::new(),
            steps: 0,
            next_cut: 0,
        })
    }

    pub fn memo(&self) -> &MemoTable {
        &self.memo
    }

    /// Output of `print/1` calls executed at specialisation time.
    pub fn log(&self) -> &[String] {
        &self.log
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Specialises an entry goal and records its interface clause. Returns
    /// the filtered call.
    pub fn add_goal(&mut self, goal: &Term) -> Result<Term, LixError> {
        let filtered = self.memoise(goal)?;
        self.interface
            .push(Clause::new(goal.clone(), filtered.clone()));
        Ok(filtered)
    }

    /// Generalises `a`, specialises the generalisation if it is new, and
    /// returns the filtered call for `a`.
    pub fn memoise(&mut self, a: &Term) -> Result<Term, LixError> {
        let g = gen_atom(a, &self.program.division, &self.program.types).map_err(|source| {
            LixError::Unsafe {
                atom: render_term(a),
                source,
            }
        })?;
        let id = match self.memo.lookup(&g) {
            Some(id) => id,
            None => {
                let (id, _) = self.memo.register(&g);
                self.residual.push(Vec::new());
                self.specialise_entry(id)?;
                id
            }
        };
        Ok(self
            .memo
            .filtered_call(id, a)
            .expect("an atom is an instance of its generalisation"))
    }

    /// Unfolds `a` by the annotations and returns one resultant per
    /// successful branch. Memoised calls met on the way are specialised too.
    pub fn unfold_atom(&mut self, a: &Term) -> Result<Vec<Resultant>, LixError> {
        let mark = self.store.mark();
        let base = self.store.alloc(a.max_var().map_or(0, |m| m + 1));
        let call = a.offset_vars(base);
        let mut out = Vec::new();
        let r = self.unfold(&call, &mut Vec::new(), &mut |s, code| {
            let (t, _) = s.store.export(&Term::list([
                call.clone(),
                Term::list(code.iter().cloned()),
            ]));
            let parts = t.as_list().expect("exported list");
            let body = parts[1]
                .as_list()
                .expect("exported list")
                .into_iter()
                .map(crate::term::normalise_body);
            out.push(Resultant {
                head: parts[0].clone(),
                body: body.filter(|g| *g != Term::truth()).collect(),
            });
            Ok(unfold::Flow::More)
        });
        self.store.undo_bindings(mark);
        r?;
        Ok(out)
    }

    fn specialise_entry(&mut self, id: usize) -> Result<(), LixError> {
        let entry = self.memo.entry(id);
        let nvars = entry.pattern.max_var().map_or(0, |m| m + 1);
        let mark = self.store.mark();
        let base = self.store.alloc(nvars);
        let call = entry.pattern.offset_vars(base);
        let head = entry.skeleton.offset_vars(base);
        let mut out = Vec::new();
        let r = self.unfold(&call, &mut Vec::new(), &mut |s, code| {
            out.push(s.export_clause(&head, code));
            Ok(unfold::Flow::More)
        });
        self.store.undo_bindings(mark);
        r?;
        self.residual[id] = out;
        self.memo.mark_done(id);
        Ok(())
    }

    fn export_clause(&self, head: &Term, code: &[Term]) -> Clause {
        let body = crate::term::conj_list(code.to_vec());
        let (t, _) = self.store.export(&Term::list([head.clone(), body]));
        let parts = t.as_list().expect("exported list");
        Clause::new(parts[0].clone(), crate::term::normalise_body(parts[1]))
    }

    /// The residual program built so far.
    pub fn finish(mut self) -> Result<ResidualProgram, LixError> {
        while let Some(id) = self.memo.next_pending() {
            self.specialise_entry(id)?;
        }
        Ok(ResidualProgram::assemble(
            &self.memo,
            self.residual,
            self.interface,
        ))
    }
}

/// Specialises `p` for the entry goals.
pub fn specialise(p: &AnnotatedProgram, goals: &[Term]) -> Result<ResidualProgram, LixError> {
    specialise_with(p, goals, LixConfig::default())
}

pub fn specialise_with(
    p: &AnnotatedProgram,
    goals: &[Term],
    config: LixConfig,
) -> Result<ResidualProgram, LixError> {
    let mut s = Specialiser::new(p, config)?;
    for g in goals {
        s.add_goal(g)?;
    }
    let out = s.finish()?;
    out.check_closed()?;
    Ok(out)
}

/// `original :- filtered(original)` for an already registered goal.
pub fn make_interface_clause(
    p: &AnnotatedProgram,
    original: &Term,
    memo: &MemoTable,
) -> Result<Clause, LixError> {
    let unregistered = || LixError::Unregistered(render_term(original));
    let g = gen_atom(original, &p.division, &p.types).map_err(|_| unregistered())?;
    let id = memo.lookup(&g).ok_or_else(unregistered)?;
    let filtered = memo.filtered_call(id, original).ok_or_else(unregistered)?;
    Ok(Clause::new(original.clone(), filtered))
}

#[cfg(test)]
mod tests;
