//! Depth-first, left-to-right resolution with the core builtins.
//!
//! The engine runs on an explicit goal stack and choicepoint stack, so deep
//! recursion in object programs does not consume host stack. Predicates that
//! are neither builtins nor defined in the database may be provided by a
//! [`Hooks`] implementation; this is how generating extensions reach their
//! runtime support.

mod arith;
mod builtins;
mod machine;
pub mod store;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{atoms, canonical, Clause, PredKey, Program, Term};

pub(crate) use builtins::call_simple;
pub use builtins::{is_core_builtin, CORE_BUILTINS};
pub use machine::{solve, solve_all, Answer, Solutions, Solver};
pub use store::Store;

/// Default limit on goal dispatches per query.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("resource error: step budget of {budget} exhausted")]
    Budget { budget: u64 },
    #[error("existence error: unknown procedure {0}")]
    Existence(PredKey),
    #[error("instantiation error in {0}")]
    Instantiation(String),
    #[error("type error in {context}: expected {expected}, found {found}")]
    Type {
        context: String,
        expected: &'static str,
        found: String,
    },
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("{0}")]
    Hook(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub budget: u64,
    pub occurs_check: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            budget: DEFAULT_BUDGET,
            occurs_check: false,
        }
    }
}

impl EngineConfig {
    pub fn with_budget(budget: u64) -> Self {
        EngineConfig {
            budget,
            ..Default::default()
        }
    }
}

/// Extra predicates supplied by the host. Hook predicates are deterministic:
/// a call either succeeds once or fails.
pub trait Hooks {
    fn defines(&self, key: PredKey) -> bool;
    fn call(
        &mut self,
        key: PredKey,
        args: &[Term],
        ctx: &mut HookCtx<'_>,
    ) -> Result<bool, EngineError>;
}

/// Access to the engine state granted to a hook call.
pub struct HookCtx<'a> {
    pub(crate) store: &'a mut Store,
}

impl HookCtx<'_> {
    /// The term with all current bindings applied.
    pub fn resolve(&self, t: &Term) -> Term {
        self.store.resolve(t)
    }

    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        self.store.unify(a, b)
    }

    pub fn fresh_var(&mut self) -> Term {
        self.store.fresh()
    }

    /// Brings a term with variables `0..n` into the store with fresh variables.
    pub fn import(&mut self, t: &Term, n: u32) -> Term {
        self.store.import(t, n)
    }
}

/// First-argument shape used to skip clauses that cannot match.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum IndexKey {
    Atom(crate::term::Atom),
    Int(i64),
    Functor(crate::term::Atom, usize),
}

pub(crate) fn index_key(t: &Term) -> Option<IndexKey> {
    match t {
        Term::Atom(a) => Some(IndexKey::Atom(*a)),
        Term::Int(n) => Some(IndexKey::Int(*n)),
        Term::Compound(c) => Some(IndexKey::Functor(c.functor, c.args.len())),
        Term::Var(_) => None,
    }
}

#[derive(Debug)]
pub(crate) struct CompiledClause {
    pub head: Term,
    pub body: Term,
    pub nvars: u32,
    pub key: Option<IndexKey>,
}

#[derive(Debug, Default)]
pub(crate) struct Pred {
    pub clauses: Vec<CompiledClause>,
}

/// Clauses indexed by predicate, ready for execution.
#[derive(Debug, Default)]
pub struct Database {
    preds: HashMap<PredKey, Arc<Pred>>,
}

impl Database {
    pub fn new(program: &Program) -> Database {
        let mut db = Database::default();
        for c in &program.clauses {
            db.add(c);
        }
        db
    }

    pub fn add(&mut self, c: &Clause) {
        let both = canonical(&Term::pair(atoms::NECK, c.head.clone(), c.body.clone()));
        let nvars = both.max_var().map_or(0, |m| m + 1);
        let head = both.arg(0).clone();
        let body = both.arg(1).clone();
        let key = head.args().first().and_then(index_key);
        let pred = self.preds.entry(c.pred()).or_default();
        Arc::get_mut(pred)
            .expect("database is not shared while being built")
            .clauses
            .push(CompiledClause {
                head,
                body,
                nvars,
                key,
            });
    }

    pub fn defines(&self, key: PredKey) -> bool {
        self.preds.contains_key(&key)
    }

    pub(crate) fn get(&self, key: PredKey) -> Option<&Arc<Pred>> {
        self.preds.get(&key)
    }
}

/// Hook table with no predicates.
pub struct NoHooks;

impl Hooks for NoHooks {
    fn defines(&self, _key: PredKey) -> bool {
        false
    }

    fn call(
        &mut self,
        key: PredKey,
        _args: &[Term],
        _ctx: &mut HookCtx<'_>,
    ) -> Result<bool, EngineError> {
        Err(EngineError::Existence(key))
    }
}
