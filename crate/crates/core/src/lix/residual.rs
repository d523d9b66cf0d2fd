use indexmap::IndexSet;

use super::LixError;
use crate::binding_types::MemoTable;
use crate::engine::is_core_builtin;
use crate::term::{atoms, render_clauses, Clause, PredKey, Program, Term};

/// The output of a specialisation: residual clauses grouped by residual
/// predicate in memo-table order, followed by one interface clause per entry
/// goal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResidualProgram {
    pub clauses: Vec<Clause>,
    pub interface: Vec<Clause>,
    /// Residual predicates in memo-table order.
    pub predicates: Vec<PredKey>,
}

impl ResidualProgram {
    /// Builds the program from per-entry clause lists. An entry without
    /// resultants gets the single clause `p__N(..) :- fail` so that calls to
    /// it fail rather than raise an existence error.
    pub fn assemble(
        memo: &MemoTable,
        per_entry: Vec<Vec<Clause>>,
        interface: Vec<Clause>,
    ) -> ResidualProgram {
        let mut clauses = Vec::new();
        let mut predicates = Vec::new();
        for (entry, own) in memo.entries().iter().zip(per_entry) {
            predicates.push(entry.skeleton.pred_key().expect("skeleton is callable"));
            if own.is_empty() {
                clauses.push(Clause::new(entry.skeleton.clone(), Term::fail()));
            } else {
                clauses.extend(own);
            }
        }
        ResidualProgram {
            clauses,
            interface,
            predicates,
        }
    }

    /// Residual and interface clauses together.
    pub fn program(&self) -> Program {
        Program::new(
            self.clauses
                .iter()
                .chain(&self.interface)
                .cloned()
                .collect(),
        )
    }

    pub fn render(&self) -> String {
        render_clauses(self.clauses.iter().chain(&self.interface))
    }

    /// Predicates called from residual code that are neither residual
    /// predicates nor builtins. They come from `rescall` of user predicates
    /// and must be supplied by the original program.
    pub fn open_predicates(&self) -> Vec<PredKey> {
        let defined: IndexSet<PredKey> = self.clauses.iter().map(Clause::pred).collect();
        let mut out: IndexSet<PredKey> = IndexSet::new();
        for c in self.clauses.iter().chain(&self.interface) {
            for k in called(&c.body) {
                if !defined.contains(&k) && !is_core_builtin(k) {
                    out.insert(k);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Every residual predicate that is called has clauses.
    pub fn check_closed(&self) -> Result<(), LixError> {
        let defined: IndexSet<PredKey> = self.clauses.iter().map(Clause::pred).collect();
        for c in self.clauses.iter().chain(&self.interface) {
            for k in called(&c.body) {
                if is_residual_name(k) && !defined.contains(&k) {
                    return Err(LixError::NotClosed(k));
                }
            }
        }
        Ok(())
    }

    /// The residual program plus the clauses of its open predicates taken
    /// from `original`.
    pub fn runnable(&self, original: &Program) -> Program {
        let mut p = self.program();
        let mut todo = self.open_predicates();
        let mut needed: IndexSet<PredKey> = todo.iter().copied().collect();
        while let Some(k) = todo.pop() {
            for c in original.clauses_for(k) {
                for j in called(&c.body) {
                    if !is_core_builtin(j) && needed.insert(j) {
                        todo.push(j);
                    }
                }
            }
        }
        p.clauses.extend(
            original
                .clauses
                .iter()
                .filter(|c| needed.contains(&c.pred()))
                .cloned(),
        );
        p
    }
}

/// Names of the form `p__N`.
fn is_residual_name(k: PredKey) -> bool {
    k.name.name().rsplit_once("__").is_some_and(|(p, n)| {
        !p.is_empty() && !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit())
    })
}

/// Predicates a goal calls, looking inside control constructs.
pub(crate) fn called(body: &Term) -> Vec<PredKey> {
    let mut out = Vec::new();
    let mut stack = vec![body];
    while let Some(g) = stack.pop() {
        let Some((f, n)) = g.functor() else { continue };
        let a = g.args();
        match (f, n) {
            (f, 2) if f == atoms::COMMA || f == atoms::SEMI || f == atoms::ARROW => {
                stack.push(&a[1]);
                stack.push(&a[0]);
            }
            (f, 1) if f == atoms::NOT_PROVABLE || f == atoms::NOT || f == atoms::CALL => {
                stack.push(&a[0])
            }
            (f, 3) if f == atoms::FINDALL => stack.push(&a[1]),
            _ => out.push(PredKey { name: f, arity: n }),
        }
    }
    out
}
