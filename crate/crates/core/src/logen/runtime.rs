//! The builtins a generating extension needs, and the driver that runs one.

use std::collections::HashMap;
use std::sync::Arc;

use super::{add_extra_argument, GenEx, LogenError};
use crate::binding_types::{gen_atom, Division, MemoTable, TypeSystem};
use crate::engine::{Database, EngineConfig, EngineError, HookCtx, Hooks, Solver};
use crate::lix::{make_disjunction, varlist, ResidualProgram};
use crate::term::{atoms, canonical, normalise_body, render_term, Clause, PredKey, Term, Var};

/// The runtime builtins, as `(name, arity)`.
pub const RUNTIME_BUILTINS: &[(&str, usize)] = &[
    ("find_pattern", 2),
    ("insert_pattern", 2),
    ("generalise", 2),
    ("add_extra_argument", 4),
    ("varlist", 2),
    ("make_disjunction", 3),
    ("flatten", 2),
    ("pp", 1),
];

/// State of one genex session: the memo table and the clauses printed so
/// far.
pub struct Runtime {
    division: Division,
    types: TypeSystem,
    memo: MemoTable,
    printed: Vec<Clause>,
}

fn hook_error(msg: String) -> EngineError {
    EngineError::Hook(msg)
}

/// Reads the suffix argument of `add_extra_argument/4`: an atom or a list of
/// character codes.
fn suffix_text(t: &Term) -> Option<String> {
    if let Some(a) = t.as_atom() {
        return Some(a.name().to_string());
    }
    t.as_list()?
        .into_iter()
        .map(|c| match c {
            Term::Int(n) => u32::try_from(*n).ok().and_then(char::from_u32),
            _ => None,
        })
        .collect()
}

impl Runtime {
    pub fn new(division: Division, types: TypeSystem) -> Runtime {
        Runtime {
            division,
            types,
            memo: MemoTable::new(),
            printed: Vec::new(),
        }
    }

    pub fn memo(&self) -> &MemoTable {
        &self.memo
    }

    fn generalise(&self, call: &Term) -> Result<Term, EngineError> {
        gen_atom(call, &self.division, &self.types)
            .map_err(|e| hook_error(format!("cannot generalise {}: {e}", render_term(call))))
    }

    fn callable(ctx: &HookCtx<'_>, t: &Term, context: &str) -> Result<Term, EngineError> {
        let t = ctx.resolve(t);
        if t.is_callable() {
            Ok(t)
        } else if t.is_var() {
            Err(EngineError::Instantiation(context.to_string()))
        } else {
            Err(EngineError::Type {
                context: context.to_string(),
                expected: "callable",
                found: render_term(&t),
            })
        }
    }
}

impl Hooks for Runtime {
    fn defines(&self, key: PredKey) -> bool {
        RUNTIME_BUILTINS
            .iter()
            .any(|(n, a)| *a == key.arity && *n == key.name.name())
    }

    fn call(
        &mut self,
        key: PredKey,
        args: &[Term],
        ctx: &mut HookCtx<'_>,
    ) -> Result<bool, EngineError> {
        match key.name.name() {
            "find_pattern" => {
                let call = Self::callable(ctx, &args[0], "find_pattern/2")?;
                let g = self.generalise(&call)?;
                match self.memo.lookup(&g) {
                    Some(id) => {
                        let f = self
                            .memo
                            .filtered_call(id, &call)
                            .expect("instance of its generalisation");
                        Ok(ctx.unify(&args[1], &f))
                    }
                    None => Ok(false),
                }
            }
            "insert_pattern" => {
                let g = Self::callable(ctx, &args[0], "insert_pattern/2")?;
                let (id, _) = self.memo.register(&g);
                let f = self
                    .memo
                    .filtered_call(id, &g)
                    .expect("a pattern matches itself");
                Ok(ctx.unify(&args[1], &f))
            }
            "generalise" => {
                let call = Self::callable(ctx, &args[0], "generalise/2")?;
                let g = self.generalise(&call)?;
                // Variables introduced by generalisation are numbered above
                // those of the call; give them fresh engine variables.
                let first_new = call.max_var().map_or(0, |m| m + 1);
                let mut fresh: HashMap<Var, Term> = HashMap::new();
                let g = g.map_vars(&mut |v| {
                    if v.0 >= first_new {
                        fresh.entry(v).or_insert_with(|| ctx.fresh_var()).clone()
                    } else {
                        Term::Var(v)
                    }
                });
                Ok(ctx.unify(&args[1], &g))
            }
            "add_extra_argument" => {
                let suffix = suffix_text(&ctx.resolve(&args[0]))
                    .ok_or_else(|| hook_error("add_extra_argument/4: bad suffix".into()))?;
                let call = Self::callable(ctx, &args[1], "add_extra_argument/4")?;
                let r = add_extra_argument(&suffix, &call, args[2].clone()).expect("callable");
                Ok(ctx.unify(&args[3], &r))
            }
            "varlist" => {
                let vs = Term::list(varlist(&ctx.resolve(&args[0])));
                Ok(ctx.unify(&args[1], &vs))
            }
            "make_disjunction" => {
                let all = ctx.resolve(&args[0]);
                let vars = ctx.resolve(&args[1]);
                let bad = || hook_error("make_disjunction/3: malformed solutions".into());
                let vars: Vec<Term> = vars
                    .as_list()
                    .ok_or_else(bad)?
                    .into_iter()
                    .cloned()
                    .collect();
                let mut sols = Vec::new();
                for s in all.as_list().ok_or_else(bad)? {
                    if !s.is_functor(atoms::COMMA, 2) {
                        return Err(bad());
                    }
                    let values = s
                        .arg(1)
                        .as_list()
                        .ok_or_else(bad)?
                        .into_iter()
                        .cloned()
                        .collect();
                    sols.push((s.arg(0).clone(), values));
                }
                Ok(ctx.unify(&args[2], &make_disjunction(&sols, &vars)))
            }
            "flatten" => {
                let flat = normalise_body(&ctx.resolve(&args[0]));
                Ok(ctx.unify(&args[1], &flat))
            }
            "pp" => {
                let list = ctx.resolve(&args[0]);
                let bad = || {
                    hook_error(format!(
                        "pp/1: expected a list of clauses, got {}",
                        render_term(&list)
                    ))
                };
                for c in list.as_list().ok_or_else(bad)? {
                    let Some((f, 2)) = c.functor() else {
                        return Err(bad());
                    };
                    if f.name() != "clause" {
                        return Err(bad());
                    }
                    let c = canonical(c);
                    self.printed
                        .push(Clause::new(c.arg(0).clone(), normalise_body(c.arg(1))));
                }
                Ok(true)
            }
            _ => Err(EngineError::Existence(key)),
        }
    }
}

/// The result of running a generating extension.
#[derive(Debug, Clone)]
pub struct GenexRun {
    pub residual: ResidualProgram,
    /// Filtered call for each entry goal.
    pub filtered: Vec<Term>,
    /// Engine steps spent.
    pub steps: u64,
}

/// Runs the generating extension for each entry goal in one session.
pub fn run_genex(g: &GenEx, goals: &[Term]) -> Result<GenexRun, LogenError> {
    run_genex_with(g, goals, EngineConfig::default())
}

pub fn run_genex_with(
    g: &GenEx,
    goals: &[Term],
    config: EngineConfig,
) -> Result<GenexRun, LogenError> {
    let db = Arc::new(Database::new(&g.program));
    let mut rt = Runtime::new(g.division.clone(), g.types.clone());
    let mut interface = Vec::new();
    let mut filtered = Vec::new();
    let mut steps = 0;
    for goal in goals {
        let key = goal
            .pred_key()
            .ok_or_else(|| LogenError::Failed(render_term(goal)))?;
        if !g.memoised.contains(&key) {
            return Err(LogenError::NoEntry(key));
        }
        let f = Term::var(goal.max_var().map_or(0, |m| m + 1));
        let query = add_extra_argument("_m", goal, f.clone()).expect("callable");
        let mut solver = Solver::new(Arc::clone(&db), config, Some(&mut rt));
        solver.query(&query);
        let answer = solver.next_answer()?;
        steps += solver.steps();
        let answer = answer.ok_or_else(|| LogenError::Failed(render_term(goal)))?;
        let call = answer.subst.apply(&f);
        interface.push(Clause::new(goal.clone(), call.clone()));
        filtered.push(call);
    }
    // Clauses are printed innermost entry first; group them by entry.
    let by_name: HashMap<_, usize> = rt
        .memo
        .entries()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.residual_name(), i))
        .collect();
    let mut per_entry = vec![Vec::new(); rt.memo.len()];
    for c in rt.printed {
        let (name, _) = c.head.functor().expect("residual heads are callable");
        let id = by_name.get(&name).copied().ok_or_else(|| {
            LogenError::Failed(format!("printed clause for unknown predicate {name}"))
        })?;
        per_entry[id].push(c);
    }
    let residual = ResidualProgram::assemble(&rt.memo, per_entry, interface);
    residual.check_closed()?;
    Ok(GenexRun {
        residual,
        filtered,
        steps,
    })
}
