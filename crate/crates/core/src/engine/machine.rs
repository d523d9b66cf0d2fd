use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use super::builtins::call_simple;
use super::store::{Mark, Store};
use super::{index_key, Database, EngineConfig, EngineError, HookCtx, Hooks, Pred};
use crate::term::{atoms, PredKey, Program, Substitution, Term, Var};

type Cont = Option<Rc<Frame>>;

struct Frame {
    kind: FrameKind,
    next: Cont,
}

enum FrameKind {
    Call(Term),
    /// Removes every choicepoint above the given height.
    CutTo(usize),
    /// Records a copy of the template for the findall with this id.
    Collect {
        id: usize,
        template: Term,
    },
}

// A long continuation chain would otherwise be dropped recursively.
impl Drop for Frame {
    fn drop(&mut self) {
        let mut next = self.next.take();
        while let Some(rc) = next {
            match Rc::try_unwrap(rc) {
                Ok(mut f) => next = f.next.take(),
                Err(_) => break,
            }
        }
    }
}

fn push(kind: FrameKind, next: Cont) -> Cont {
    Some(Rc::new(Frame { kind, next }))
}

struct ChoicePoint {
    mark: Mark,
    kind: CpKind,
}

enum CpKind {
    Clauses {
        goal: Term,
        pred: Arc<Pred>,
        next: usize,
        cont: Cont,
    },
    Alt {
        goal: Term,
        cont: Cont,
    },
    /// The negated goal failed: continue after the negation.
    Resume {
        cont: Cont,
    },
    FindallEnd {
        result: Term,
        cont: Cont,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum State {
    Idle,
    Ready,
    Running,
    Done,
}

/// One computed answer of a query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    /// Bindings of the query variables. Variables left free in the answer are
    /// numbered above the query's own variables.
    pub subst: Substitution,
    /// The query instantiated by `subst`.
    pub goal: Term,
    /// Side-effect output produced so far in the session.
    pub log: Vec<String>,
}

/// A resolution session over a database, optionally extended by hooks.
pub struct Solver<'h> {
    db: Arc<Database>,
    config: EngineConfig,
    hooks: Option<&'h mut dyn Hooks>,
    store: Store,
    cont: Cont,
    cps: Vec<ChoicePoint>,
    collectors: Vec<Vec<(Term, u32)>>,
    log: Vec<String>,
    steps: u64,
    query: Term,
    state: State,
}

impl<'h> Solver<'h> {
    pub fn new(db: Arc<Database>, config: EngineConfig, hooks: Option<&'h mut dyn Hooks>) -> Self {
        Solver {
            db,
            config,
            hooks,
            store: Store::new(config.occurs_check),
            cont: None,
            cps: Vec::new(),
            collectors: Vec::new(),
            log: Vec::new(),
            steps: 0,
            query: Term::truth(),
            state: State::Idle,
        }
    }

    /// Starts a new query. Variable numbers in `goal` name the query variables.
    /// The side-effect log and step count carry over between queries.
    pub fn query(&mut self, goal: &Term) {
        self.store.clear();
        self.store.reserve_for(goal);
        self.cps.clear();
        self.collectors.clear();
        self.cont = None;
        self.query = goal.clone();
        self.state = State::Ready;
    }

    pub fn log(&self) -> &[String] {
        &self.log
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn reset_steps(&mut self) {
        self.steps = 0;
    }

    /// The next answer, `Ok(None)` once the search space is exhausted.
    pub fn next_answer(&mut self) -> Result<Option<Answer>, EngineError> {
        match self.state {
            State::Idle | State::Done => return Ok(None),
            State::Ready => {
                self.state = State::Running;
                self.cont = push(FrameKind::Call(self.query.clone()), None);
            }
            State::Running => {
                if !self.backtrack() {
                    self.state = State::Done;
                    return Ok(None);
                }
            }
        }
        match self.run() {
            Ok(true) => Ok(Some(self.answer())),
            Ok(false) => {
                self.state = State::Done;
                Ok(None)
            }
            Err(e) => {
                self.state = State::Done;
                Err(e)
            }
        }
    }

    fn answer(&self) -> Answer {
        let qvars = self.query.vars();
        let top = self.query.max_var().map_or(0, |m| m + 1);
        let is_query_var: std::collections::HashSet<Var> = qvars.iter().copied().collect();
        let mut renumber: HashMap<Var, u32> = HashMap::new();
        let mut pairs = Vec::new();
        for v in &qvars {
            let value = self.store.resolve(&Term::Var(*v)).map_vars(&mut |w| {
                if is_query_var.contains(&w) {
                    Term::Var(w)
                } else {
                    let n = top + renumber.len() as u32;
                    Term::Var(Var(*renumber.entry(w).or_insert(n)))
                }
            });
            if value != Term::Var(*v) {
                pairs.push((*v, value));
            }
        }
        let subst = Substitution::from_bindings(pairs);
        Answer {
            goal: subst.apply(&self.query),
            subst,
            log: self.log.clone(),
        }
    }

    fn run(&mut self) -> Result<bool, EngineError> {
        loop {
            let Some(frame) = self.cont.take() else {
                return Ok(true);
            };
            self.cont = frame.next.clone();
            let ok = match &frame.kind {
                FrameKind::Call(goal) => {
                    self.steps += 1;
                    if self.steps > self.config.budget {
                        return Err(EngineError::Budget {
                            budget: self.config.budget,
                        });
                    }
                    self.step(goal)?
                }
                FrameKind::CutTo(h) => {
                    self.cps.truncate(*h);
                    true
                }
                FrameKind::Collect { id, template } => {
                    let copy = self.store.export(template);
                    self.collectors[*id].push(copy);
                    true
                }
            };
            if !ok && !self.backtrack() {
                return Ok(false);
            }
        }
    }

    fn step(&mut self, goal: &Term) -> Result<bool, EngineError> {
        let goal = self.store.deref(goal);
        let (name, arity) = match &goal {
            Term::Var(_) => return Err(EngineError::Instantiation("call/1".to_string())),
            Term::Int(_) => {
                return Err(EngineError::Type {
                    context: "call/1".to_string(),
                    expected: "callable",
                    found: format!("{goal}"),
                })
            }
            Term::Atom(a) => (*a, 0),
            Term::Compound(c) => (c.functor, c.args.len()),
        };
        let args = goal.args();
        let cont = self.cont.take();
        match (name, arity) {
            (n, 2) if n == atoms::COMMA => {
                self.cont = push(
                    FrameKind::Call(args[0].clone()),
                    push(FrameKind::Call(args[1].clone()), cont),
                );
                return Ok(true);
            }
            (n, 2) if n == atoms::SEMI => {
                let left = self.store.deref(&args[0]);
                if left.is_functor(atoms::ARROW, 2) {
                    self.if_then_else(left.arg(0), left.arg(1), &args[1], cont);
                } else {
                    self.cps.push(ChoicePoint {
                        mark: self.store.mark(),
                        kind: CpKind::Alt {
                            goal: args[1].clone(),
                            cont: cont.clone(),
                        },
                    });
                    self.cont = push(FrameKind::Call(left), cont);
                }
                return Ok(true);
            }
            (n, 2) if n == atoms::ARROW => {
                self.if_then_else(&args[0], &args[1], &Term::fail(), cont);
                return Ok(true);
            }
            (n, 1) if n == atoms::NOT_PROVABLE || n == atoms::NOT => {
                let h = self.cps.len();
                self.cps.push(ChoicePoint {
                    mark: self.store.mark(),
                    kind: CpKind::Resume { cont },
                });
                self.cont = push(
                    FrameKind::Call(args[0].clone()),
                    push(
                        FrameKind::CutTo(h),
                        push(FrameKind::Call(Term::fail()), None),
                    ),
                );
                return Ok(true);
            }
            (n, k) if n == atoms::CALL && k >= 1 => {
                let target = self.store.deref(&args[0]);
                let called = match (&target, k) {
                    (Term::Var(_), _) => {
                        return Err(EngineError::Instantiation("call/1".to_string()))
                    }
                    (_, 1) => target,
                    (Term::Atom(f), _) => Term::compound(*f, args[1..].to_vec()),
                    (Term::Compound(c), _) => {
                        let mut all = c.args.to_vec();
                        all.extend_from_slice(&args[1..]);
                        Term::compound(c.functor, all)
                    }
                    (other, _) => {
                        return Err(EngineError::Type {
                            context: format!("call/{k}"),
                            expected: "callable",
                            found: format!("{other}"),
                        })
                    }
                };
                self.cont = push(FrameKind::Call(called), cont);
                return Ok(true);
            }
            (n, 3) if n == atoms::FINDALL => {
                let id = self.collectors.len();
                self.collectors.push(Vec::new());
                self.cps.push(ChoicePoint {
                    mark: self.store.mark(),
                    kind: CpKind::FindallEnd {
                        result: args[2].clone(),
                        cont,
                    },
                });
                self.cont = push(
                    FrameKind::Call(args[1].clone()),
                    push(
                        FrameKind::Collect {
                            id,
                            template: args[0].clone(),
                        },
                        push(FrameKind::Call(Term::fail()), None),
                    ),
                );
                return Ok(true);
            }
            _ => {}
        }
        self.cont = cont;
        if let Some(ok) = call_simple(&mut self.store, name, args, &mut self.log)? {
            return Ok(ok);
        }
        let key = PredKey { name, arity };
        if let Some(hooks) = self.hooks.as_deref_mut() {
            if hooks.defines(key) {
                let mut ctx = HookCtx {
                    store: &mut self.store,
                };
                return hooks.call(key, args, &mut ctx);
            }
        }
        let Some(pred) = self.db.get(key).cloned() else {
            return Err(EngineError::Existence(key));
        };
        let cont = self.cont.take();
        Ok(self.try_clauses(&goal, pred, 0, cont))
    }

    fn if_then_else(&mut self, cond: &Term, then: &Term, els: &Term, cont: Cont) {
        let h = self.cps.len();
        self.cps.push(ChoicePoint {
            mark: self.store.mark(),
            kind: CpKind::Alt {
                goal: els.clone(),
                cont: cont.clone(),
            },
        });
        self.cont = push(
            FrameKind::Call(cond.clone()),
            push(
                FrameKind::CutTo(h),
                push(FrameKind::Call(then.clone()), cont),
            ),
        );
    }

    fn try_clauses(&mut self, goal: &Term, pred: Arc<Pred>, start: usize, cont: Cont) -> bool {
        let key = goal
            .args()
            .first()
            .and_then(|a| index_key(&self.store.deref(a)));
        let compatible = |i: usize| match (key, pred.clauses[i].key) {
            (Some(k), Some(ck)) => k == ck,
            _ => true,
        };
        let n = pred.clauses.len();
        let mut i = start;
        while i < n && !compatible(i) {
            i += 1;
        }
        while i < n {
            let mut j = i + 1;
            while j < n && !compatible(j) {
                j += 1;
            }
            let mark = self.store.mark();
            let pushed = j < n;
            if pushed {
                self.cps.push(ChoicePoint {
                    mark,
                    kind: CpKind::Clauses {
                        goal: goal.clone(),
                        pred: pred.clone(),
                        next: j,
                        cont: cont.clone(),
                    },
                });
            }
            let clause = &pred.clauses[i];
            let base = self.store.alloc(clause.nvars);
            let ok = clause
                .head
                .args()
                .iter()
                .zip(goal.args())
                .all(|(p, t)| self.store.unify_offset(p, base, t));
            if ok {
                self.cont = if clause.body.is_atom(atoms::TRUE) {
                    cont
                } else {
                    push(FrameKind::Call(clause.body.offset_vars(base)), cont)
                };
                return true;
            }
            self.store.undo(mark);
            if pushed {
                self.cps.pop();
            }
            i = j;
        }
        false
    }

    fn backtrack(&mut self) -> bool {
        while let Some(cp) = self.cps.pop() {
            self.store.undo(cp.mark);
            match cp.kind {
                CpKind::Clauses {
                    goal,
                    pred,
                    next,
                    cont,
                } => {
                    if self.try_clauses(&goal, pred, next, cont) {
                        return true;
                    }
                }
                CpKind::Alt { goal, cont } => {
                    self.cont = push(FrameKind::Call(goal), cont);
                    return true;
                }
                CpKind::Resume { cont } => {
                    self.cont = cont;
                    return true;
                }
                CpKind::FindallEnd { result, cont } => {
                    let items = self.collectors.pop().unwrap_or_default();
                    let imported: Vec<Term> = items
                        .into_iter()
                        .map(|(t, n)| self.store.import(&t, n))
                        .collect();
                    let list = Term::list(imported);
                    if self.store.unify(&result, &list) {
                        self.cont = cont;
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Lazy answer stream over a plain program.
pub struct Solutions {
    solver: Solver<'static>,
}

impl Solutions {
    pub fn log(&self) -> &[String] {
        self.solver.log()
    }

    pub fn steps(&self) -> u64 {
        self.solver.steps()
    }
}

impl Iterator for Solutions {
    type Item = Result<Answer, EngineError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.solver.next_answer().transpose()
    }
}

/// Enumerates the answers of `goal` against `program` in Prolog order.
pub fn solve(program: &Program, goal: &Term, config: EngineConfig) -> Solutions {
    solve_in(Arc::new(Database::new(program)), goal, config)
}

pub(crate) fn solve_in(db: Arc<Database>, goal: &Term, config: EngineConfig) -> Solutions {
    let mut solver = Solver::new(db, config, None);
    solver.query(goal);
    Solutions { solver }
}

/// All answers and the final side-effect log.
pub fn solve_all(
    program: &Program,
    goal: &Term,
    config: EngineConfig,
) -> Result<(Vec<Answer>, Vec<String>), EngineError> {
    let mut sols = solve(program, goal, config);
    let mut answers = Vec::new();
    for a in sols.by_ref() {
        answers.push(a?);
    }
    Ok((answers, sols.log().to_vec()))
}
