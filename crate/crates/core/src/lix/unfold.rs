//! The annotation-driven unfolder.
//!
//! Bodies are run in continuation-passing style over a trailed binding store.
//! Each construct calls its continuation once per solution with the residual
//! code emitted so far, then undoes its own bindings. A continuation may ask
//! to stop the enumeration of an enclosing goal by returning
//! [`Flow::Cut`] with that goal's barrier number; this is how the first
//! solution of a conditional's test is committed to.

use std::rc::Rc;

use super::{code, LixError, Specialiser};
use crate::annotations::{mixline_kind, AnnBody, Mixline};
use crate::engine::{call_simple, EngineError};
use crate::term::{atoms, conj_list, normalise_body, render_term, PredKey, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Flow {
    More,
    Cut(usize),
}

pub(super) type Step = Result<Flow, LixError>;

pub(super) type Cont<'k, 'p> = &'k mut dyn FnMut(&mut Specialiser<'p>, &mut Vec<Term>) -> Step;

fn ite(c: Term, t: Term, e: Term) -> Term {
    Term::pair(atoms::SEMI, Term::pair(atoms::ARROW, c, t), e)
}

fn code_term(code: &[Term]) -> Term {
    conj_list(code.to_vec())
}

impl<'p> Specialiser<'p> {
    fn tick(&mut self) -> Result<(), LixError> {
        self.steps += 1;
        if self.steps > self.config.budget {
            let latest = self
                .memo
                .entries()
                .iter()
                .rev()
                .take(3)
                .map(|e| render_term(&e.pattern))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(LixError::Budget {
                budget: self.config.budget,
                entries: self.memo.len(),
                latest,
            });
        }
        Ok(())
    }

    fn barrier(&mut self) -> usize {
        self.next_cut += 1;
        self.next_cut
    }

    fn emit(&mut self, t: Term, code: &mut Vec<Term>, k: Cont<'_, 'p>) -> Step {
        let len = code.len();
        code.push(t);
        let r = k(self, code);
        code.truncate(len);
        r
    }

    /// Runs an annotated body.
    pub(super) fn body(&mut self, b: &AnnBody, code: &mut Vec<Term>, k: Cont<'_, 'p>) -> Step {
        match b {
            AnnBody::True => k(self, code),
            AnnBody::Conj(x, y) => self.body(x, code, &mut |s, code| s.body(y, code, &mut *k)),
            AnnBody::Unfold(g) => self.unfold(g, code, k),
            AnnBody::Memo(g) => {
                let a = self.store.resolve(g);
                let f = self.memoise(&a)?;
                self.emit(f, code, k)
            }
            AnnBody::Call(g) => self.exec(g, code, k),
            AnnBody::Rescall(g) => self.emit(g.clone(), code, k),
            AnnBody::Semicall(g) => match mixline_kind(g) {
                Some(Mixline::Varlike) => {
                    self.exec(g, code, &mut |s, code| s.emit(g.clone(), code, &mut *k))
                }
                Some(Mixline::Groundlike) => {
                    let emitted = if self.succeeds(g)? {
                        Term::truth()
                    } else {
                        g.clone()
                    };
                    self.emit(emitted, code, k)
                }
                None => self.emit(g.clone(), code, k),
            },
            AnnBody::Ucall(g) => {
                let g = self.callable(g)?;
                self.unfold(&g, code, k)
            }
            AnnBody::Mcall(g) => {
                let g = self.callable(g)?;
                let f = self.memoise(&g)?;
                self.emit(f, code, k)
            }
            AnnBody::If(c, t, e) => {
                let id = self.barrier();
                let mut found = false;
                let len = code.len();
                let r = self.body(c, code, &mut |s, code| {
                    found = true;
                    // The test's own residual code is dropped.
                    let test_code = code.split_off(len);
                    let r = s.body(t, code, &mut *k);
                    code.extend(test_code);
                    match r? {
                        Flow::More => Ok(Flow::Cut(id)),
                        other => Ok(other),
                    }
                })?;
                match r {
                    Flow::Cut(x) if x == id => Ok(Flow::More),
                    Flow::Cut(x) => Ok(Flow::Cut(x)),
                    Flow::More if found => Ok(Flow::More),
                    Flow::More => self.body(e, code, k),
                }
            }
            AnnBody::Resif(c, t, e) => self.body(c, &mut Vec::new(), &mut |s, cc| {
                let ct = code_term(cc);
                s.body(t, &mut Vec::new(), &mut |s, tc| {
                    let tt = code_term(tc);
                    s.body(e, &mut Vec::new(), &mut |s, ec| {
                        s.emit(ite(ct.clone(), tt.clone(), code_term(ec)), code, &mut *k)
                    })
                })
            }),
            AnnBody::Semif(c, t, e) => self.body(c, &mut Vec::new(), &mut |s, cc| {
                let test = normalise_body(&s.store.resolve(&code_term(cc)));
                if test.is_atom(atoms::TRUE) {
                    s.body(t, code, &mut *k)
                } else if test.is_atom(atoms::FAIL) {
                    s.body(e, code, &mut *k)
                } else {
                    s.body(t, &mut Vec::new(), &mut |s, tc| {
                        let tt = code_term(tc);
                        s.body(e, &mut Vec::new(), &mut |s, ec| {
                            s.emit(ite(test.clone(), tt.clone(), code_term(ec)), code, &mut *k)
                        })
                    })
                }
            }),
            AnnBody::Not(x) => {
                let id = self.barrier();
                let mut found = false;
                let r = self.body(x, &mut Vec::new(), &mut |_, _| {
                    found = true;
                    Ok(Flow::Cut(id))
                })?;
                match r {
                    Flow::Cut(x) if x != id => Ok(Flow::Cut(x)),
                    _ if found => Ok(Flow::More),
                    _ => k(self, code),
                }
            }
            AnnBody::Resnot(x) => self.body(x, &mut Vec::new(), &mut |s, xc| {
                let n = Term::compound(atoms::NOT_PROVABLE, vec![code_term(xc)]);
                s.emit(n, code, &mut *k)
            }),
            AnnBody::Disj(x, y) => match self.body(x, code, k)? {
                Flow::More => self.body(y, code, k),
                cut => Ok(cut),
            },
            AnnBody::Resdisj(x, y) => self.body(x, &mut Vec::new(), &mut |s, xc| {
                let xt = code_term(xc);
                s.body(y, &mut Vec::new(), &mut |s, yc| {
                    s.emit(
                        Term::pair(atoms::SEMI, xt.clone(), code_term(yc)),
                        code,
                        &mut *k,
                    )
                })
            }),
            AnnBody::HideNf(x) => self.hide(x, false, code, k),
            AnnBody::Hide(x) => self.hide(x, true, code, k),
        }
    }

    /// Collects every solution of `x` without letting its bindings escape
    /// and emits their disjunction. With `nonempty`, no solutions is failure.
    fn hide(&mut self, x: &AnnBody, nonempty: bool, code: &mut Vec<Term>, k: Cont<'_, 'p>) -> Step {
        let vars = code::varlist(&self.store.resolve(&x.to_term()));
        let mut sols = Vec::new();
        self.body(x, &mut Vec::new(), &mut |s, xc| {
            let found = Term::pair(
                atoms::COMMA,
                normalise_body(&code_term(xc)),
                Term::list(vars.iter().cloned()),
            );
            let (copy, n) = s.store.export(&found);
            let copy = s.store.import(&copy, n);
            let values = copy
                .arg(1)
                .as_list()
                .expect("list of values")
                .into_iter()
                .cloned()
                .collect();
            sols.push((copy.arg(0).clone(), values));
            Ok(Flow::More)
        })?;
        if nonempty && sols.is_empty() {
            return Ok(Flow::More);
        }
        let vars: Vec<Term> = vars.iter().map(|v| self.store.resolve(v)).collect();
        let d = code::make_disjunction(&sols, &vars);
        self.emit(d, code, k)
    }

    fn callable(&self, g: &Term) -> Result<Term, LixError> {
        let g = self.store.resolve(g);
        if g.is_callable() {
            Ok(g)
        } else {
            Err(LixError::Instantiation(render_term(&g)))
        }
    }

    /// Unfolds an atom against its annotated clauses, in order.
    pub(super) fn unfold(&mut self, g: &Term, code: &mut Vec<Term>, k: Cont<'_, 'p>) -> Step {
        self.tick()?;
        let g = self.store.deref(g);
        let Some(key) = g.pred_key() else {
            return Err(LixError::Instantiation(render_term(
                &self.store.resolve(&g),
            )));
        };
        let Some(clauses) = self.clauses.get(&key).map(Rc::clone) else {
            return Err(LixError::Undefined(key));
        };
        for c in clauses.iter() {
            let mark = self.store.mark();
            let base = self.store.alloc(c.nvars);
            let head = c.head.offset_vars(base);
            let r = if self.store.unify(&head, &g) {
                let body = c.body.map_terms(&mut |t| t.offset_vars(base));
                self.body(&body, code, k)
            } else {
                Ok(Flow::More)
            };
            self.store.undo_bindings(mark);
            match r? {
                Flow::More => {}
                cut => return Ok(cut),
            }
        }
        Ok(Flow::More)
    }

    /// Does `g` have a solution? Bindings are undone either way.
    fn succeeds(&mut self, g: &Term) -> Result<bool, LixError> {
        let id = self.barrier();
        let mut found = false;
        self.exec(g, &mut Vec::new(), &mut |_, _| {
            found = true;
            Ok(Flow::Cut(id))
        })?;
        Ok(found)
    }

    /// Executes a plain goal built from builtins, as the engine would.
    pub(super) fn exec(&mut self, g: &Term, code: &mut Vec<Term>, k: Cont<'_, 'p>) -> Step {
        self.tick()?;
        let g = self.store.deref(g);
        let Some((f, n)) = g.functor() else {
            return Err(match g {
                Term::Var(_) => LixError::Instantiation("call/1".into()),
                other => EngineError::Type {
                    context: "call/1".into(),
                    expected: "callable",
                    found: render_term(&other),
                }
                .into(),
            });
        };
        let args = g.args();
        match (f, n) {
            (f, 2) if f == atoms::COMMA => {
                let (x, y) = (args[0].clone(), args[1].clone());
                self.exec(&x, code, &mut |s, code| s.exec(&y, code, &mut *k))
            }
            (f, 2) if f == atoms::SEMI => {
                let left = self.store.deref(&args[0]);
                if left.is_functor(atoms::ARROW, 2) {
                    self.exec_ite(left.arg(0), left.arg(1), Some(&args[1]), code, k)
                } else {
                    match self.exec(&args[0], code, k)? {
                        Flow::More => self.exec(&args[1], code, k),
                        cut => Ok(cut),
                    }
                }
            }
            (f, 2) if f == atoms::ARROW => self.exec_ite(&args[0], &args[1], None, code, k),
            (f, 1) if f == atoms::NOT_PROVABLE || f == atoms::NOT => {
                if self.succeeds(&args[0])? {
                    Ok(Flow::More)
                } else {
                    k(self, code)
                }
            }
            (f, n) if f == atoms::CALL && n >= 1 => {
                let target = self.store.deref(&args[0]);
                let goal = match target.functor() {
                    _ if n == 1 => target,
                    Some((h, _)) => {
                        let mut all = target.args().to_vec();
                        all.extend_from_slice(&args[1..]);
                        Term::compound(h, all)
                    }
                    None => {
                        return Err(LixError::Instantiation(render_term(
                            &self.store.resolve(&g),
                        )))
                    }
                };
                self.exec(&goal, code, k)
            }
            (f, 3) if f == atoms::FINDALL => {
                let (template, goal) = (args[0].clone(), args[1].clone());
                let mut found = Vec::new();
                self.exec(&goal, &mut Vec::new(), &mut |s, _| {
                    let (copy, n) = s.store.export(&template);
                    found.push((copy, n));
                    Ok(Flow::More)
                })?;
                let items: Vec<Term> = found
                    .into_iter()
                    .map(|(t, n)| self.store.import(&t, n))
                    .collect();
                let mark = self.store.mark();
                let r = if self.store.unify(&Term::list(items), &args[2]) {
                    k(self, code)
                } else {
                    Ok(Flow::More)
                };
                self.store.undo_bindings(mark);
                r
            }
            _ => {
                let mark = self.store.mark();
                let ok = call_simple(&mut self.store, f, args, &mut self.log)?;
                let r = match ok {
                    Some(true) => k(self, code),
                    Some(false) => Ok(Flow::More),
                    None => Err(EngineError::Existence(PredKey { name: f, arity: n }).into()),
                };
                self.store.undo_bindings(mark);
                r
            }
        }
    }

    fn exec_ite(
        &mut self,
        c: &Term,
        t: &Term,
        e: Option<&Term>,
        code: &mut Vec<Term>,
        k: Cont<'_, 'p>,
    ) -> Step {
        let id = self.barrier();
        let mut found = false;
        let r = self.exec(c, code, &mut |s, code| {
            found = true;
            match s.exec(t, code, &mut *k)? {
                Flow::More => Ok(Flow::Cut(id)),
                other => Ok(other),
            }
        })?;
        match r {
            Flow::Cut(x) if x == id => Ok(Flow::More),
            Flow::Cut(x) => Ok(Flow::Cut(x)),
            Flow::More if found => Ok(Flow::More),
            Flow::More => match e {
                Some(e) => self.exec(e, code, k),
                None => Ok(Flow::More),
            },
        }
    }
}
