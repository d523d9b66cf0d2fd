use super::add_extra_argument;
use crate::annotations::{mixline_kind, AnnBody, Mixline};
use crate::term::{atoms, normalise_body, Term};

/// An annotated body `source` translated into the goal `goal` the generating
/// extension runs and the term `residual` that is the code it leaves behind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyTranslation {
    pub source: AnnBody,
    pub goal: Term,
    pub residual: Term,
}

/// Translates an annotated body. New variables are numbered from `*next`.
pub fn translate_body(b: &AnnBody, next: &mut u32) -> BodyTranslation {
    let (goal, residual) = Translator { next }.body(b);
    BodyTranslation {
        source: b.clone(),
        goal,
        residual,
    }
}

struct Translator<'a> {
    next: &'a mut u32,
}

fn and(a: Term, b: Term) -> Term {
    Term::pair(atoms::COMMA, a, b)
}

fn eq(a: Term, b: Term) -> Term {
    Term::pair(atoms::EQ, a, b)
}

fn ite(c: Term, t: Term, e: Term) -> Term {
    Term::pair(atoms::SEMI, Term::pair(atoms::ARROW, c, t), e)
}

/// `(h, t)` unless `h` is `true`.
fn filter_cons(h: Term, t: Term) -> Term {
    if h.is_atom(atoms::TRUE) {
        t
    } else {
        and(h, t)
    }
}

impl Translator<'_> {
    fn fresh(&mut self) -> Term {
        let v = Term::var(*self.next);
        *self.next += 1;
        v
    }

    fn body(&mut self, b: &AnnBody) -> (Term, Term) {
        match b {
            AnnBody::True => (Term::truth(), Term::truth()),
            AnnBody::Conj(x, y) => {
                let (gx, sx) = self.body(x);
                let (gy, sy) = self.body(y);
                (filter_cons(gx, gy), filter_cons(sx, sy))
            }
            AnnBody::Unfold(g) => self.extra("_u", g),
            AnnBody::Memo(g) => self.extra("_m", g),
            AnnBody::Call(g) => (g.clone(), Term::truth()),
            AnnBody::Rescall(g) => (Term::truth(), g.clone()),
            AnnBody::Semicall(g) => match mixline_kind(g) {
                Some(Mixline::Varlike) => (g.clone(), g.clone()),
                Some(Mixline::Groundlike) => {
                    let c = self.fresh();
                    (
                        ite(
                            g.clone(),
                            eq(c.clone(), Term::truth()),
                            eq(c.clone(), g.clone()),
                        ),
                        c,
                    )
                }
                None => (Term::truth(), g.clone()),
            },
            AnnBody::Ucall(g) => self.dynamic_extra("_u", g),
            AnnBody::Mcall(g) => self.dynamic_extra("_m", g),
            AnnBody::If(x, y, z) => {
                let (gx, _) = self.body(x);
                let (gy, sy) = self.body(y);
                let (gz, sz) = self.body(z);
                let v = self.fresh();
                (
                    ite(gx, and(gy, eq(v.clone(), sy)), and(gz, eq(v.clone(), sz))),
                    v,
                )
            }
            AnnBody::Resif(x, y, z) => {
                let (gx, sx) = self.body(x);
                let (gy, sy) = self.body(y);
                let (gz, sz) = self.body(z);
                (and(gx, and(gy, gz)), ite(sx, sy, sz))
            }
            AnnBody::Semif(x, y, z) => {
                let (gx, sx) = self.body(x);
                let (gy, sy) = self.body(y);
                let (gz, sz) = self.body(z);
                let flat = self.fresh();
                let spec = self.fresh();
                let test = |v: &Term, a| Term::pair(atoms::IDENTICAL, v.clone(), Term::atom(a));
                let both = and(
                    gy.clone(),
                    and(
                        gz.clone(),
                        eq(spec.clone(), ite(flat.clone(), sy.clone(), sz.clone())),
                    ),
                );
                let choose = ite(
                    test(&flat, "true"),
                    and(gy, eq(spec.clone(), sy)),
                    ite(test(&flat, "fail"), and(gz, eq(spec.clone(), sz)), both),
                );
                let goal = and(gx, and(Term::app("flatten", vec![sx, flat]), choose));
                (goal, spec)
            }
            AnnBody::Not(x) => {
                let (gx, _) = self.body(x);
                (Term::compound(atoms::NOT_PROVABLE, vec![gx]), Term::truth())
            }
            AnnBody::Resnot(x) => {
                let (gx, sx) = self.body(x);
                (gx, Term::compound(atoms::NOT_PROVABLE, vec![sx]))
            }
            AnnBody::Disj(x, y) => {
                let (gx, sx) = self.body(x);
                let (gy, sy) = self.body(y);
                let v = self.fresh();
                (
                    Term::pair(
                        atoms::SEMI,
                        and(gx, eq(v.clone(), sx)),
                        and(gy, eq(v.clone(), sy)),
                    ),
                    v,
                )
            }
            AnnBody::Resdisj(x, y) => {
                let (gx, sx) = self.body(x);
                let (gy, sy) = self.body(y);
                (and(gx, gy), Term::pair(atoms::SEMI, sx, sy))
            }
            AnnBody::HideNf(x) => self.hide(x, false),
            AnnBody::Hide(x) => self.hide(x, true),
        }
    }

    fn extra(&mut self, suffix: &str, g: &Term) -> (Term, Term) {
        let c = self.fresh();
        match add_extra_argument(suffix, g, c.clone()) {
            Some(call) => (call, c),
            // A variable in an unfold or memo position is only known at
            // specialisation time.
            None => self.dynamic_extra(suffix, g),
        }
    }

    fn dynamic_extra(&mut self, suffix: &str, g: &Term) -> (Term, Term) {
        let v = self.fresh();
        let r = self.fresh();
        let goal = and(
            Term::app(
                "add_extra_argument",
                vec![Term::atom(suffix), g.clone(), v.clone(), r.clone()],
            ),
            Term::compound(atoms::CALL, vec![r]),
        );
        (goal, v)
    }

    fn hide(&mut self, x: &AnnBody, nonempty: bool) -> (Term, Term) {
        let (gx, sx) = self.body(x);
        let vars = self.fresh();
        let all = self.fresh();
        let code = self.fresh();
        let mut goals = vec![
            Term::app("varlist", vec![x.to_term(), vars.clone()]),
            Term::compound(
                atoms::FINDALL,
                vec![
                    and(normalise_body(&sx), vars.clone()),
                    normalise_body(&gx),
                    all.clone(),
                ],
            ),
        ];
        if nonempty {
            let (h, t) = (self.fresh(), self.fresh());
            goals.push(eq(all.clone(), Term::cons(h, t)));
        }
        goals.push(Term::app("make_disjunction", vec![all, vars, code.clone()]));
        (crate::term::conj_list(goals), code)
    }
}
