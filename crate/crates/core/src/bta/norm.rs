use std::fmt;
use std::str::FromStr;

use crate::binding_types::BindingType;
use crate::term::{atoms, Term, Var};

/// A size measure on terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Norm {
    /// Number of cells on the list spine; anything that is not a list has
    /// size 0.
    ListLength,
    /// Number of non-variable nodes.
    TermSize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown norm `{0}` (expected listlength or termsize)")]
pub struct UnknownNorm(pub String);

impl FromStr for Norm {
    type Err = UnknownNorm;

    fn from_str(s: &str) -> Result<Norm, UnknownNorm> {
        match s {
            "listlength" => Ok(Norm::ListLength),
            "termsize" => Ok(Norm::TermSize),
            _ => Err(UnknownNorm(s.to_string())),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The size of a term as a constant plus the sizes of some of its variables,
/// counted with multiplicity. It is exact for every instance of the term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linear {
    pub constant: u64,
    /// Sorted.
    pub vars: Vec<Var>,
}

impl Linear {
    /// `‖other‖ ≤ ‖self‖` under every instantiation; `Some(true)` when the
    /// decrease is strict.
    pub fn bounds(&self, other: &Linear) -> Option<bool> {
        let mut mine = self.vars.iter().peekable();
        for v in &other.vars {
            loop {
                match mine.next() {
                    Some(w) if w == v => break,
                    Some(w) if w < v => continue,
                    _ => return None,
                }
            }
        }
        if other.constant <= self.constant {
            Some(other.constant < self.constant)
        } else {
            None
        }
    }
}

impl Norm {
    pub const ALL: [Norm; 2] = [Norm::ListLength, Norm::TermSize];

    pub fn name(self) -> &'static str {
        match self {
            Norm::ListLength => "listlength",
            Norm::TermSize => "termsize",
        }
    }

    pub fn size(self, t: &Term) -> u64 {
        self.linear(t).constant
    }

    /// The symbolic size of `t`.
    pub fn linear(self, t: &Term) -> Linear {
        let mut vars = Vec::new();
        let constant = match self {
            Norm::ListLength => {
                let mut n = 0;
                let mut cur = t;
                while cur.is_functor(atoms::DOT, 2) {
                    n += 1;
                    cur = cur.arg(1);
                }
                if let Some(v) = cur.as_var() {
                    vars.push(v);
                }
                n
            }
            Norm::TermSize => {
                let mut n = 0;
                let mut stack = vec![t];
                while let Some(s) = stack.pop() {
                    match s {
                        Term::Var(v) => vars.push(*v),
                        Term::Compound(c) => {
                            n += 1;
                            stack.extend(c.args.iter());
                        }
                        _ => n += 1,
                    }
                }
                n
            }
        };
        vars.sort();
        Linear { constant, vars }
    }

    /// The variables whose sizes the size of `t` depends on. `t` is rigid
    /// exactly when all of them are.
    pub fn rigid_vars(self, t: &Term) -> Vec<Var> {
        let mut vs = self.linear(t).vars;
        vs.dedup();
        vs
    }

    /// Whether `‖tθ‖ = ‖t‖` for every substitution θ.
    pub fn is_rigid(self, t: &Term) -> bool {
        self.linear(t).vars.is_empty()
    }

    /// The most general binding-type all of whose terms are rigid.
    pub fn rigid_type(self) -> BindingType {
        match self {
            Norm::ListLength => BindingType::list_of(BindingType::Dynamic),
            Norm::TermSize => BindingType::Static,
        }
    }

    /// Whether rigidity implies groundness.
    pub fn rigid_is_ground(self) -> bool {
        self == Norm::TermSize
    }
}
