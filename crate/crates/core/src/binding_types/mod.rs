//! Binding types, type definitions and divisions.
//!
//! A binding type describes how instantiated an argument is known to be at
//! specialisation time. `static` terms are ground, `nonvar` terms have a known
//! top functor, `dynamic` terms may be anything. Type constructors such as
//! `list(T)` describe skeletons whose leaves carry other binding types.

mod memo;
mod ops;

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::term::{atoms, render_term, Atom, PredKey, Term, Var};

pub use memo::{filter_atom, MemoEntry, MemoStatus, MemoTable};
pub use ops::{atom_safe, gen_atom, gen_term, judge, more_general_type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("no type definition for constructor {0}")]
    UnknownConstructor(String),
    #[error("not a binding type: {0}")]
    Malformed(String),
    #[error("binding type {0} mentions a type parameter")]
    NotGround(String),
    #[error("{term} is not of binding type {ty}")]
    NotSafe { term: String, ty: String },
    #[error("no division entry for {0}")]
    MissingDivision(PredKey),
    #[error("division for {pred} lists {given} types")]
    ArityMismatch { pred: PredKey, given: usize },
    #[error("conflicting division entries for {0}")]
    Conflict(PredKey),
    #[error("type constructor {0} is defined twice")]
    Redefined(String),
}

/// A binding type, or a type expression when it mentions parameters.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum BindingType {
    Static,
    Dynamic,
    Nonvar,
    /// Kept like `static` by generalisation, passed on like `dynamic` by filtering.
    Mix,
    /// A defined constructor applied to argument types, e.g. `list(dynamic)`.
    Ctor(Atom, Vec<BindingType>),
    /// An explicit functor with typed arguments.
    Struct(Atom, Vec<BindingType>),
    /// Either alternative; the left one is tried first.
    Or(Box<BindingType>, Box<BindingType>),
    /// The i-th parameter of the enclosing type definition.
    Param(usize),
}

impl BindingType {
    pub fn list_of(elem: BindingType) -> BindingType {
        BindingType::Ctor(Atom::new("list"), vec![elem])
    }

    pub fn is_ground(&self) -> bool {
        match self {
            BindingType::Param(_) => false,
            BindingType::Ctor(_, args) | BindingType::Struct(_, args) => {
                args.iter().all(BindingType::is_ground)
            }
            BindingType::Or(a, b) => a.is_ground() && b.is_ground(),
            _ => true,
        }
    }

    /// True for the two types a memo clause can generalise at cogen time.
    pub fn is_simple(&self) -> bool {
        matches!(self, BindingType::Static | BindingType::Dynamic)
    }

    /// Reads a binding-type term: `static`, `dynamic`, `nonvar`, `mix`, `free`
    /// (an alias of `dynamic`), `type(c(..))`, `struct(f,[..])`, `(T1 ; T2)`,
    /// or a bare constructor application such as `list(dynamic)`.
    pub fn from_term(t: &Term) -> Result<BindingType, TypeError> {
        Self::from_term_with(t, &[])
    }

    /// As [`BindingType::from_term`], with the given variables standing for
    /// type parameters.
    pub fn from_term_with(t: &Term, params: &[Var]) -> Result<BindingType, TypeError> {
        let malformed = || TypeError::Malformed(render_term(t));
        match t {
            Term::Var(v) => params
                .iter()
                .position(|p| p == v)
                .map(BindingType::Param)
                .ok_or_else(malformed),
            Term::Int(_) => Err(malformed()),
            Term::Atom(a) => Ok(match a.name() {
                "static" => BindingType::Static,
                "dynamic" | "free" => BindingType::Dynamic,
                "nonvar" => BindingType::Nonvar,
                "mix" => BindingType::Mix,
                _ => BindingType::Ctor(*a, Vec::new()),
            }),
            Term::Compound(c) => {
                let name = c.functor.name();
                match (name, c.args.len()) {
                    ("type", 1) => match &c.args[0] {
                        Term::Atom(a) => Ok(BindingType::Ctor(*a, Vec::new())),
                        Term::Compound(k) => Ok(BindingType::Ctor(
                            k.functor,
                            k.args
                                .iter()
                                .map(|a| Self::from_term_with(a, params))
                                .collect::<Result<_, _>>()?,
                        )),
                        _ => Err(malformed()),
                    },
                    ("struct", 2) => {
                        let f = c.args[0].as_atom().ok_or_else(malformed)?;
                        let items = c.args[1].as_list().ok_or_else(malformed)?;
                        Ok(BindingType::Struct(
                            f,
                            items
                                .into_iter()
                                .map(|a| Self::from_term_with(a, params))
                                .collect::<Result<_, _>>()?,
                        ))
                    }
                    (";", 2) => Ok(BindingType::Or(
                        Box::new(Self::from_term_with(&c.args[0], params)?),
                        Box::new(Self::from_term_with(&c.args[1], params)?),
                    )),
                    _ => Ok(BindingType::Ctor(
                        c.functor,
                        c.args
                            .iter()
                            .map(|a| Self::from_term_with(a, params))
                            .collect::<Result<_, _>>()?,
                    )),
                }
            }
        }
    }

    /// The term form used in annotated files. Constructors are written
    /// `type(c(..))`.
    pub fn to_term(&self) -> Term {
        match self {
            BindingType::Static => Term::atom("static"),
            BindingType::Dynamic => Term::atom("dynamic"),
            BindingType::Nonvar => Term::atom("nonvar"),
            BindingType::Mix => Term::atom("mix"),
            BindingType::Ctor(c, args) => Term::app(
                "type",
                vec![Term::compound(
                    *c,
                    args.iter().map(BindingType::to_term).collect(),
                )],
            ),
            BindingType::Struct(f, args) => Term::app(
                "struct",
                vec![
                    Term::Atom(*f),
                    Term::list(args.iter().map(BindingType::to_term)),
                ],
            ),
            BindingType::Or(a, b) => Term::pair(atoms::SEMI, a.to_term(), b.to_term()),
            BindingType::Param(i) => Term::var(*i as u32),
        }
    }

    /// Replaces parameters by the given types.
    pub(crate) fn instantiate(&self, actuals: &[BindingType]) -> BindingType {
        match self {
            BindingType::Param(i) => actuals.get(*i).cloned().unwrap_or(BindingType::Dynamic),
            BindingType::Ctor(c, args) => {
                BindingType::Ctor(*c, args.iter().map(|a| a.instantiate(actuals)).collect())
            }
            BindingType::Struct(f, args) => {
                BindingType::Struct(*f, args.iter().map(|a| a.instantiate(actuals)).collect())
            }
            BindingType::Or(a, b) => BindingType::Or(
                Box::new(a.instantiate(actuals)),
                Box::new(b.instantiate(actuals)),
            ),
            other => other.clone(),
        }
    }
}

impl fmt::Display for BindingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(&self.to_term()))
    }
}

/// One alternative `f(τ1,..,τn)` of a type definition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alternative {
    pub functor: Atom,
    pub args: Vec<BindingType>,
}

/// `c(V1,..,Vk) ---> f1(..) ; .. ; fm(..)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TypeDefinition {
    pub name: Atom,
    pub arity: usize,
    pub alternatives: Vec<Alternative>,
}

impl TypeDefinition {
    /// Reads `c(V..) ---> alt ; alt ...` (or with `-->`).
    pub fn from_term(t: &Term) -> Result<TypeDefinition, TypeError> {
        let malformed = || TypeError::Malformed(render_term(t));
        let arrow_ok = t
            .functor()
            .is_some_and(|(f, n)| n == 2 && (f == atoms::TYPE_ARROW || f == atoms::DCG_ARROW));
        if !arrow_ok {
            return Err(malformed());
        }
        let head = t.arg(0);
        let (name, params) = match head {
            Term::Atom(a) => (*a, Vec::new()),
            Term::Compound(c) => {
                let ps: Option<Vec<Var>> = c.args.iter().map(Term::as_var).collect();
                let ps = ps.ok_or_else(malformed)?;
                (c.functor, ps)
            }
            _ => return Err(malformed()),
        };
        let mut alternatives = Vec::new();
        let mut rest = t.arg(1);
        loop {
            let (alt, next) = if rest.is_functor(atoms::SEMI, 2) {
                (rest.arg(0), Some(rest.arg(1)))
            } else {
                (rest, None)
            };
            let (functor, args) = match alt {
                Term::Atom(a) => (*a, Vec::new()),
                Term::Compound(c) => (
                    c.functor,
                    c.args
                        .iter()
                        .map(|a| BindingType::from_term_with(a, &params))
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                _ => return Err(malformed()),
            };
            if alternatives
                .iter()
                .any(|a: &Alternative| a.functor == functor && a.args.len() == args.len())
            {
                return Err(malformed());
            }
            alternatives.push(Alternative { functor, args });
            match next {
                Some(n) => rest = n,
                None => break,
            }
        }
        Ok(TypeDefinition {
            name,
            arity: params.len(),
            alternatives,
        })
    }

    /// Renders the definition as a term `c(A,..) ---> ..`.
    pub fn to_term(&self) -> Term {
        let head = Term::compound(self.name, (0..self.arity as u32).map(Term::var).collect());
        let alts: Vec<Term> = self
            .alternatives
            .iter()
            .map(|a| Term::compound(a.functor, a.args.iter().map(param_term).collect()))
            .collect();
        let body = alts
            .into_iter()
            .rev()
            .reduce(|acc, alt| Term::pair(atoms::SEMI, alt, acc))
            .unwrap_or_else(Term::fail);
        Term::pair(atoms::TYPE_ARROW, head, body)
    }
}

/// Inside definitions constructors are written bare, e.g. `[T|list(T)]`.
fn param_term(t: &BindingType) -> Term {
    match t {
        BindingType::Ctor(c, args) => Term::compound(*c, args.iter().map(param_term).collect()),
        other => other.to_term(),
    }
}

/// The known type constructors. `list/1` is always present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeSystem {
    defs: IndexMap<Atom, TypeDefinition>,
}

impl Default for TypeSystem {
    fn default() -> Self {
        TypeSystem::new()
    }
}

impl TypeSystem {
    pub fn new() -> TypeSystem {
        let t = BindingType::Param(0);
        let list = TypeDefinition {
            name: Atom::new("list"),
            arity: 1,
            alternatives: vec![
                Alternative {
                    functor: atoms::NIL,
                    args: Vec::new(),
                },
                Alternative {
                    functor: atoms::DOT,
                    args: vec![t.clone(), BindingType::Ctor(Atom::new("list"), vec![t])],
                },
            ],
        };
        let mut defs = IndexMap::new();
        defs.insert(list.name, list);
        TypeSystem { defs }
    }

    /// Adds a definition. Repeating an identical definition is allowed.
    pub fn define(&mut self, def: TypeDefinition) -> Result<(), TypeError> {
        match self.defs.get(&def.name) {
            Some(old) if *old == def => Ok(()),
            Some(_) => Err(TypeError::Redefined(def.name.name().to_string())),
            None => {
                self.defs.insert(def.name, def);
                Ok(())
            }
        }
    }

    pub fn get(&self, name: Atom) -> Option<&TypeDefinition> {
        self.defs.get(&name)
    }

    /// Definitions other than the preloaded list type, in definition order.
    pub fn user_definitions(&self) -> impl Iterator<Item = &TypeDefinition> {
        self.defs.values().skip(1)
    }

    /// Checks that every constructor in `ty` is defined with matching arity.
    pub fn check(&self, ty: &BindingType) -> Result<(), TypeError> {
        match ty {
            BindingType::Ctor(c, args) => {
                let def = self
                    .get(*c)
                    .filter(|d| d.arity == args.len())
                    .ok_or_else(|| {
                        TypeError::UnknownConstructor(format!("{}/{}", c, args.len()))
                    })?;
                let _ = def;
                args.iter().try_for_each(|a| self.check(a))
            }
            BindingType::Struct(_, args) => args.iter().try_for_each(|a| self.check(a)),
            BindingType::Or(a, b) => {
                self.check(a)?;
                self.check(b)
            }
            BindingType::Param(_) => Err(TypeError::NotGround(ty.to_string())),
            _ => Ok(()),
        }
    }

    /// The alternatives of constructor `c` with its parameters replaced.
    pub(crate) fn unfold(
        &self,
        c: Atom,
        actuals: &[BindingType],
    ) -> Result<Vec<Alternative>, TypeError> {
        let def = self
            .get(c)
            .filter(|d| d.arity == actuals.len())
            .ok_or_else(|| TypeError::UnknownConstructor(format!("{}/{}", c, actuals.len())))?;
        Ok(def
            .alternatives
            .iter()
            .map(|a| Alternative {
                functor: a.functor,
                args: a.args.iter().map(|t| t.instantiate(actuals)).collect(),
            })
            .collect())
    }
}

/// A monovariant division: one list of argument types per predicate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Division {
    entries: IndexMap<PredKey, Vec<BindingType>>,
}

impl Division {
    pub fn new() -> Division {
        Division::default()
    }

    /// Adds an entry. Re-adding the same entry is a no-op; a different one is
    /// a conflict.
    pub fn insert(&mut self, pred: PredKey, types: Vec<BindingType>) -> Result<(), TypeError> {
        if types.len() != pred.arity {
            return Err(TypeError::ArityMismatch {
                pred,
                given: types.len(),
            });
        }
        if let Some(t) = types.iter().find(|t| !t.is_ground()) {
            return Err(TypeError::NotGround(t.to_string()));
        }
        match self.entries.get(&pred) {
            Some(old) if *old == types => Ok(()),
            Some(_) => Err(TypeError::Conflict(pred)),
            None => {
                self.entries.insert(pred, types);
                Ok(())
            }
        }
    }

    pub fn get(&self, pred: PredKey) -> Option<&[BindingType]> {
        self.entries.get(&pred).map(Vec::as_slice)
    }

    pub fn contains(&self, pred: PredKey) -> bool {
        self.entries.contains_key(&pred)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PredKey, &Vec<BindingType>)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every argument of `pred` is `static` or `dynamic`.
    pub fn is_simple(&self, pred: PredKey) -> bool {
        self.get(pred)
            .is_some_and(|ts| ts.iter().all(BindingType::is_simple))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn ty(s: &str) -> BindingType {
        BindingType::from_term(&parse_term(s).unwrap().term).unwrap()
    }

    #[test]
    fn reads_all_binding_type_forms() {
        assert_eq!(ty("free"), BindingType::Dynamic);
        assert_eq!(
            ty("type(list(type(list(dynamic))))"),
            ty("list(list(dynamic))")
        );
        assert_eq!(
            ty("(struct('[]',[]) ; struct('.',[type(list(dynamic)),type(list(dynamic))]))"),
            BindingType::Or(
                Box::new(BindingType::Struct(atoms::NIL, vec![])),
                Box::new(BindingType::Struct(
                    atoms::DOT,
                    vec![
                        BindingType::list_of(BindingType::Dynamic),
                        BindingType::list_of(BindingType::Dynamic)
                    ]
                ))
            )
        );
        assert_eq!(ty("list(static)").to_string(), "type(list(static))");
    }

    #[test]
    fn type_definitions_round_trip() {
        let t = parse_term("list(T) ---> [] ; [T|list(T)]").unwrap().term;
        let def = TypeDefinition::from_term(&t).unwrap();
        assert_eq!(&def, TypeSystem::new().get(Atom::new("list")).unwrap());
        assert_eq!(TypeDefinition::from_term(&def.to_term()).unwrap(), def);
        let arg1 = parse_term("arg1 --> [] ; [list(dynamic) | list(dynamic)]")
            .unwrap()
            .term;
        let mut ts = TypeSystem::new();
        ts.define(TypeDefinition::from_term(&arg1).unwrap())
            .unwrap();
        ts.define(def).unwrap();
        assert!(ts.check(&ty("arg1")).is_ok());
        assert!(ts.check(&ty("tree(static)")).is_err());
    }

    #[test]
    fn division_rejects_bad_entries() {
        let mut d = Division::new();
        let p = PredKey::new("p", 2);
        assert!(d.insert(p, vec![BindingType::Static]).is_err());
        d.insert(p, vec![BindingType::Static, BindingType::Dynamic])
            .unwrap();
        d.insert(p, vec![BindingType::Static, BindingType::Dynamic])
            .unwrap();
        assert_eq!(
            d.insert(p, vec![BindingType::Dynamic, BindingType::Dynamic]),
            Err(TypeError::Conflict(p))
        );
        assert!(d.is_simple(p));
    }
}
