use super::arith::eval;
use super::store::Store;
use super::EngineError;
use crate::term::{atoms, render_term, Atom, PredKey, Term};

/// Builtins available to every program, as `(name, arity)`.
///
/// Control constructs (`,`, `;`, `->`, `\+`, `not`, `call`, `findall`) are
/// executed by the machine itself; the rest are deterministic tests and
/// constructors handled in [`call_simple`].
pub const CORE_BUILTINS: &[(&str, usize)] = &[
    ("true", 0),
    ("fail", 0),
    ("false", 0),
    (",", 2),
    (";", 2),
    ("->", 2),
    ("\\+", 1),
    ("not", 1),
    ("call", 1),
    ("findall", 3),
    ("=", 2),
    ("\\=", 2),
    ("==", 2),
    ("\\==", 2),
    ("is", 2),
    ("<", 2),
    ("=<", 2),
    (">", 2),
    (">=", 2),
    ("=:=", 2),
    ("=\\=", 2),
    ("=..", 2),
    ("var", 1),
    ("nonvar", 1),
    ("ground", 1),
    ("atom", 1),
    ("integer", 1),
    ("copy_term", 2),
    ("arg", 3),
    ("print", 1),
];

pub fn is_core_builtin(key: PredKey) -> bool {
    let name = key.name.name();
    CORE_BUILTINS
        .iter()
        .any(|(n, a)| *n == name && *a == key.arity)
        || (name == "call" && key.arity >= 1)
}

fn type_error(context: &str, expected: &'static str, found: &Term, store: &Store) -> EngineError {
    EngineError::Type {
        context: context.to_string(),
        expected,
        found: render_term(&store.resolve(found)),
    }
}

/// Runs a deterministic builtin. Returns `None` when `name/arity` is not one.
pub(crate) fn call_simple(
    store: &mut Store,
    name: Atom,
    args: &[Term],
    log: &mut Vec<String>,
) -> Result<Option<bool>, EngineError> {
    let ok = match (name, args.len()) {
        (n, 0) if n == atoms::TRUE => true,
        (n, 0) if n == atoms::FAIL || n == atoms::FALSE => false,
        (n, 2) if n == atoms::EQ => store.unify(&args[0], &args[1]),
        (n, 2) if n == atoms::NEQ => {
            let m = store.mark();
            let unifies = store.unify(&args[0], &args[1]);
            store.undo_bindings(m);
            !unifies
        }
        (n, 2) if n == atoms::IDENTICAL => store.identical(&args[0], &args[1]),
        (n, 2) if n == atoms::NOT_IDENTICAL => !store.identical(&args[0], &args[1]),
        (n, 2) if n == atoms::IS => {
            let v = eval(store, &args[1], "is/2")?;
            store.unify(&args[0], &Term::Int(v))
        }
        (n, 2) if n == atoms::LT => compare(store, args, "</2")? < 0,
        (n, 2) if n == atoms::LE => compare(store, args, "=</2")? <= 0,
        (n, 2) if n == atoms::GT => compare(store, args, ">/2")? > 0,
        (n, 2) if n == atoms::GE => compare(store, args, ">=/2")? >= 0,
        (n, 2) if n == atoms::ARITH_EQ => compare(store, args, "=:=/2")? == 0,
        (n, 2) if n == atoms::ARITH_NE => compare(store, args, "=\\=/2")? != 0,
        (n, 2) if n == atoms::UNIV => univ(store, &args[0], &args[1])?,
        (n, 1) if n == atoms::VAR => store.deref(&args[0]).is_var(),
        (n, 1) if n == atoms::NONVAR => !store.deref(&args[0]).is_var(),
        (n, 1) if n == atoms::GROUND => store.is_ground(&args[0]),
        (n, 1) if n == atoms::ATOM => matches!(store.deref(&args[0]), Term::Atom(_)),
        (n, 1) if n == atoms::INTEGER => matches!(store.deref(&args[0]), Term::Int(_)),
        (n, 2) if n == atoms::COPY_TERM => {
            let (copy, k) = store.export(&args[0]);
            let fresh = store.import(&copy, k);
            store.unify(&fresh, &args[1])
        }
        (n, 3) if n == atoms::ARG => arg(store, args)?,
        (n, 1) if n == atoms::PRINT => {
            log.push(render_term(&store.resolve(&args[0])));
            true
        }
        _ => return Ok(None),
    };
    Ok(Some(ok))
}

fn compare(store: &Store, args: &[Term], context: &str) -> Result<i64, EngineError> {
    let x = eval(store, &args[0], context)?;
    let y = eval(store, &args[1], context)?;
    Ok(match x.cmp(&y) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    })
}

fn univ(store: &mut Store, t: &Term, l: &Term) -> Result<bool, EngineError> {
    match store.deref(t) {
        Term::Var(_) => {
            let list = store.resolve(l);
            let Some(items) = list.as_list() else {
                return Err(EngineError::Instantiation("=../2".to_string()));
            };
            let Some((first, rest)) = items.split_first() else {
                return Err(type_error("=../2", "non-empty list", &list, store));
            };
            let built = match first {
                Term::Atom(f) => Term::compound(*f, rest.iter().map(|t| (*t).clone()).collect()),
                Term::Int(_) if rest.is_empty() => (*first).clone(),
                Term::Var(_) => return Err(EngineError::Instantiation("=../2".to_string())),
                other => return Err(type_error("=../2", "atom", other, store)),
            };
            Ok(store.unify(t, &built))
        }
        Term::Compound(c) => {
            let list =
                Term::list(std::iter::once(Term::Atom(c.functor)).chain(c.args.iter().cloned()));
            Ok(store.unify(&list, l))
        }
        atomic => Ok(store.unify(&Term::list(vec![atomic]), l)),
    }
}

fn arg(store: &mut Store, args: &[Term]) -> Result<bool, EngineError> {
    let n = match store.deref(&args[0]) {
        Term::Int(n) => n,
        Term::Var(_) => return Err(EngineError::Instantiation("arg/3".to_string())),
        other => return Err(type_error("arg/3", "integer", &other, store)),
    };
    match store.deref(&args[1]) {
        Term::Compound(c) => {
            if n >= 1 && (n as usize) <= c.args.len() {
                let a = c.args[n as usize - 1].clone();
                Ok(store.unify(&a, &args[2]))
            } else {
                Ok(false)
            }
        }
        Term::Var(_) => Err(EngineError::Instantiation("arg/3".to_string())),
        _ => Ok(false),
    }
}
