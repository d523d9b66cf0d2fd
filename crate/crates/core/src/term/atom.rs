use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

/// An interned symbol.
///
/// Symbols live for the whole process. The handful that the engine and the
/// specialisers dispatch on are pre-interned at fixed indices so that they can
/// be matched as constants.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(u32);

struct Interner {
    names: Vec<&'static str>,
    index: HashMap<&'static str, u32>,
}

macro_rules! predefined {
    ($($konst:ident = $text:expr),* $(,)?) => {
        const PREDEFINED: &[&str] = &[$($text),*];
        #[allow(missing_docs)]
        pub mod atoms {
            use super::Atom;
            predefined!(@consts 0u32; $($konst,)*);
        }
    };
    (@consts $n:expr; $konst:ident, $($rest:ident,)*) => {
        pub const $konst: Atom = Atom($n);
        predefined!(@consts $n + 1u32; $($rest,)*);
    };
    (@consts $n:expr;) => {};
}

predefined! {
    NIL = "[]",
    DOT = ".",
    TRUE = "true",
    FAIL = "fail",
    FALSE = "false",
    COMMA = ",",
    SEMI = ";",
    ARROW = "->",
    NECK = ":-",
    QUERY = "?-",
    NOT_PROVABLE = "\\+",
    NOT = "not",
    EQ = "=",
    NEQ = "\\=",
    IDENTICAL = "==",
    NOT_IDENTICAL = "\\==",
    IS = "is",
    LT = "<",
    GT = ">",
    LE = "=<",
    GE = ">=",
    UNIV = "=..",
    ARITH_EQ = "=:=",
    ARITH_NE = "=\\=",
    PLUS = "+",
    MINUS = "-",
    STAR = "*",
    SLASH = "/",
    INT_DIV = "//",
    MOD = "mod",
    REM = "rem",
    MIN = "min",
    MAX = "max",
    ABS = "abs",
    CALL = "call",
    VAR = "var",
    NONVAR = "nonvar",
    GROUND = "ground",
    ATOM = "atom",
    INTEGER = "integer",
    COPY_TERM = "copy_term",
    FINDALL = "findall",
    PRINT = "print",
    ARG = "arg",
    FUNCTOR = "functor",
    CURLY = "{}",
    AMP = "&",
    TYPE_ARROW = "--->",
    DCG_ARROW = "-->",
    TYPE = "type",
    CARET = "^",
    EMPTY = "",
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        let mut interner = Interner {
            names: Vec::with_capacity(256),
            index: HashMap::with_capacity(256),
        };
        for name in PREDEFINED {
            let id = interner.names.len() as u32;
            interner.names.push(name);
            interner.index.insert(name, id);
        }
        RwLock::new(interner)
    })
}

impl Atom {
    /// Interns `name`, returning the same handle for equal strings.
    pub fn new(name: &str) -> Atom {
        {
            let guard = interner().read().expect("interner poisoned");
            if let Some(&id) = guard.index.get(name) {
                return Atom(id);
            }
        }
        let mut guard = interner().write().expect("interner poisoned");
        if let Some(&id) = guard.index.get(name) {
            return Atom(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = guard.names.len() as u32;
        guard.names.push(leaked);
        guard.index.insert(leaked, id);
        Atom(id)
    }

    /// The symbol text.
    pub fn name(self) -> &'static str {
        let guard = interner().read().expect("interner poisoned");
        guard.names[self.0 as usize]
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.name())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Atom {
        Atom::new(s)
    }
}
