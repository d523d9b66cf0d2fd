//! The bundled example programs: annotated sources, entry goals, run-time
//! queries and, where known, the expected residual program.

use crate::annotations::{parse_annotated, AnnotatedProgram};
use crate::term::{parse_term, Term};

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    /// The annotated program in `ann_clause/3` form.
    pub source: &'static str,
    /// The goal to specialise for.
    pub goal: &'static str,
    /// Instances of the goal to run against both the original and the
    /// residual program.
    pub queries: &'static [&'static str],
    /// The expected residual program, as rendered.
    pub golden: Option<&'static str>,
    /// Whether the program is free of side effects.
    pub pure: bool,
}

impl Fixture {
    pub fn program(&self) -> AnnotatedProgram {
        parse_annotated(self.source).unwrap_or_else(|e| panic!("fixture {}: {e}", self.name))
    }

    pub fn goal_term(&self) -> Term {
        parse_term(self.goal).expect("fixture goals parse").term
    }

    pub fn query_terms(&self) -> Vec<Term> {
        self.queries
            .iter()
            .map(|q| parse_term(q).expect("fixture queries parse").term)
            .collect()
    }
}

pub const PARSER: Fixture = Fixture {
    name: "parser",
    source: include_str!("../fixtures/parser.ann"),
    goal: "nont(c,T,R)",
    queries: &[
        "nont(c,[c],R)",
        "nont(c,[a,c,b],R)",
        "nont(c,[a,a,c],[])",
        "nont(c,[b,c],R)",
        "nont(c,[a,c|X],R)",
        "nont(c,[],R)",
    ],
    golden: Some(include_str!("../fixtures/parser.golden")),
    pure: true,
};

pub const VANILLA: Fixture = Fixture {
    name: "vanilla",
    source: include_str!("../fixtures/vanilla.ann"),
    goal: "demo(dapp(X,Y,Z,R))",
    queries: &[
        "demo(dapp([a,b],[c],[d],R))",
        "demo(dapp([],[],[],R))",
        "demo(dapp([a],Y,[c],[a,b,c]))",
        "demo(dapp([a],[b],[c],[a,b]))",
        "demo(dapp([1,2,3],[4],[5,6],R))",
        "demo(dapp([a],[b],Z,[a,b,c]))",
    ],
    golden: Some(include_str!("../fixtures/vanilla.golden")),
    pure: true,
};

const MAP_QUERIES: &[&str] = &[
    "map(inc,[1,2,3],O)",
    "map(inc,[],O)",
    "map(inc,[5],[6])",
    "map(inc,[1],[3])",
    "map(inc,[0,0],O)",
    "map(inc,[7,8],[A,9])",
];

pub const MAP_BUILTIN: Fixture = Fixture {
    name: "map_builtin",
    source: include_str!("../fixtures/map_builtin.ann"),
    goal: "map(inc,I,O)",
    queries: MAP_QUERIES,
    golden: Some(include_str!("../fixtures/map_builtin.golden")),
    pure: true,
};

pub const MAP_UCALL: Fixture = Fixture {
    name: "map_ucall",
    source: include_str!("../fixtures/map_ucall.ann"),
    goal: "map(inc,I,O)",
    queries: MAP_QUERIES,
    golden: Some(include_str!("../fixtures/map_ucall.golden")),
    pure: true,
};

pub const MAP_LIST: Fixture = Fixture {
    name: "map_list",
    source: include_str!("../fixtures/map_list.ann"),
    goal: "map(inc,[X,Y,Z],O)",
    queries: &[
        "map(inc,[1,2,3],O)",
        "map(inc,[0,0,0],O)",
        "map(inc,[1,2,3],[2,3,4])",
        "map(inc,[1,2,3],[2,3,5])",
        "map(inc,[10,20,30],[A,B,C])",
    ],
    golden: Some(include_str!("../fixtures/map_list.golden")),
    pure: true,
};

const TRANSPOSE_QUERIES: &[&str] = &[
    "transpose([[a,b],[c,d]],R)",
    "transpose([[a,b],[c,d]],[[a,c],[b,d]])",
    "transpose([[a,b],[c,d]],[[a,b],[c,d]])",
    "transpose([[a,b],[c,d]],[X,Y])",
    "transpose([[a,b],[c,d]],[[a|P],Q])",
];

pub const TRANSPOSE_LIST: Fixture = Fixture {
    name: "transpose_list",
    source: include_str!("../fixtures/transpose_list.ann"),
    goal: "transpose([[a,b],[c,d]],R)",
    queries: TRANSPOSE_QUERIES,
    golden: Some(include_str!("../fixtures/transpose_list.golden")),
    pure: true,
};

pub const TRANSPOSE_STRUCT: Fixture = Fixture {
    name: "transpose_struct",
    source: include_str!("../fixtures/transpose_struct.ann"),
    goal: "transpose([[a,b],[c,d]],R)",
    queries: TRANSPOSE_QUERIES,
    golden: Some(include_str!("../fixtures/transpose_struct.golden")),
    pure: true,
};

pub const HIDE_NF: Fixture = Fixture {
    name: "hide_nf",
    source: include_str!("../fixtures/hide_nf.ann"),
    goal: "p(X)",
    queries: &["p(a)", "p(b)", "p(c)", "p(X)", "p(f(Y))"],
    golden: Some(include_str!("../fixtures/hide_nf.golden")),
    pure: false,
};

pub const KMP: Fixture = Fixture {
    name: "kmp",
    source: include_str!("../fixtures/kmp.ann"),
    goal: "match([a,b],[a|T])",
    queries: &[
        "match([a,b],[a,b])",
        "match([a,b],[a,a,b])",
        "match([a,b],[a,c,a,b,c])",
        "match([a,b],[a])",
        "match([a,b],[a,a,a])",
        "match([a,b],[a,X,b])",
    ],
    golden: None,
    pure: true,
};

/// Every fixture, in a fixed order.
pub const ALL: &[Fixture] = &[
    PARSER,
    VANILLA,
    MAP_BUILTIN,
    MAP_UCALL,
    MAP_LIST,
    TRANSPOSE_LIST,
    TRANSPOSE_STRUCT,
    HIDE_NF,
    KMP,
];

pub fn by_name(name: &str) -> Option<&'static Fixture> {
    ALL.iter().find(|f| f.name == name)
}

/// The vanilla interpreter with the member/append object program, the input
/// to the binding-time analysis example.
pub const VANILLA_SOLVE: &str = include_str!("../fixtures/vanilla_solve.pl");

/// The answers to `query` as rendered instances of it, and the output it
/// printed.
pub fn answers(
    program: &crate::term::Program,
    query: &Term,
    config: crate::engine::EngineConfig,
) -> Result<(Vec<String>, Vec<String>), crate::engine::EngineError> {
    let (answers, log) = crate::engine::solve_all(program, query, config)?;
    let rendered = answers
        .iter()
        .map(|a| crate::term::render_term(&crate::term::canonical(&a.goal)))
        .collect();
    Ok((rendered, log))
}
