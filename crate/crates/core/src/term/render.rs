//! Deterministic text output.
//!
//! Variables are named `A`..`Z`, then `A1`..`Z1`, and so on, in order of first
//! occurrence within the rendered unit (a term or a whole clause). Operators
//! are written infix with surrounding spaces, except `,` which is followed by
//! a single space.

use std::collections::HashMap;
use std::fmt::Write;

use super::parse::{infix_op, prefix_op};
use super::{atoms, Atom, Clause, Term, Var};

/// Assigns canonical names to variables in order of first request.
#[derive(Default, Debug, Clone)]
pub struct VarNamer {
    names: HashMap<Var, String>,
    next: usize,
}

impl VarNamer {
    pub fn new() -> VarNamer {
        VarNamer::default()
    }

    pub fn name(&mut self, v: Var) -> String {
        if let Some(n) = self.names.get(&v) {
            return n.clone();
        }
        let name = canonical_name(self.next);
        self.next += 1;
        self.names.insert(v, name.clone());
        name
    }
}

fn canonical_name(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    match i / 26 {
        0 => letter.to_string(),
        n => format!("{letter}{n}"),
    }
}

enum Naming<'a> {
    Canonical(&'a mut VarNamer),
    Raw,
}

impl Naming<'_> {
    fn name(&mut self, v: Var) -> String {
        match self {
            Naming::Canonical(n) => n.name(v),
            Naming::Raw => format!("_{}", v.0),
        }
    }
}

/// Renders a term with fresh canonical variable names.
pub fn render_term(t: &Term) -> String {
    let mut namer = VarNamer::new();
    render_term_with(t, &mut namer)
}

/// Renders a term, sharing variable names with earlier calls on `namer`.
pub fn render_term_with(t: &Term, namer: &mut VarNamer) -> String {
    let mut out = String::new();
    write_term(t, 1200, &mut out, &mut Naming::Canonical(namer));
    out
}

pub(crate) fn render_debug(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, 1200, &mut out, &mut Naming::Raw);
    out
}

/// Renders one clause on one line, terminated by a full stop.
pub fn render_clause(c: &Clause) -> String {
    let mut namer = VarNamer::new();
    let mut naming = Naming::Canonical(&mut namer);
    let mut out = String::new();
    write_term(&c.head, 1199, &mut out, &mut naming);
    if !c.is_fact() {
        out.push_str(" :- ");
        write_term(&c.body, 1199, &mut out, &mut naming);
    }
    out.push('.');
    out
}

/// Renders clauses one per line, each line newline-terminated.
pub fn render_clauses<'a>(clauses: impl IntoIterator<Item = &'a Clause>) -> String {
    let mut out = String::new();
    for c in clauses {
        out.push_str(&render_clause(c));
        out.push('\n');
    }
    out
}

fn is_solo(name: &str) -> bool {
    matches!(name, "[]" | "{}" | "!" | ";")
}

fn is_letter_atom(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_lowercase() => chars.all(|c| c.is_alphanumeric() || c == '_'),
        _ => false,
    }
}

fn is_symbol_atom(name: &str) -> bool {
    !name.is_empty() && name != "." && name.chars().all(|c| "+-*/\\^<>=~:.?@#&$".contains(c))
}

pub(crate) fn atom_text(a: Atom) -> String {
    let name = a.name();
    if is_solo(name) || is_letter_atom(name) || is_symbol_atom(name) {
        return name.to_string();
    }
    let mut s = String::with_capacity(name.len() + 2);
    s.push('\'');
    for c in name.chars() {
        match c {
            '\'' => s.push_str("\\'"),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            '\t' => s.push_str("\\t"),
            c => s.push(c),
        }
    }
    s.push('\'');
    s
}

fn write_term(t: &Term, max: u16, out: &mut String, naming: &mut Naming<'_>) {
    match t {
        Term::Var(v) => out.push_str(&naming.name(*v)),
        Term::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Term::Atom(a) => {
            let text = atom_text(*a);
            let is_op = infix_op(a.name()).is_some() || prefix_op(a.name()).is_some();
            if is_op && max < 999 {
                out.push('(');
                out.push_str(&text);
                out.push(')');
            } else if *a == atoms::COMMA {
                out.push_str("','");
            } else {
                out.push_str(&text);
            }
        }
        Term::Compound(c) => {
            let name = c.functor.name();
            if c.functor == atoms::DOT && c.args.len() == 2 {
                write_list(t, out, naming);
                return;
            }
            if c.functor == atoms::CURLY && c.args.len() == 1 {
                out.push('{');
                write_term(&c.args[0], 1200, out, naming);
                out.push('}');
                return;
            }
            if c.args.len() == 2 {
                if let Some((p, lmax, rmax)) = infix_op(name) {
                    let paren = p > max;
                    if paren {
                        out.push('(');
                    }
                    write_term(&c.args[0], lmax, out, naming);
                    if c.functor == atoms::COMMA {
                        out.push_str(", ");
                    } else {
                        out.push(' ');
                        out.push_str(&atom_text(c.functor));
                        out.push(' ');
                    }
                    write_term(&c.args[1], rmax, out, naming);
                    if paren {
                        out.push(')');
                    }
                    return;
                }
            }
            // `type` is read as a prefix operator but written in functional
            // notation, which is how binding types appear in annotated files.
            if c.args.len() == 1 && name != "type" {
                if let Some((p, amax)) = prefix_op(name) {
                    if !matches!(c.args[0], Term::Int(_)) {
                        let paren = p > max;
                        if paren {
                            out.push('(');
                        }
                        out.push_str(&atom_text(c.functor));
                        out.push(' ');
                        write_term(&c.args[0], amax, out, naming);
                        if paren {
                            out.push(')');
                        }
                        return;
                    }
                }
            }
            out.push_str(&atom_text(c.functor));
            out.push('(');
            for (i, a) in c.args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_term(a, 999, out, naming);
            }
            out.push(')');
        }
    }
}

fn write_list(t: &Term, out: &mut String, naming: &mut Naming<'_>) {
    let (items, tail) = t.list_parts();
    out.push('[');
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_term(item, 999, out, naming);
    }
    if !tail.is_atom(atoms::NIL) {
        out.push('|');
        write_term(tail, 999, out, naming);
    }
    out.push(']');
}
