//! Edinburgh-style reader.
//!
//! The grammar is the usual operator-precedence one: clauses are terms of
//! priority at most 1200 terminated by a full stop. Variables are numbered per
//! read term in order of first occurrence; every `_` is a distinct variable.

use super::{atoms, Atom, Term, Var};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// One term read from source, with the names of its variables.
#[derive(Debug, Clone)]
pub struct ReadTerm {
    pub term: Term,
    /// Source names of the named variables, in order of first occurrence.
    pub var_names: Vec<(String, Var)>,
    /// Number of distinct variables, including anonymous ones.
    pub var_count: u32,
    pub line: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum OpType {
    Xfx,
    Xfy,
    Yfx,
    Fy,
    Fx,
}

/// Priority and argument limits `(priority, left max, right max)` of an infix operator.
pub(crate) fn infix_op(name: &str) -> Option<(u16, u16, u16)> {
    use OpType::*;
    let (p, ty) = match name {
        ":-" | "-->" => (1200, Xfx),
        "--->" => (1105, Xfx),
        ";" | "|" => (1100, Xfy),
        "->" => (1050, Xfy),
        "," => (1000, Xfy),
        "&" => (950, Xfy),
        "=" | "\\=" | "==" | "\\==" | "is" | "<" | ">" | "=<" | ">=" | "=.." | "=:=" | "=\\="
        | "@<" | "@>" | "@=<" | "@>=" => (700, Xfx),
        "+" | "-" | "/\\" | "\\/" | "xor" => (500, Yfx),
        "*" | "/" | "//" | "mod" | "rem" | "<<" | ">>" => (400, Yfx),
        "**" => (200, Xfx),
        "^" => (200, Xfy),
        _ => return None,
    };
    Some(match ty {
        Xfx => (p, p - 1, p - 1),
        Xfy => (p, p - 1, p),
        Yfx => (p, p, p - 1),
        Fy | Fx => unreachable!(),
    })
}

/// Priority and argument limit of a prefix operator.
pub(crate) fn prefix_op(name: &str) -> Option<(u16, u16)> {
    use OpType::*;
    let (p, ty) = match name {
        ":-" | "?-" => (1200, Fx),
        "type" => (1150, Fx),
        "\\+" => (900, Fy),
        "-" | "+" | "\\" => (200, Fy),
        _ => return None,
    };
    Some(match ty {
        Fy => (p, p),
        _ => (p, p - 1),
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Quoted(String),
    Var(String),
    Int(i64),
    Str(Vec<i64>),
    Punct(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    layout_before: bool,
    line: usize,
    col: usize,
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            _src: src,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    /// Skips whitespace and comments; reports whether anything was skipped.
    fn skip_layout(&mut self) -> Result<bool, ParseError> {
        let mut skipped = false;
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                    skipped = true;
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                    skipped = true;
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => return Err(self.error("unterminated block comment")),
                        }
                    }
                    skipped = true;
                }
                _ => return Ok(skipped),
            }
        }
    }

    fn tokens(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            let layout_before = self.skip_layout()?;
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else { break };
            let tok = self.token(c)?;
            out.push(Token {
                tok,
                layout_before,
                line,
                col,
            });
        }
        Ok(out)
    }

    fn token(&mut self, c: char) -> Result<Tok, ParseError> {
        if c.is_ascii_digit() {
            return self.number();
        }
        if c == '_' || c.is_uppercase() {
            let mut s = String::new();
            while let Some(c) = self.peek() {
                if c.is_alphanumeric() || c == '_' {
                    s.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            return Ok(Tok::Var(s));
        }
        if c.is_alphabetic() {
            let mut s = String::new();
            while let Some(c) = self.peek() {
                if c.is_alphanumeric() || c == '_' {
                    s.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            return Ok(Tok::Name(s));
        }
        match c {
            '(' | ')' | '[' | ']' | '{' | '}' | ',' | '|' => {
                self.bump();
                Ok(Tok::Punct(c))
            }
            '!' | ';' => {
                self.bump();
                Ok(Tok::Name(c.to_string()))
            }
            '\'' => {
                self.bump();
                Ok(Tok::Quoted(self.quoted('\'')?))
            }
            '"' => {
                self.bump();
                let s = self.quoted('"')?;
                Ok(Tok::Str(s.chars().map(|c| c as i64).collect()))
            }
            c if SYMBOL_CHARS.contains(c) => {
                if c == '.' {
                    let next = self.peek_at(1);
                    if next.is_none() || next.is_some_and(|n| n.is_whitespace() || n == '%') {
                        self.bump();
                        return Ok(Tok::End);
                    }
                }
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if SYMBOL_CHARS.contains(c) {
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Ok(Tok::Name(s))
            }
            other => Err(self.error(format!("unexpected character {other:?}"))),
        }
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        if self.peek() == Some('0') && self.peek_at(1) == Some('\'') {
            self.bump();
            self.bump();
            let c = self
                .bump()
                .ok_or_else(|| self.error("unterminated character code"))?;
            if c == '\\' {
                let e = self.bump().ok_or_else(|| self.error("bad escape"))?;
                return Ok(Tok::Int(
                    escape(e).ok_or_else(|| self.error("bad escape"))? as i64
                ));
            }
            if c == '\'' && self.peek() == Some('\'') {
                self.bump();
            }
            return Ok(Tok::Int(c as i64));
        }
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s.parse::<i64>()
            .map(Tok::Int)
            .map_err(|_| self.error(format!("integer out of range: {s}")))
    }

    fn quoted(&mut self, q: char) -> Result<String, ParseError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated quoted item")),
                Some(c) if c == q => {
                    if self.peek() == Some(q) {
                        self.bump();
                        s.push(q);
                    } else {
                        return Ok(s);
                    }
                }
                Some('\\') => {
                    let e = self.bump().ok_or_else(|| self.error("bad escape"))?;
                    if e == '\n' {
                        continue;
                    }
                    s.push(escape(e).ok_or_else(|| self.error(format!("unknown escape \\{e}")))?);
                }
                Some(c) => s.push(c),
            }
        }
    }
}

fn escape(e: char) -> Option<char> {
    Some(match e {
        'n' => '\n',
        't' => '\t',
        'r' => '\r',
        '0' => '\0',
        '\\' => '\\',
        '\'' => '\'',
        '"' => '"',
        '`' => '`',
        _ => return None,
    })
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    names: Vec<(String, Var)>,
    next_var: u32,
    eof_line: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_tok(&self) -> Option<&Tok> {
        self.peek().map(|t| &t.tok)
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| self.error_here("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => (self.eof_line, 0),
        };
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek_tok() {
            Some(Tok::Punct(p)) if *p == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_here(format!("expected '{c}'"))),
        }
    }

    fn fresh(&mut self) -> Term {
        let v = Var(self.next_var);
        self.next_var += 1;
        Term::Var(v)
    }

    fn named_var(&mut self, name: &str) -> Term {
        if name == "_" {
            return self.fresh();
        }
        if let Some((_, v)) = self.names.iter().find(|(n, _)| n == name) {
            return Term::Var(*v);
        }
        let t = self.fresh();
        self.names.push((name.to_string(), t.as_var().unwrap()));
        t
    }

    /// Name of the infix operator at the cursor, if the next token can be one.
    fn infix_here(&self) -> Option<String> {
        match self.peek_tok()? {
            Tok::Name(s) => Some(s.clone()),
            Tok::Punct(',') => Some(",".to_string()),
            Tok::Punct('|') => Some("|".to_string()),
            _ => None,
        }
    }

    fn parse(&mut self, max: u16) -> Result<Term, ParseError> {
        let (mut left, mut left_prec) = self.primary(max)?;
        while let Some(name) = self.infix_here() {
            let Some((p, lmax, rmax)) = infix_op(&name) else {
                break;
            };
            if p > max || left_prec > lmax {
                break;
            }
            self.pos += 1;
            let right = self.parse(rmax)?;
            let functor = if name == "|" {
                atoms::SEMI
            } else {
                Atom::new(&name)
            };
            left = Term::pair(functor, left, right);
            left_prec = p;
        }
        Ok(left)
    }

    fn starts_term(&self) -> bool {
        match self.peek_tok() {
            None | Some(Tok::End) => false,
            Some(Tok::Punct(c)) => matches!(c, '(' | '[' | '{'),
            Some(Tok::Name(s)) => {
                // An infix operator right after a prefix operator means the
                // prefix operator is being used as an atom operand.
                let functional = matches!(self.toks.get(self.pos + 1), Some(t) if t.tok == Tok::Punct('(') && !t.layout_before);
                !(infix_op(s).is_some() && prefix_op(s).is_none() && !functional)
            }
            Some(_) => true,
        }
    }

    fn primary(&mut self, max: u16) -> Result<(Term, u16), ParseError> {
        let tok = self.next()?;
        match tok.tok {
            Tok::Int(n) => Ok((Term::Int(n), 0)),
            Tok::Var(name) => Ok((self.named_var(&name), 0)),
            Tok::Str(codes) => Ok((Term::list(codes.into_iter().map(Term::Int)), 0)),
            Tok::Punct('(') => {
                let t = self.parse(1200)?;
                self.expect_punct(')')?;
                Ok((t, 0))
            }
            Tok::Punct('[') => {
                if matches!(self.peek_tok(), Some(Tok::Punct(']'))) {
                    self.pos += 1;
                    return self.after_name("[]".to_string(), false, max);
                }
                let mut items = vec![self.parse(999)?];
                loop {
                    match self.peek_tok() {
                        Some(Tok::Punct(',')) => {
                            self.pos += 1;
                            items.push(self.parse(999)?);
                        }
                        Some(Tok::Punct('|')) => {
                            self.pos += 1;
                            let tail = self.parse(999)?;
                            self.expect_punct(']')?;
                            return Ok((Term::list_with_tail(items, tail), 0));
                        }
                        Some(Tok::Punct(']')) => {
                            self.pos += 1;
                            return Ok((Term::list(items), 0));
                        }
                        _ => return Err(self.error_here("expected ',', '|' or ']' in list")),
                    }
                }
            }
            Tok::Punct('{') => {
                if matches!(self.peek_tok(), Some(Tok::Punct('}'))) {
                    self.pos += 1;
                    return self.after_name("{}".to_string(), false, max);
                }
                let t = self.parse(1200)?;
                self.expect_punct('}')?;
                Ok((Term::compound(atoms::CURLY, vec![t]), 0))
            }
            Tok::Name(name) => self.after_name(name, true, max),
            Tok::Quoted(name) => self.after_name(name, false, max),
            Tok::Punct(c) => Err(ParseError {
                line: tok.line,
                col: tok.col,
                message: format!("unexpected '{c}'"),
            }),
            Tok::End => Err(ParseError {
                line: tok.line,
                col: tok.col,
                message: "unexpected end of clause".to_string(),
            }),
        }
    }

    fn after_name(
        &mut self,
        name: String,
        operator_capable: bool,
        max: u16,
    ) -> Result<(Term, u16), ParseError> {
        if let Some(t) = self.peek() {
            if t.tok == Tok::Punct('(') && !t.layout_before {
                self.pos += 1;
                let mut args = vec![self.parse(999)?];
                while matches!(self.peek_tok(), Some(Tok::Punct(','))) {
                    self.pos += 1;
                    args.push(self.parse(999)?);
                }
                self.expect_punct(')')?;
                return Ok((Term::compound(Atom::new(&name), args), 0));
            }
        }
        if operator_capable && name == "-" {
            if let Some(Token {
                tok: Tok::Int(n),
                layout_before: false,
                ..
            }) = self.peek()
            {
                let n = *n;
                self.pos += 1;
                return Ok((Term::Int(-n), 0));
            }
        }
        if operator_capable {
            if let Some((p, arg_max)) = prefix_op(&name) {
                if p <= max && self.starts_term() {
                    let arg = self.parse(arg_max)?;
                    return Ok((Term::compound(Atom::new(&name), vec![arg]), p));
                }
            }
        }
        let prec = if operator_capable && (infix_op(&name).is_some() || prefix_op(&name).is_some())
        {
            let p = infix_op(&name)
                .map(|o| o.0)
                .into_iter()
                .chain(prefix_op(&name).map(|o| o.0))
                .max()
                .unwrap_or(0);
            if p <= max {
                p
            } else {
                0
            }
        } else {
            0
        };
        Ok((Term::Atom(Atom::new(&name)), prec))
    }
}

fn split_clauses(toks: Vec<Token>) -> Vec<Vec<Token>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for t in toks {
        let end = t.tok == Tok::End;
        cur.push(t);
        if end {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn read_one(toks: Vec<Token>, require_end: bool, eof_line: usize) -> Result<ReadTerm, ParseError> {
    let line = toks.first().map(|t| t.line).unwrap_or(eof_line);
    let mut p = Parser {
        toks,
        pos: 0,
        names: Vec::new(),
        next_var: 0,
        eof_line,
    };
    let term = p.parse(1200)?;
    match p.peek_tok() {
        Some(Tok::End) => p.pos += 1,
        None if !require_end => {}
        None => return Err(p.error_here("missing '.' at end of clause")),
        Some(_) => return Err(p.error_here("operator expected")),
    }
    if p.pos != p.toks.len() {
        return Err(p.error_here("unexpected text after term"));
    }
    Ok(ReadTerm {
        term,
        var_names: p.names,
        var_count: p.next_var,
        line,
    })
}

/// Reads every clause-terminated term in `src`.
pub fn parse_terms(src: &str) -> Result<Vec<ReadTerm>, ParseError> {
    let lexer = Lexer::new(src);
    let toks = lexer.tokens()?;
    let eof_line = src.lines().count().max(1);
    split_clauses(toks)
        .into_iter()
        .map(|chunk| read_one(chunk, true, eof_line))
        .collect()
}

/// Reads a single term; the final full stop is optional.
pub fn parse_term(src: &str) -> Result<ReadTerm, ParseError> {
    let toks = Lexer::new(src).tokens()?;
    if toks.is_empty() {
        return Err(ParseError {
            line: 1,
            col: 1,
            message: "empty term".to_string(),
        });
    }
    read_one(toks, false, src.lines().count().max(1))
}
