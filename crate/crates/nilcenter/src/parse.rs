//! Reader for system files:
//!
//! ```text
//! params a, b;      # optional, once, first
//! order 10;         # optional, once, before the equations
//! dx = y + a*x^2;
//! dy = -x^3;
//! dz = -z + (1/b)*x*y;
//! ```
//!
//! Expressions are polynomials in `x, y, z` whose coefficients are rational
//! functions of the declared parameters. Division is allowed only by
//! expressions free of `x, y, z`.

use std::fmt;

use nilcenter_core::coef::RESERVED_NAMES;
use nilcenter_core::system::{SystemModel, DEFAULT_ORDER};
use nilcenter_core::{Coef, Error as CoreError, Poly3, Symbol};

const KEYWORDS: [&str; 5] = ["params", "order", "dx", "dy", "dz"];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{}{msg}", line.map(|l| format!("line {}: ", l)).unwrap_or_default())]
    Validation { line: Option<usize>, msg: String },
}

fn syntax<T>(pos: Pos, msg: impl Into<String>) -> Result<T, InputError> {
    Err(InputError::Syntax { line: pos.line, col: pos.col, msg: msg.into() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{}'", s),
            Tok::Int(n) => write!(f, "'{}'", n),
            Tok::Sym(c) => write!(f, "'{}'", c),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, InputError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut pos = Pos { line: 1, col: 1 };
    while let Some(&c) = chars.peek() {
        let here = pos;
        if c == '\n' {
            chars.next();
            pos.line += 1;
            pos.col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            pos.col += 1;
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                pos.col += 1;
            }
            if chars.peek() == Some(&'.') {
                return syntax(pos, "decimal literals are not allowed; write p/q");
            }
            let n = s.parse().or_else(|_| syntax(here, format!("integer literal {} is too large", s)))?;
            out.push((Tok::Int(n), here));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
                pos.col += 1;
            }
            out.push((Tok::Ident(s), here));
            continue;
        }
        if "+-*/^()=;,".contains(c) {
            chars.next();
            pos.col += 1;
            out.push((Tok::Sym(c), here));
            continue;
        }
        return syntax(here, format!("unexpected character '{}'", c));
    }
    out.push((Tok::Eof, pos));
    Ok(out)
}

/// A system file before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemSource {
    pub params: Vec<Symbol>,
    /// The declared jet order, if any.
    pub order: Option<u32>,
    /// `dx`, `dy`, `dz` right-hand sides.
    pub fields: [Poly3; 3],
    /// Line of each equation, for diagnostics.
    pub lines: [usize; 3],
}

impl SystemSource {
    /// Validates the system at the declared order, or at `fallback` when
    /// the file declares none.
    pub fn into_model(self, fallback: u32) -> Result<SystemModel, InputError> {
        let order = self.order.unwrap_or(fallback);
        let lines = self.lines;
        SystemModel::new(self.params, order, self.fields).map_err(|e| {
            let msg = e.to_string();
            let line = match &e {
                CoreError::LinearPart(m) | CoreError::Precondition(m) => {
                    ["dx", "dy", "dz"].iter().position(|n| m.contains(&format!(" in {}", n))).map(|i| lines[i])
                }
                CoreError::ZeroLambda => Some(lines[2]),
                _ => None,
            };
            InputError::Validation { line, msg }
        })
    }
}

/// Parses and validates a system file; jet order 12 unless declared.
pub fn parse_system(text: &str) -> Result<SystemModel, InputError> {
    parse_source(text)?.into_model(DEFAULT_ORDER)
}

pub fn parse_source(text: &str) -> Result<SystemSource, InputError> {
    let mut p = Parser { toks: lex(text)?, at: 0, params: Vec::new() };
    p.file()
}

/// Parses an expression in the declared parameters only (no `x, y, z`).
pub fn parse_coef(text: &str, params: &[Symbol]) -> Result<Coef, InputError> {
    let mut p = Parser { toks: lex(text)?, at: 0, params: params.to_vec() };
    let (e, pos) = (p.expr()?, p.pos());
    p.expect_eof()?;
    as_constant(&e).map_or_else(|| syntax(pos, "expected an expression without x, y, z"), Ok)
}

fn as_constant(p: &Poly3) -> Option<Coef> {
    match p.degree() {
        None => Some(Coef::zero()),
        Some(0) => Some(p.coeff([0, 0, 0])),
        Some(_) => None,
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    params: Vec<Symbol>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if t.0 != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), InputError> {
        if self.eat(c) {
            return Ok(());
        }
        syntax(self.pos(), format!("expected '{}', found {}", c, self.peek()))
    }

    fn expect_eof(&self) -> Result<(), InputError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => syntax(self.pos(), format!("unexpected {} after the expression", t)),
        }
    }

    fn file(&mut self) -> Result<SystemSource, InputError> {
        let mut fields: [Option<(Poly3, usize)>; 3] = Default::default();
        let mut order = None;
        let mut seen_params = false;
        loop {
            let (tok, pos) = self.bump();
            let Tok::Ident(word) = tok else {
                if tok == Tok::Eof {
                    break;
                }
                return syntax(pos, format!("expected a statement, found {}", tok));
            };
            match word.as_str() {
                "params" => {
                    if seen_params || order.is_some() || fields.iter().any(Option::is_some) {
                        return syntax(pos, "'params' must come first and only once");
                    }
                    seen_params = true;
                    self.param_list()?;
                }
                "order" => {
                    if order.is_some() || fields.iter().any(Option::is_some) {
                        return syntax(pos, "'order' must come before the equations and only once");
                    }
                    let (t, p) = self.bump();
                    match t {
                        Tok::Int(n) if n >= 1 && n <= u32::MAX as i64 => order = Some(n as u32),
                        t => return syntax(p, format!("expected a positive integer order, found {}", t)),
                    }
                    self.expect(';')?;
                }
                "dx" | "dy" | "dz" => {
                    let i = ["dx", "dy", "dz"].iter().position(|n| *n == word).unwrap();
                    if fields[i].is_some() {
                        return syntax(pos, format!("{} is defined twice", word));
                    }
                    self.expect('=')?;
                    let e = self.expr()?;
                    self.expect(';')?;
                    fields[i] = Some((e, pos.line));
                }
                _ => return syntax(pos, format!("expected params, order, dx, dy or dz, found '{}'", word)),
            }
        }
        let end = self.pos();
        let mut out: [(Poly3, usize); 3] = Default::default();
        for (i, f) in fields.into_iter().enumerate() {
            match f {
                Some(f) => out[i] = f,
                None => return syntax(end, format!("missing equation for {}", ["dx", "dy", "dz"][i])),
            }
        }
        let [(dx, lx), (dy, ly), (dz, lz)] = out;
        Ok(SystemSource { params: self.params.clone(), order, fields: [dx, dy, dz], lines: [lx, ly, lz] })
    }

    fn param_list(&mut self) -> Result<(), InputError> {
        loop {
            let (t, pos) = self.bump();
            let Tok::Ident(name) = t else {
                return syntax(pos, format!("expected a parameter name, found {}", t));
            };
            if RESERVED_NAMES.contains(&name.as_str()) || KEYWORDS.contains(&name.as_str()) {
                return syntax(pos, format!("'{}' is reserved and cannot be a parameter", name));
            }
            if self.params.iter().any(|p| **p == *name) {
                return syntax(pos, format!("parameter '{}' declared twice", name));
            }
            self.params.push(Symbol::from(name.as_str()));
            if self.eat(';') {
                return Ok(());
            }
            self.expect(',')?;
        }
    }

    fn expr(&mut self) -> Result<Poly3, InputError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly3, InputError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if *self.peek() == Tok::Sym('/') {
                self.at += 1;
                let pos = self.pos();
                let d = self.unary()?;
                let Some(c) = as_constant(&d) else {
                    return syntax(pos, "division by an expression in x, y, z");
                };
                let Some(inv) = c.inv() else {
                    return syntax(pos, "division by zero");
                };
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly3, InputError> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly3, InputError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let (t, pos) = self.bump();
        let Tok::Int(k) = t else {
            return syntax(pos, format!("expected an integer exponent, found {}", t));
        };
        let k = u32::try_from(k).or_else(|_| syntax(pos, "exponent is too large"))?;
        if *self.peek() == Tok::Sym('^') {
            return syntax(self.pos(), "chained powers are ambiguous; use parentheses");
        }
        if !neg {
            return Ok(pow(&base, k));
        }
        match as_constant(&base).and_then(|c| c.inv()) {
            Some(inv) => Ok(Poly3::constant(inv.pow(k))),
            None => syntax(pos, "negative powers need a nonzero base without x, y, z"),
        }
    }

    fn atom(&mut self) -> Result<Poly3, InputError> {
        let (t, pos) = self.bump();
        match t {
            Tok::Int(n) => Ok(Poly3::constant(Coef::from_int(n))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Poly3::var(0)),
                "y" => Ok(Poly3::var(1)),
                "z" => Ok(Poly3::var(2)),
                _ => match self.params.iter().find(|p| ***p == *name) {
                    Some(s) => Ok(Poly3::constant(Coef::param(s))),
                    None => syntax(pos, format!("unknown name '{}' (declare parameters with 'params')", name)),
                },
            },
            t => syntax(pos, format!("expected a number, name or '(', found {}", t)),
        }
    }
}

fn pow(base: &Poly3, k: u32) -> Poly3 {
    let mut acc = Poly3::constant(Coef::one());
    for _ in 0..k {
        acc = &acc * base;
    }
    acc
}
