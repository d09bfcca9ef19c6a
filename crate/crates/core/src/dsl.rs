//! Expression language for sequence definitions and moduli.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := NUMBER | VAR | FUNC "(" expr ("," expr)? ")" | "(" expr ")"
//! NUMBER := integer | integer "/" integer
//! ```
//!
//! Variables are `n`, `m` and `M`; which of them may appear depends on the
//! context the expression is parsed for. Functions: `floor`, `ceil`, `abs`,
//! `pow2neg` (one argument) and `min`, `max` (two arguments). `pow2neg(k)`
//! is `2^{-k}` and requires an integer argument.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{Rational, MAX_POW2_EXPONENT};
use crate::error::{Error, Result};

const MAX_DEPTH: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    #[serde(rename = "n")]
    N,
    #[serde(rename = "m")]
    SmallM,
    #[serde(rename = "M")]
    BigM,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::N => "n",
            Var::SmallM => "m",
            Var::BigM => "M",
        }
    }

    fn from_name(s: &str) -> Option<Var> {
        match s {
            "n" => Some(Var::N),
            "m" => Some(Var::SmallM),
            "M" => Some(Var::BigM),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Func {
    Floor,
    Ceil,
    Min,
    Max,
    Abs,
    Pow2neg,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Floor => "floor",
            Func::Ceil => "ceil",
            Func::Min => "min",
            Func::Max => "max",
            Func::Abs => "abs",
            Func::Pow2neg => "pow2neg",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "floor" => Func::Floor,
            "ceil" => Func::Ceil,
            "min" => Func::Min,
            "max" => Func::Max,
            "abs" => Func::Abs,
            "pow2neg" => Func::Pow2neg,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

/// Parsed expression. Serializes as nested JSON tagged by `"node"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Expr {
    Lit { value: Rational },
    Var { name: Var },
    Bin { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Call { func: Func, args: Vec<Expr> },
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin { op, .. } => op.precedence(),
            // a fractional literal prints as `p/q`, which binds like `/`
            Expr::Lit { value } if !value.is_integer() => 2,
            _ => 3,
        }
    }

    fn ends_with_bare_int(&self) -> bool {
        match self {
            Expr::Lit { value } => value.is_integer() && !value.is_negative(),
            Expr::Bin { op, rhs, .. } => {
                rhs.precedence() > op.precedence() && rhs.ends_with_bare_int()
            }
            _ => false,
        }
    }

    /// Free variables, sorted and deduplicated.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Lit { .. } => {}
            Expr::Var { name } => out.push(*name),
            Expr::Bin { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit { value } => {
                if value.is_negative() {
                    // not produced by the parser; keep the output parseable
                    write!(f, "(0 - {})", value.abs())
                } else {
                    write!(f, "{value}")
                }
            }
            Expr::Var { name } => f.write_str(name.name()),
            Expr::Bin { op, lhs, rhs } => {
                let p = op.precedence();
                if lhs.precedence() < p {
                    write!(f, "({lhs})")?;
                } else {
                    write!(f, "{lhs}")?;
                }
                write!(f, " {} ", op.symbol())?;
                // `1 / 3` would re-lex as the literal 1/3
                let splits_literal = *op == BinOp::Div
                    && lhs.precedence() >= p
                    && lhs.ends_with_bare_int()
                    && matches!(rhs.as_ref(), Expr::Lit { value } if value.is_integer());
                if rhs.precedence() <= p || splits_literal {
                    write!(f, "({rhs})")
                } else {
                    write!(f, "{rhs}")
                }
            }
            Expr::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            src: text.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while let Some(t) = lx.next_token()? {
            out.push(t);
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize)>> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok(None);
        };
        if c.is_ascii_digit() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            // digits are ASCII, so the slice is valid UTF-8
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("0");
            let v: BigInt = digits.parse().map_err(|_| Error::Parse {
                offset: start,
                message: "bad integer".into(),
            })?;
            return Ok(Some((Tok::Int(v), start)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let id = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            return Ok(Some((Tok::Ident(id), start)));
        }
        if matches!(c, b'+' | b'-' | b'*' | b'/' | b'(' | b')' | b',') {
            self.pos += 1;
            return Ok(Some((Tok::Sym(c as char), start)));
        }
        Err(Error::Parse {
            offset: start,
            message: format!("unexpected byte 0x{c:02x}"),
        })
    }
}

struct Parser<'v> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    allowed: &'v [Var],
    depth: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err("expression nested too deeply");
        }
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat_sym('+') {
                BinOp::Add
            } else if self.eat_sym('-') {
                BinOp::Sub
            } else {
                break;
            };
            let rhs = self.term()?;
            lhs = Expr::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat_sym('*') {
                BinOp::Mul
            } else if self.eat_sym('/') {
                BinOp::Div
            } else {
                break;
            };
            let rhs = self.factor()?;
            lhs = Expr::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Int(num)) => {
                self.pos += 1;
                // `p/q` with two integer literals is a single rational literal
                if self.peek() == Some(&Tok::Sym('/')) {
                    if let Some((Tok::Int(den), den_off)) = self.toks.get(self.pos + 1).cloned() {
                        if den.is_zero() {
                            return Err(Error::Parse {
                                offset: den_off,
                                message: "zero denominator in literal".into(),
                            });
                        }
                        self.pos += 2;
                        let value = Rational::new(num, den)?;
                        return Ok(Expr::Lit { value });
                    }
                }
                Ok(Expr::Lit {
                    value: Rational::from_integer(num),
                })
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                if let Some(func) = Func::from_name(&id) {
                    self.expect_sym('(')?;
                    let mut args = vec![self.expr()?];
                    if self.eat_sym(',') {
                        args.push(self.expr()?);
                    }
                    self.expect_sym(')')?;
                    if args.len() != func.arity() {
                        return Err(Error::Parse {
                            offset,
                            message: format!(
                                "{} takes {} argument(s), got {}",
                                func.name(),
                                func.arity(),
                                args.len()
                            ),
                        });
                    }
                    return Ok(Expr::Call { func, args });
                }
                match Var::from_name(&id) {
                    Some(v) if self.allowed.contains(&v) => Ok(Expr::Var { name: v }),
                    _ => Err(Error::UnknownVariable { name: id, offset }),
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(Tok::Sym(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text`, rejecting variables outside `allowed`.
pub fn parse(text: &str, allowed: &[Var]) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let toks = Lexer::tokens(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        allowed,
        depth: 0,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// DSL source text for a rational constant (the grammar has no unary minus).
pub fn literal_text(value: &Rational) -> String {
    if value.is_negative() {
        format!("(0 - {})", value.abs())
    } else {
        value.to_string()
    }
}

/// Variable bindings for evaluation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Bindings {
    pub n: Option<u64>,
    pub m: Option<u64>,
    pub big_m: Option<u64>,
}

impl Bindings {
    pub fn n(n: u64) -> Self {
        Bindings {
            n: Some(n),
            ..Default::default()
        }
    }

    pub fn nm(n: u64, m: u64) -> Self {
        Bindings {
            n: Some(n),
            m: Some(m),
            ..Default::default()
        }
    }

    pub fn precision(big_m: u64) -> Self {
        Bindings {
            big_m: Some(big_m),
            ..Default::default()
        }
    }

    pub fn n_precision(n: u64, big_m: u64) -> Self {
        Bindings {
            n: Some(n),
            big_m: Some(big_m),
            ..Default::default()
        }
    }

    fn get(&self, v: Var) -> Option<u64> {
        match v {
            Var::N => self.n,
            Var::SmallM => self.m,
            Var::BigM => self.big_m,
        }
    }
}

pub fn eval_expr(e: &Expr, b: &Bindings) -> Result<Rational> {
    match e {
        Expr::Lit { value } => Ok(value.clone()),
        Expr::Var { name } => b
            .get(*name)
            .map(Rational::from)
            .ok_or_else(|| Error::Eval(format!("unbound variable `{}`", name.name()))),
        Expr::Bin { op, lhs, rhs } => {
            let l = eval_expr(lhs, b)?;
            let r = eval_expr(rhs, b)?;
            match op {
                BinOp::Add => Ok(l + r),
                BinOp::Sub => Ok(l - r),
                BinOp::Mul => Ok(l * r),
                BinOp::Div => l.checked_div(&r).map_err(|_| {
                    Error::Eval(format!("division by zero in `{e}`"))
                }),
            }
        }
        Expr::Call { func, args } => {
            let a = eval_expr(&args[0], b)?;
            match func {
                Func::Floor => Ok(a.floor()),
                Func::Ceil => Ok(a.ceil()),
                Func::Abs => Ok(a.abs()),
                Func::Min => Ok(a.min(eval_expr(&args[1], b)?)),
                Func::Max => Ok(a.max(eval_expr(&args[1], b)?)),
                Func::Pow2neg => {
                    let k = a
                        .to_integer()
                        .ok_or_else(|| Error::Eval(format!("pow2neg of non-integer {a}")))?;
                    match k.to_i64() {
                        Some(k) if k.abs() <= MAX_POW2_EXPONENT => Ok(Rational::pow2(-k)),
                        _ => Err(Error::Eval(format!("pow2neg exponent {k} out of range"))),
                    }
                }
            }
        }
    }
}
