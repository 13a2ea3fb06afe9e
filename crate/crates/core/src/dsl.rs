//! Text language for partition-calculus expressions and identity fixtures.
//!
//! ```text
//! expr   := sum
//! sum    := tensor (("+" | "-") tensor)*
//! tensor := prod ("ox" prod)*
//! prod   := unary ("*" unary)*
//! unary  := "-" unary
//!         | ("adj" | "asym") "(" expr ")"
//!         | ("rotl" | "rotr") "(" expr ["," ("upper" | "lower")] ")"
//!         | "scale" "(" poly "," expr ")"
//!         | ("compose" | "tensor") "(" expr "," expr ")"
//!         | atom
//! atom   := builtin | name | "P(k,l){…}" | "(" expr ")"
//! poly   := "poly" "(" p ")" | p      with p over n, integers, + - * / ^ and parentheses
//! ```
//!
//! `a * b` applies b first. Builtins: id(k) or idk, cap, cup, cross, sing, merge, fork,
//! block(k,l), pk(k).

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::functor::functor_t;
use crate::partition::{Partition, Row, Side};
use crate::partlin::{antisymmetrize_lin, PartLin};
use crate::poly::PolyQ;
use crate::scalar::Scalar;
use crate::tensor::SparseTensor;

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

fn parse_err<T>(pos: Pos, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line: pos.line, col: pos.col, msg: msg.into() })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Literal(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::Int(v) => write!(f, "{v}"),
            Tok::Literal(s) => write!(f, "{s:?}"),
            Tok::Sym(s) => write!(f, "'{s}'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const SYMBOLS: [&str; 12] = ["==", "(", ")", ",", "+", "-", "*", "/", "^", ":", "=", "·"];

fn lex(text: &str, start: Pos) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut pos = start;
    let advance = |i: &mut usize, pos: &mut Pos, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                pos.line += 1;
                pos.col = 1;
            } else {
                pos.col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut pos, 1);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut pos, 1);
            }
            continue;
        }
        let here = pos;
        if c == 'P' && chars.get(i + 1) == Some(&'(') {
            let close = chars[i..].iter().position(|&ch| ch == '}');
            let Some(close) = close else {
                return parse_err(here, "unterminated partition literal");
            };
            let s: String = chars[i..=i + close].iter().collect();
            advance(&mut i, &mut pos, close + 1);
            out.push((Tok::Literal(s), here));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let len = chars[i..].iter().take_while(|ch| ch.is_ascii_alphanumeric() || **ch == '_').count();
            let s: String = chars[i..i + len].iter().collect();
            advance(&mut i, &mut pos, len);
            out.push((Tok::Ident(s), here));
        } else if c.is_ascii_digit() {
            let len = chars[i..].iter().take_while(|ch| ch.is_ascii_digit()).count();
            let s: String = chars[i..i + len].iter().collect();
            let v = s.parse().or_else(|_| parse_err(here, format!("integer {s} is too large")))?;
            advance(&mut i, &mut pos, len);
            out.push((Tok::Int(v), here));
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                return parse_err(here, format!("unexpected character {c:?}"));
            };
            advance(&mut i, &mut pos, sym.chars().count());
            out.push((Tok::Sym(sym), here));
        }
    }
    out.push((Tok::Eof, pos));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Builtin {
    Id(usize),
    Cap,
    Cup,
    Cross,
    Sing,
    Merge,
    Fork,
    Block(usize, usize),
    Pk(usize),
}

impl Builtin {
    pub fn partition(&self) -> Result<Partition> {
        Ok(match self {
            Builtin::Id(k) => Partition::identity(*k),
            Builtin::Cap => Partition::cap(),
            Builtin::Cup => Partition::cup(),
            Builtin::Cross => Partition::cross(),
            Builtin::Sing => Partition::singleton(),
            Builtin::Merge => Partition::merge(),
            Builtin::Fork => Partition::fork(),
            Builtin::Block(k, l) => Partition::block(*k, *l),
            Builtin::Pk(k) => Partition::pk(*k)?,
        })
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Id(k) => write!(f, "id({k})"),
            Builtin::Cap => write!(f, "cap"),
            Builtin::Cup => write!(f, "cup"),
            Builtin::Cross => write!(f, "cross"),
            Builtin::Sing => write!(f, "sing"),
            Builtin::Merge => write!(f, "merge"),
            Builtin::Fork => write!(f, "fork"),
            Builtin::Block(k, l) => write!(f, "block({k},{l})"),
            Builtin::Pk(k) => write!(f, "pk({k})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unary {
    Adj,
    Asym,
    Rot(Side, Row),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binary {
    Compose,
    Tensor,
    Add,
    Sub,
}

impl Binary {
    fn prec(self) -> u8 {
        match self {
            Binary::Add | Binary::Sub => 1,
            Binary::Tensor => 2,
            Binary::Compose => 3,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Binary::Compose => "*",
            Binary::Tensor => "ox",
            Binary::Add => "+",
            Binary::Sub => "-",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Literal(Partition),
    Builtin(Builtin),
    Name(String),
    Unary(Unary, Box<Expr>),
    Binary(Binary, Box<Expr>, Box<Expr>),
    Scale(PolyQ, Box<Expr>),
}

/// Expression node. Equality ignores source positions.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    fn prec(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, ..) => op.prec(),
            _ => 4,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Literal(p) => write!(f, "{p}"),
            ExprKind::Builtin(b) => write!(f, "{b}"),
            ExprKind::Name(n) => write!(f, "{n}"),
            ExprKind::Unary(Unary::Adj, e) => write!(f, "adj({e})"),
            ExprKind::Unary(Unary::Asym, e) => write!(f, "asym({e})"),
            ExprKind::Unary(Unary::Rot(side, row), e) => {
                let name = if *side == Side::Left { "rotl" } else { "rotr" };
                match row {
                    Row::Upper => write!(f, "{name}({e})"),
                    Row::Lower => write!(f, "{name}({e}, lower)"),
                }
            }
            ExprKind::Scale(c, e) => write!(f, "scale(poly({c}), {e})"),
            ExprKind::Binary(op, a, b) => {
                let p = op.prec();
                if a.prec() < p {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " {} ", op.symbol())?;
                if b.prec() <= p {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
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
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            parse_err(self.pos(), format!("expected '{s}', found {}", self.peek()))
        }
    }

    fn expect_int(&mut self) -> Result<usize> {
        match self.bump() {
            (Tok::Int(v), _) => Ok(v as usize),
            (t, p) => parse_err(p, format!("expected an integer, found {t}")),
        }
    }

    fn expect_eof(&self) -> Result<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => parse_err(self.pos(), format!("unexpected {t} after expression")),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.tensor()?;
        loop {
            let op = if self.is_sym("+") {
                Binary::Add
            } else if self.is_sym("-") {
                Binary::Sub
            } else {
                return Ok(lhs);
            };
            let pos = self.bump().1;
            let rhs = self.tensor()?;
            lhs = Expr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos };
        }
    }

    fn tensor(&mut self) -> Result<Expr> {
        let mut lhs = self.prod()?;
        while matches!(self.peek(), Tok::Ident(s) if s == "ox") {
            let pos = self.bump().1;
            let rhs = self.prod()?;
            lhs = Expr { kind: ExprKind::Binary(Binary::Tensor, Box::new(lhs), Box::new(rhs)), pos };
        }
        Ok(lhs)
    }

    fn prod(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.is_sym("*") {
            let pos = self.bump().1;
            let rhs = self.unary()?;
            lhs = Expr { kind: ExprKind::Binary(Binary::Compose, Box::new(lhs), Box::new(rhs)), pos };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let (tok, _) = self.bump();
        let kind = match tok {
            Tok::Literal(s) => ExprKind::Literal(Partition::parse(&s).or_else(|e| parse_err(pos, e.to_string()))?),
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect_sym(")")?;
                return Ok(e);
            }
            Tok::Ident(name) => return self.named(name, pos),
            Tok::Sym("-") => ExprKind::Scale(PolyQ::int(-1), Box::new(self.unary()?)),
            t => return parse_err(pos, format!("expected an expression, found {t}")),
        };
        Ok(Expr { kind, pos })
    }

    fn named(&mut self, name: String, pos: Pos) -> Result<Expr> {
        let node = |kind| Ok(Expr { kind, pos });
        let call = self.is_sym("(");
        match (name.as_str(), call) {
            ("adj" | "asym", true) => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                let op = if name == "adj" { Unary::Adj } else { Unary::Asym };
                node(ExprKind::Unary(op, Box::new(e)))
            }
            ("rotl" | "rotr", true) => {
                self.bump();
                let e = self.expr()?;
                let mut row = Row::Upper;
                if self.is_sym(",") {
                    self.bump();
                    row = match self.bump() {
                        (Tok::Ident(r), _) if r == "upper" => Row::Upper,
                        (Tok::Ident(r), _) if r == "lower" => Row::Lower,
                        (t, p) => return parse_err(p, format!("expected 'upper' or 'lower', found {t}")),
                    };
                }
                self.expect_sym(")")?;
                let side = if name == "rotl" { Side::Left } else { Side::Right };
                node(ExprKind::Unary(Unary::Rot(side, row), Box::new(e)))
            }
            ("scale", true) => {
                self.bump();
                let c = self.poly_arg()?;
                self.expect_sym(",")?;
                let e = self.expr()?;
                self.expect_sym(")")?;
                node(ExprKind::Scale(c, Box::new(e)))
            }
            ("compose" | "tensor", true) => {
                self.bump();
                let a = self.expr()?;
                self.expect_sym(",")?;
                let b = self.expr()?;
                self.expect_sym(")")?;
                let op = if name == "compose" { Binary::Compose } else { Binary::Tensor };
                node(ExprKind::Binary(op, Box::new(a), Box::new(b)))
            }
            ("id" | "pk", true) => {
                self.bump();
                let k = self.expect_int()?;
                self.expect_sym(")")?;
                node(ExprKind::Builtin(if name == "id" { Builtin::Id(k) } else { Builtin::Pk(k) }))
            }
            ("block", true) => {
                self.bump();
                let k = self.expect_int()?;
                self.expect_sym(",")?;
                let l = self.expect_int()?;
                self.expect_sym(")")?;
                node(ExprKind::Builtin(Builtin::Block(k, l)))
            }
            ("adj" | "asym" | "rotl" | "rotr" | "scale" | "compose" | "tensor" | "id" | "pk" | "block", false) => {
                parse_err(self.pos(), format!("expected '(' after {name}"))
            }
            ("cap", _) => node(ExprKind::Builtin(Builtin::Cap)),
            ("cup", _) => node(ExprKind::Builtin(Builtin::Cup)),
            ("cross", _) => node(ExprKind::Builtin(Builtin::Cross)),
            ("sing", _) => node(ExprKind::Builtin(Builtin::Sing)),
            ("merge", _) => node(ExprKind::Builtin(Builtin::Merge)),
            ("fork", _) => node(ExprKind::Builtin(Builtin::Fork)),
            ("ox", _) => parse_err(pos, "'ox' needs a left operand"),
            _ => match name.strip_prefix("id").and_then(|k| k.parse().ok()) {
                Some(k) => node(ExprKind::Builtin(Builtin::Id(k))),
                None => node(ExprKind::Name(name)),
            },
        }
    }

    fn poly_arg(&mut self) -> Result<PolyQ> {
        if matches!(self.peek(), Tok::Ident(s) if s == "poly") {
            self.bump();
            self.expect_sym("(")?;
            let p = self.poly_sum()?;
            self.expect_sym(")")?;
            Ok(p)
        } else {
            self.poly_sum()
        }
    }

    fn poly_sum(&mut self) -> Result<PolyQ> {
        let mut acc = if self.is_sym("-") {
            self.bump();
            -self.poly_term()?
        } else {
            self.poly_term()?
        };
        loop {
            if self.is_sym("+") {
                self.bump();
                acc = acc + self.poly_term()?;
            } else if self.is_sym("-") {
                self.bump();
                acc = acc - self.poly_term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn poly_term(&mut self) -> Result<PolyQ> {
        let mut acc = self.poly_power()?;
        loop {
            if self.is_sym("*") {
                self.bump();
                acc = acc * self.poly_power()?;
            } else if self.is_sym("/") {
                let pos = self.bump().1;
                let d = self.poly_power()?;
                match d.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                    _ => return parse_err(pos, "division only by a nonzero constant"),
                }
            } else if matches!(self.peek(), Tok::Sym("(") | Tok::Ident(_) | Tok::Int(_)) && self.poly_juxtaposed() {
                acc = acc * self.poly_power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    /// "(n-4)(n-6)" and "2n" multiply by juxtaposition.
    fn poly_juxtaposed(&self) -> bool {
        match self.peek() {
            Tok::Sym("(") => true,
            Tok::Ident(s) => s == "n",
            _ => false,
        }
    }

    fn poly_power(&mut self) -> Result<PolyQ> {
        let base = self.poly_atom()?;
        if self.is_sym("^") {
            self.bump();
            let e = self.expect_int()?;
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn poly_atom(&mut self) -> Result<PolyQ> {
        match self.bump() {
            (Tok::Int(v), _) => Ok(PolyQ::constant(BigRational::from_integer(v.into()))),
            (Tok::Ident(s), _) if s == "n" => Ok(PolyQ::n()),
            (Tok::Sym("("), _) => {
                let p = self.poly_sum()?;
                self.expect_sym(")")?;
                Ok(p)
            }
            (Tok::Sym("-"), _) => Ok(-self.poly_power()?),
            (t, p) => parse_err(p, format!("expected a polynomial in n, found {t}")),
        }
    }
}

fn parser_at(text: &str, start: Pos) -> Result<Parser> {
    Ok(Parser { toks: lex(text, start)?, at: 0 })
}

pub fn parse(text: &str) -> Result<Expr> {
    parse_at(text, Pos { line: 1, col: 1 })
}

/// Parses with positions offset to `start`, for expressions embedded in a larger file.
pub fn parse_at(text: &str, start: Pos) -> Result<Expr> {
    let mut p = parser_at(text, start)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a polynomial such as "(n-4)(n-6)(n-8)" or "1/4*n^2 - 1".
pub fn parse_poly(text: &str) -> Result<PolyQ> {
    let mut p = parser_at(text, Pos { line: 1, col: 1 })?;
    let v = p.poly_arg()?;
    p.expect_eof()?;
    Ok(v)
}

/// Named values available to expressions.
#[derive(Clone, Debug, Default)]
pub struct Env {
    vars: BTreeMap<String, PartLin>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: &str, value: PartLin) {
        self.vars.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&PartLin> {
        self.vars.get(name)
    }
}

fn arity_err<T>(pos: Pos, msg: String) -> Result<T> {
    Err(Error::Arity(format!("{pos}: {msg}")))
}

/// Infers (k, l) of every node; fails at the first inconsistent node.
pub fn check(e: &Expr, env: &Env) -> Result<(usize, usize)> {
    match &e.kind {
        ExprKind::Literal(p) => Ok(p.arity()),
        ExprKind::Builtin(b) => b.partition().map(|p| p.arity()).or_else(|err| arity_err(e.pos, err.to_string())),
        ExprKind::Name(n) => match env.get(n) {
            Some(v) => Ok(v.arity()),
            None => parse_err(e.pos, format!("unknown identifier {n:?}")),
        },
        ExprKind::Scale(_, x) => check(x, env),
        ExprKind::Unary(op, x) => {
            let (k, l) = check(x, env)?;
            match op {
                Unary::Adj => Ok((l, k)),
                Unary::Asym if k % 2 == 0 && l % 2 == 0 => Ok((k, l)),
                Unary::Asym => arity_err(e.pos, format!("asym needs an even number of points per row, got P({k},{l})")),
                Unary::Rot(_, Row::Upper) if k > 0 => Ok((k - 1, l + 1)),
                Unary::Rot(_, Row::Lower) if l > 0 => Ok((k + 1, l - 1)),
                Unary::Rot(..) => arity_err(e.pos, format!("cannot rotate P({k},{l}) from an empty row")),
            }
        }
        ExprKind::Binary(op, a, b) => {
            let (ka, la) = check(a, env)?;
            let (kb, lb) = check(b, env)?;
            match op {
                Binary::Tensor => Ok((ka + kb, la + lb)),
                Binary::Compose if ka == lb => Ok((kb, la)),
                Binary::Compose => arity_err(
                    e.pos,
                    format!("cannot compose P({ka},{la}) after P({kb},{lb}): {ka} inputs against {lb} outputs"),
                ),
                Binary::Add | Binary::Sub if (ka, la) == (kb, lb) => Ok((ka, la)),
                Binary::Add | Binary::Sub => {
                    arity_err(e.pos, format!("cannot {} P({ka},{la}) and P({kb},{lb})", if *op == Binary::Add { "add" } else { "subtract" }))
                }
            }
        }
    }
}

/// Checks arities, then evaluates to an exact linear combination of partitions.
pub fn eval(e: &Expr, env: &Env) -> Result<PartLin> {
    check(e, env)?;
    eval_checked(e, env)
}

fn eval_checked(e: &Expr, env: &Env) -> Result<PartLin> {
    Ok(match &e.kind {
        ExprKind::Literal(p) => PartLin::from_partition(p.clone()),
        ExprKind::Builtin(b) => PartLin::from_partition(b.partition()?),
        ExprKind::Name(n) => env.get(n).cloned().ok_or_else(|| Error::InvalidInput(format!("unknown identifier {n:?}")))?,
        ExprKind::Scale(c, x) => eval_checked(x, env)?.scale(c),
        ExprKind::Unary(op, x) => {
            let v = eval_checked(x, env)?;
            match op {
                Unary::Adj => v.adjoint(),
                Unary::Asym => antisymmetrize_lin(&v)?,
                Unary::Rot(side, row) => v.rotate(*side, *row)?,
            }
        }
        ExprKind::Binary(op, a, b) => {
            let (a, b) = (eval_checked(a, env)?, eval_checked(b, env)?);
            match op {
                Binary::Compose => a.compose(&b)?,
                Binary::Tensor => a.tensor(&b),
                Binary::Add => a.add(&b)?,
                Binary::Sub => a.sub(&b)?,
            }
        }
    })
}

/// Values bound to names when evaluating directly as tensors.
pub type TensorEnv<S> = BTreeMap<String, SparseTensor<S>>;

/// Evaluates at n := N directly in tensor land: leaves become T_p, "*" contracts, "ox" is
/// the Kronecker product, asym antisymmetrizes neighbouring axis pairs and rotations move
/// axes between the output and input sides. Independent of the partition arithmetic.
pub fn eval_tensor<S: Scalar>(e: &Expr, env: &TensorEnv<S>, n: usize) -> Result<SparseTensor<S>> {
    Ok(match &e.kind {
        ExprKind::Literal(p) => functor_t(p, n)?,
        ExprKind::Builtin(b) => functor_t(&b.partition()?, n)?,
        ExprKind::Name(name) => env
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Parse { line: e.pos.line, col: e.pos.col, msg: format!("unknown identifier {name:?}") })?,
        ExprKind::Scale(c, x) => eval_tensor(x, env, n)?.scale(&S::from_rational(&c.eval_int(n as i64))),
        ExprKind::Unary(op, x) => {
            let t = eval_tensor(x, env, n)?;
            let (l, r) = (t.out_axes(), t.shape().len());
            match op {
                Unary::Adj => t.adjoint(),
                Unary::Asym => {
                    if l % 2 == 1 || (r - l) % 2 == 1 {
                        return arity_err(e.pos, "asym needs an even number of points per row".into());
                    }
                    let half = S::from_rational(&BigRational::new(1.into(), 2.into()));
                    let mut acc = t;
                    for a in (0..r).step_by(2) {
                        let mut perm: Vec<usize> = (0..r).collect();
                        perm.swap(a, a + 1);
                        acc = acc.sub(&acc.permute_axes(&perm, l)?)?.scale(&half);
                    }
                    acc
                }
                Unary::Rot(side, row) => {
                    let mut axes: Vec<usize> = (0..r).collect();
                    let (perm, out) = match (row, side) {
                        (Row::Upper, _) if l == r => return arity_err(e.pos, "cannot rotate from an empty row".into()),
                        (Row::Lower, _) if l == 0 => return arity_err(e.pos, "cannot rotate from an empty row".into()),
                        (Row::Upper, Side::Left) => {
                            let a = axes.remove(l);
                            axes.insert(0, a);
                            (axes, l + 1)
                        }
                        (Row::Upper, Side::Right) => {
                            let a = axes.remove(r - 1);
                            axes.insert(l, a);
                            (axes, l + 1)
                        }
                        (Row::Lower, Side::Left) => {
                            let a = axes.remove(0);
                            axes.insert(l - 1, a);
                            (axes, l - 1)
                        }
                        (Row::Lower, Side::Right) => {
                            let a = axes.remove(l - 1);
                            axes.push(a);
                            (axes, l - 1)
                        }
                    };
                    t.permute_axes(&perm, out)?
                }
            }
        }
        ExprKind::Binary(Binary::Compose, a, b) => {
            if staged(a) {
                apply_out(a, eval_tensor(b, env, n)?, 0, env, n)?
            } else if staged(b) {
                apply_in(b, eval_tensor(a, env, n)?, 0, env, n)?
            } else {
                eval_tensor(a, env, n)?.compose(&eval_tensor(b, env, n)?)?
            }
        }
        ExprKind::Binary(op, a, b) => {
            let (a, b) = (eval_tensor(a, env, n)?, eval_tensor(b, env, n)?);
            match op {
                Binary::Compose => a.compose(&b)?,
                Binary::Tensor => a.kron(&b)?,
                Binary::Add => a.add(&b)?,
                Binary::Sub => a.sub(&b)?,
            }
        }
    })
}

/// Identifiers referenced by `e`, each once.
pub fn names_in(e: &Expr) -> Vec<String> {
    fn walk(e: &Expr, out: &mut Vec<String>) {
        match &e.kind {
            ExprKind::Name(n) if !out.contains(n) => out.push(n.clone()),
            ExprKind::Scale(_, x) | ExprKind::Unary(_, x) => walk(x, out),
            ExprKind::Binary(_, a, b) => {
                walk(a, out);
                walk(b, out);
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(e, &mut out);
    out
}

fn staged(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Binary(Binary::Compose, ..) => true,
        ExprKind::Binary(Binary::Tensor, ..) => true,
        ExprKind::Scale(_, x) => staged(x),
        _ => false,
    }
}

/// (inputs, outputs) of an expression over tensor values.
pub(crate) fn tensor_arity<S: Scalar>(e: &Expr, env: &TensorEnv<S>) -> Result<(usize, usize)> {
    match &e.kind {
        ExprKind::Name(name) => match env.get(name) {
            Some(t) => Ok((t.shape().len() - t.out_axes(), t.out_axes())),
            None => parse_err(e.pos, format!("unknown identifier {name:?}")),
        },
        ExprKind::Scale(_, x) => tensor_arity(x, env),
        ExprKind::Unary(op, x) => {
            let (k, l) = tensor_arity(x, env)?;
            Ok(match op {
                Unary::Adj => (l, k),
                Unary::Asym => (k, l),
                Unary::Rot(_, Row::Upper) => (k.saturating_sub(1), l + 1),
                Unary::Rot(_, Row::Lower) => (k + 1, l.saturating_sub(1)),
            })
        }
        ExprKind::Binary(op, a, b) => {
            let (ka, la) = tensor_arity(a, env)?;
            let (kb, lb) = tensor_arity(b, env)?;
            Ok(match op {
                Binary::Tensor => (ka + kb, la + lb),
                Binary::Compose => (kb, la),
                Binary::Add | Binary::Sub => (ka, la),
            })
        }
        _ => check(e, &Env::new()),
    }
}

/// Computes (id(offset) ox f ox id) * acc without materializing compositions or identity factors inside f.
pub fn apply_out<S: Scalar>(f: &Expr, acc: SparseTensor<S>, offset: usize, env: &TensorEnv<S>, n: usize) -> Result<SparseTensor<S>> {
    if identity_width(f).is_some() {
        return Ok(acc);
    }
    match &f.kind {
        ExprKind::Binary(Binary::Compose, a, b) => {
            let acc = apply_out(b, acc, offset, env, n)?;
            apply_out(a, acc, offset, env, n)
        }
        ExprKind::Binary(Binary::Tensor, ..) => {
            let (mut acc, mut offset) = (acc, offset);
            for g in tensor_factors(f) {
                let (_, l) = tensor_arity(g, env)?;
                acc = apply_out(g, acc, offset, env, n)?;
                offset += l;
            }
            Ok(acc)
        }
        ExprKind::Scale(c, x) => Ok(apply_out(x, acc, offset, env, n)?.scale(&S::from_rational(&c.eval_int(n as i64)))),
        _ => acc.apply_on_outputs(offset, &eval_tensor(f, env, n)?),
    }
}

/// Computes acc * (id(offset) ox f ox id), the input-side counterpart of [`apply_out`].
pub fn apply_in<S: Scalar>(f: &Expr, acc: SparseTensor<S>, offset: usize, env: &TensorEnv<S>, n: usize) -> Result<SparseTensor<S>> {
    if identity_width(f).is_some() {
        return Ok(acc);
    }
    match &f.kind {
        ExprKind::Binary(Binary::Compose, a, b) => {
            let acc = apply_in(a, acc, offset, env, n)?;
            apply_in(b, acc, offset, env, n)
        }
        ExprKind::Binary(Binary::Tensor, ..) => {
            let (mut acc, mut offset) = (acc, offset);
            for g in tensor_factors(f) {
                let (k, _) = tensor_arity(g, env)?;
                acc = apply_in(g, acc, offset, env, n)?;
                offset += k;
            }
            Ok(acc)
        }
        ExprKind::Scale(c, x) => Ok(apply_in(x, acc, offset, env, n)?.scale(&S::from_rational(&c.eval_int(n as i64)))),
        _ => acc.apply_on_inputs(offset, &eval_tensor(f, env, n)?),
    }
}

/// Replaces names bound in `map` by their expressions.
pub fn substitute(e: &Expr, map: &BTreeMap<String, Expr>) -> Expr {
    let kind = match &e.kind {
        ExprKind::Name(n) => match map.get(n) {
            Some(x) => return x.clone(),
            None => e.kind.clone(),
        },
        ExprKind::Scale(c, x) => ExprKind::Scale(c.clone(), Box::new(substitute(x, map))),
        ExprKind::Unary(op, x) => ExprKind::Unary(*op, Box::new(substitute(x, map))),
        ExprKind::Binary(op, a, b) => ExprKind::Binary(*op, Box::new(substitute(a, map)), Box::new(substitute(b, map))),
        _ => e.kind.clone(),
    };
    Expr { kind, pos: e.pos }
}

/// Operands of a left-nested "ox" chain, in order.
pub(crate) fn tensor_factors(e: &Expr) -> Vec<&Expr> {
    match &e.kind {
        ExprKind::Binary(Binary::Tensor, a, b) => {
            let mut v = tensor_factors(a);
            v.extend(tensor_factors(b));
            v
        }
        _ => vec![e],
    }
}

pub(crate) fn identity_width(e: &Expr) -> Option<usize> {
    match &e.kind {
        ExprKind::Builtin(Builtin::Id(k)) => Some(*k),
        ExprKind::Literal(p) if *p == Partition::identity(p.k()) => Some(p.k()),
        _ => None,
    }
}

/// Parses and evaluates in one step.
pub fn eval_str(text: &str, env: &Env) -> Result<PartLin> {
    eval(&parse(text)?, env)
}

/// The single coefficient of a one-term combination, if it is one.
pub fn single_coefficient(v: &PartLin) -> Option<(PolyQ, Partition)> {
    let mut it = v.terms().iter();
    let (p, c) = it.next()?;
    it.next().is_none().then(|| (c.clone(), p.clone()))
}

/// Rational polynomial that is 1 when empty; convenience for callers building scale nodes.
pub fn unit() -> PolyQ {
    PolyQ::constant(BigRational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partlin::antisym2;
    use proptest::prelude::*;

    fn ev(s: &str) -> PartLin {
        eval_str(s, &Env::new()).unwrap()
    }

    #[test]
    fn examples() {
        let e = parse("compose(cap, cup)").unwrap();
        assert!(matches!(e.kind, ExprKind::Binary(Binary::Compose, ..)));
        assert_eq!(ev("compose(cap, cup)").to_string(), "n · P(0,0){}");
        assert_eq!(ev("cap * cup"), ev("compose(cap, cup)"));
        let s = parse("scale(poly(n-4), pk(5))").unwrap();
        assert!(matches!(s.kind, ExprKind::Scale(..)));
        assert_eq!(ev("asym(id2)"), antisym2());
        assert_eq!(ev("pk(2)"), PartLin::from_partition(Partition::parse("P(0,4){1' 4' | 2' 3'}").unwrap()));
    }

    #[test]
    fn named_literal() {
        let mut env = Env::new();
        env.bind("cross4", ev("P(4,4){1 3'|2 4'|3 1'|4 2'}"));
        let e = parse("asym(block(2,2)) - asym(cross4)").unwrap();
        assert!(matches!(e.kind, ExprKind::Binary(Binary::Sub, ..)));
        assert!(matches!(eval(&e, &env), Err(Error::Arity(_))));
        assert!(eval_str("asym(block(4,4)) - asym(cross4)", &env).is_ok());
    }

    #[test]
    fn precedence() {
        // "*" binds tighter than "ox", which binds tighter than "+"
        assert_eq!(ev("cap * cup ox id1"), ev("(cap * cup) ox id1"));
        assert_eq!(ev("id1 ox id1 + cross"), ev("(id1 ox id1) + cross"));
        assert_eq!(ev("id2 - cross - id2"), ev("scale(-1, cross)"));
        assert_eq!(ev("-cross + cross").len(), 0);
    }

    #[test]
    fn polynomials() {
        assert_eq!(parse_poly("(n-4)(n-6)(n-8)").unwrap(), PolyQ::from_roots(BigRational::one(), &[4, 6, 8]));
        assert_eq!(parse_poly("poly(1/4*n^2 - 1)").unwrap().to_string(), "1/4*n^2 - 1");
        assert_eq!(parse_poly("2n").unwrap(), PolyQ::n().scale(&BigRational::from_integer(2.into())));
        assert!(parse_poly("n/(n-1)").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        match parse("cap *\n  ) cup") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        match eval_str("cap + id2", &Env::new()) {
            Err(Error::Arity(msg)) => assert!(msg.starts_with("1:5"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(eval_str("foo", &Env::new()), Err(Error::Parse { .. })));
        assert!(matches!(eval_str("cap * cap", &Env::new()), Err(Error::Arity(_))));
        assert!(matches!(eval_str("asym(merge)", &Env::new()), Err(Error::Arity(_))));
        assert!(parse("P(1,1){1 1'").is_err());
    }

    #[test]
    fn tensor_evaluation_agrees_with_functor() {
        let env = TensorEnv::<BigRational>::new();
        for text in [
            "cap * cup",
            "asym(id2)",
            "rotl(cap)",
            "rotr(rotl(cap), lower)",
            "rotr(merge) - rotl(rotl(fork, lower))",
            "asym(pk(2)) * adj(asym(pk(2)))",
            "scale(n-1, cross ox sing) + id2 ox sing",
            "asym(P(2,4){1 1' | 2 4' | 2' 3'}) * asym(P(0,2){1' 2'})",
            "(id(1) ox merge ox id(1)) * (cross ox fork)",
            "block(3,1) * (id(1) ox merge ox id(1))",
            "(merge ox id(1)) * (id(1) ox merge ox id(1)) * (fork ox id(2))",
        ] {
            let e = parse(text).unwrap();
            let lin = eval(&e, &Env::new()).unwrap();
            for n in [2, 3] {
                let direct: crate::QTensor = crate::functor::eval_partlin(&lin, n, false).unwrap();
                assert_eq!(eval_tensor(&e, &env, n).unwrap(), direct, "{text} at {n}");
            }
        }
    }

    #[test]
    fn rotations() {
        assert_eq!(ev("rotl(cap)").arity(), (1, 1));
        assert_eq!(ev("rotr(rotl(cap), lower)").arity(), (2, 0));
        assert_eq!(ev("rotl(rotl(cap))"), ev("cup"));
    }

    #[test]
    fn printer_examples() {
        let e = parse("scale(1/2, (id2 - cross) * (cap ox cap)) ox adj(pk(1))").unwrap();
        assert_eq!(e.to_string(), "scale(poly(1/2), (id(2) - cross) * (cap ox cap)) ox adj(pk(1))");
        assert_eq!(parse("a - (b - c)").unwrap().to_string(), "a - (b - c)");
        assert_eq!(parse("(a - b) - c").unwrap().to_string(), "a - b - c");
    }

    fn arb_expr() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("cap".to_string()),
            Just("cross".to_string()),
            Just("id(2)".to_string()),
            Just("P(2,1){1 2 | 1'}".to_string()),
            (0usize..3, 0usize..3).prop_map(|(k, l)| format!("block({k},{l})")),
            (1usize..3).prop_map(|k| format!("pk({k})")),
            Just("x".to_string()),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone(), 0usize..4).prop_map(|(a, b, op)| {
                    format!("({a}) {} ({b})", ["*", "ox", "+", "-"][op])
                }),
                (inner.clone(), 0usize..4).prop_map(|(a, op)| match op {
                    0 => format!("adj({a})"),
                    1 => format!("asym({a})"),
                    2 => format!("rotr({a}, lower)"),
                    _ => format!("-{a}"),
                }),
                (inner, -3i64..4).prop_map(|(a, c)| format!("scale(poly({c}*n^2 - 1/3), {a})")),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(text in arb_expr()) {
            let e = parse(&text).unwrap();
            let printed = e.to_string();
            prop_assert_eq!(parse(&printed).unwrap(), e, "{}", printed);
        }

        #[test]
        fn checked_expressions_evaluate(text in arb_expr()) {
            let mut env = Env::new();
            env.bind("x", ev("merge"));
            let e = parse(&text).unwrap();
            if check(&e, &env).is_ok() {
                prop_assert!(eval(&e, &env).is_ok(), "{}", text);
            }
        }
    }
}
