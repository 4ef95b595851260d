//! Scalar expressions in one variable `x`, used for the coefficient
//! functions `b(x)`, `c(x)` and the data `f(x)`.
//!
//! Grammar (whitespace ignored, `−` accepted as well as `-`):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'x' | 'pi' | 'e' | ident '(' expr (',' expr)? ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so
//! `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Pow,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        if self == Func::Pow {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    X,
    Pi,
    E,
    Neg(Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            Node::Neg(_) => 3,
            Node::Binary(BinaryOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn write(&self, out: &mut String) {
        match self {
            Node::Const(v) => out.push_str(&format!("{v:?}")),
            Node::X => out.push('x'),
            Node::Pi => out.push_str("pi"),
            Node::E => out.push('e'),
            Node::Neg(inner) => {
                out.push('-');
                inner.write_wrapped(out, inner.precedence() < 3);
            }
            Node::Binary(op, l, r) => {
                let p = self.precedence();
                let (sym, right_assoc) = match op {
                    BinaryOp::Add => (" + ", false),
                    BinaryOp::Sub => (" - ", false),
                    BinaryOp::Mul => (" * ", false),
                    BinaryOp::Div => (" / ", false),
                    BinaryOp::Pow => ("^", true),
                };
                let lp = l.precedence();
                let rp = r.precedence();
                l.write_wrapped(out, lp < p || (right_assoc && lp == p));
                out.push_str(sym);
                r.write_wrapped(out, rp < p || (!right_assoc && rp == p));
            }
            Node::Call(f, args) => {
                out.push_str(f.name());
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    a.write(out);
                }
                out.push(')');
            }
        }
    }

    fn write_wrapped(&self, out: &mut String, parens: bool) {
        if parens {
            out.push('(');
            self.write(out);
            out.push(')');
        } else {
            self.write(out);
        }
    }

    fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }

    fn eval(&self, x: f64) -> Result<f64> {
        let fail = |msg: &str| Error::Eval { node: self.render(), message: msg.to_string() };
        let v = match self {
            Node::Const(v) => *v,
            Node::X => x,
            Node::Pi => std::f64::consts::PI,
            Node::E => std::f64::consts::E,
            Node::Neg(inner) => -inner.eval(x)?,
            Node::Binary(op, l, r) => {
                let a = l.eval(x)?;
                let b = r.eval(x)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(fail("division by zero"));
                        }
                        a / b
                    }
                    BinaryOp::Pow => a.powf(b),
                }
            }
            Node::Call(f, args) => {
                let a = args[0].eval(x)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(fail(&format!("log of nonpositive value {a}")));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(fail(&format!("sqrt of negative value {a}")));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                    Func::Pow => a.powf(args[1].eval(x)?),
                }
            }
        };
        if v.is_nan() {
            return Err(fail("result is not a number"));
        }
        Ok(v)
    }
}

/// A parsed expression in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
}

impl Expression {
    pub fn parse(src: &str) -> Result<Self> {
        Parser::new(src).parse()
    }

    pub fn from_node(root: Node) -> Self {
        Self { root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Canonical text form; `parse(render(e))` reproduces the tree.
    pub fn render(&self) -> String {
        self.root.render()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.root.eval(x)
    }

    /// True when the tree is a single numeric literal equal to `v`.
    pub fn is_constant(&self, v: f64) -> bool {
        matches!(self.root, Node::Const(c) if c == v)
    }

    /// True when the tree does not mention `x`.
    pub fn is_x_free(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::X => false,
                Node::Const(_) | Node::Pi | Node::E => true,
                Node::Neg(i) => walk(i),
                Node::Binary(_, l, r) => walk(l) && walk(r),
                Node::Call(_, args) => args.iter().all(walk),
            }
        }
        walk(&self.root)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for Expression {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Expression::parse(s)
    }
}

impl Serialize for Expression {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Expression {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Expression::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
}

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset, message: message.into() }
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0, tok: Tok::End, tok_start: 0 }
    }

    fn parse(mut self) -> Result<Expression> {
        if self.src.trim().is_empty() {
            return Err(parse_err(0, "empty expression"));
        }
        self.advance()?;
        let root = self.expr()?;
        if self.tok != Tok::End {
            return Err(parse_err(self.tok_start, format!("unexpected trailing input {:?}", self.tok)));
        }
        Ok(Expression { root })
    }

    fn advance(&mut self) -> Result<()> {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
        self.tok_start = self.pos;
        let mut chars = trimmed.chars();
        let Some(c) = chars.next() else {
            self.tok = Tok::End;
            return Ok(());
        };
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += c.len_utf8();
            self.tok = t;
            return Ok(());
        }
        if c.is_ascii_digit() || c == '.' {
            let len = number_len(trimmed);
            let text = &trimmed[..len];
            let v: f64 = text
                .parse()
                .map_err(|_| parse_err(self.tok_start, format!("malformed number `{text}`")))?;
            if !v.is_finite() {
                return Err(parse_err(self.tok_start, format!("number `{text}` overflows")));
            }
            self.pos += len;
            self.tok = Tok::Num(v);
            return Ok(());
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = trimmed
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(trimmed.len());
            self.tok = Tok::Ident(trimmed[..len].to_string());
            self.pos += len;
            return Ok(());
        }
        Err(parse_err(self.tok_start, format!("unexpected character `{c}`")))
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.tok == Tok::Minus {
            self.advance()?;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if self.tok == Tok::Caret {
            self.advance()?;
            let exponent = self.unary()?;
            return Ok(Node::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.tok != want {
            return Err(parse_err(self.tok_start, format!("expected {what}")));
        }
        self.advance()
    }

    fn primary(&mut self) -> Result<Node> {
        let start = self.tok_start;
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Node::Const(v))
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.advance()?;
                match name.as_str() {
                    "x" => return Ok(Node::X),
                    "pi" => return Ok(Node::Pi),
                    "e" => return Ok(Node::E),
                    _ => {}
                }
                let f = Func::from_name(&name)
                    .ok_or_else(|| parse_err(start, format!("unknown identifier `{name}`")))?;
                self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                let mut args = vec![self.expr()?];
                if self.tok == Tok::Comma {
                    self.advance()?;
                    args.push(self.expr()?);
                }
                if args.len() != f.arity() {
                    return Err(parse_err(
                        start,
                        format!("`{name}` takes {} argument(s), got {}", f.arity(), args.len()),
                    ));
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Node::Call(f, args))
            }
            Tok::End => Err(parse_err(start, "unexpected end of input")),
            other => Err(parse_err(start, format!("unexpected token {other:?}"))),
        }
    }
}

/// Length of the numeric literal at the start of `s`: digits, an optional
/// fraction and an optional exponent.
fn number_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}
