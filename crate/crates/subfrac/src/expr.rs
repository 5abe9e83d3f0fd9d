//! Arithmetic mini-language for configuration files: polynomials,
//! trigonometric and exponential factors over named variables, e.g.
//! `0.2*sin(x) + 0.02*sin(2*x)` or `exp(-t)*(1 + t^2)`.
//!
//! Grammar, with `^` binding tightest and right-associative:
//!
//! ```text
//! sum    := product (('+' | '-') product)*
//! product:= unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | name | name '(' sum ')' | '(' sum ')'
//! ```
//!
//! Names resolve against the caller's variable list plus the constant
//! `pi` and the functions `sin`, `cos`, `exp`. Unknown names are
//! configuration errors, not silent zeros.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Exp,
}

#[derive(Debug, Clone)]
enum Node {
    Num(f64),
    Var(usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Call(Func, Box<Node>),
}

/// Parsed expression over a fixed variable list.
#[derive(Debug, Clone)]
pub struct Expr {
    root: Node,
    arity: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::Open);
                i += 1;
            }
            ')' => {
                out.push(Token::Close);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i], '0'..='9' | '.') {
                    i += 1;
                }
                // exponent suffix like 1e-3
                if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = bytes[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| Error::Config(format!("expression: bad number {text:?}")))?;
                out.push(Token::Num(v));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                out.push(Token::Name(bytes[start..i].iter().collect()));
            }
            _ => return Err(Error::Config(format!("expression: unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_close(&mut self) -> Result<()> {
        match self.next() {
            Some(Token::Close) => Ok(()),
            _ => Err(Error::Config("expression: missing ')'".into())),
        }
    }

    fn sum(&mut self) -> Result<Node> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Node::Num(v)),
            Some(Token::Open) => {
                let inner = self.sum()?;
                self.expect_close()?;
                Ok(inner)
            }
            Some(Token::Name(name)) => {
                let func = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    _ => None,
                };
                if let Some(f) = func {
                    match self.next() {
                        Some(Token::Open) => {}
                        _ => {
                            return Err(Error::Config(format!(
                                "expression: {name} needs an argument in parentheses"
                            )))
                        }
                    }
                    let arg = self.sum()?;
                    self.expect_close()?;
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Node::Num(std::f64::consts::PI));
                }
                if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Node::Var(idx));
                }
                Err(Error::Config(format!(
                    "expression: unknown name {name:?}; expected one of {:?}, pi, sin, cos, exp",
                    self.vars
                )))
            }
            other => Err(Error::Config(format!(
                "expression: expected a value, got {other:?}"
            ))),
        }
    }
}

impl Expr {
    pub fn parse(src: &str, vars: &[&str]) -> Result<Self> {
        if src.trim().is_empty() {
            return Err(Error::Config("expression: empty input".into()));
        }
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, vars };
        let root = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Config(format!(
                "expression: trailing input at token {:?}",
                p.tokens[p.pos]
            )));
        }
        Ok(Expr { root, arity: vars.len() })
    }

    pub fn eval(&self, vals: &[f64]) -> Result<f64> {
        if vals.len() != self.arity {
            return Err(Error::Config(format!(
                "expression: {} values for {} variables",
                vals.len(),
                self.arity
            )));
        }
        Ok(eval_node(&self.root, vals))
    }
}

fn eval_node(node: &Node, vals: &[f64]) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::Var(i) => vals[*i],
        Node::Add(a, b) => eval_node(a, vals) + eval_node(b, vals),
        Node::Sub(a, b) => eval_node(a, vals) - eval_node(b, vals),
        Node::Mul(a, b) => eval_node(a, vals) * eval_node(b, vals),
        Node::Div(a, b) => eval_node(a, vals) / eval_node(b, vals),
        Node::Pow(a, b) => eval_node(a, vals).powf(eval_node(b, vals)),
        Node::Neg(a) => -eval_node(a, vals),
        Node::Call(f, a) => {
            let v = eval_node(a, vals);
            match f {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Exp => v.exp(),
            }
        }
    }
}
