//! Smooth scalar expressions in real variables `x1..xm`.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' uint)?
//! atom   := number | 'x' uint | func '(' expr ')' | '(' expr ')' | '-' atom
//! func   := sin | cos | exp | log
//! ```

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown variable x{index} (expression has {m} variables)")]
    UnknownVariable { index: usize, m: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("expected a point with {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    /// k-th derivative of the primitive at `c`.
    pub fn derivative(self, k: usize, c: f64) -> Result<f64, ExprError> {
        Ok(match self {
            Func::Sin => [c.sin(), c.cos(), -c.sin(), -c.cos()][k % 4],
            Func::Cos => [c.cos(), -c.sin(), -c.cos(), c.sin()][k % 4],
            Func::Exp => c.exp(),
            Func::Log => {
                if c <= 0.0 {
                    return Err(ExprError::Domain(format!("log of non-positive value {c}")));
                }
                if k == 0 {
                    c.ln()
                } else {
                    // (-1)^(k-1) (k-1)! / c^k
                    let fact: f64 = (1..k).map(|i| i as f64).product();
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign * fact / c.powi(k as i32)
                }
            }
        })
    }
}

/// Expression tree. Variables are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    IntPow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
}

// Smart constructors: fold constants and drop additive zeros / unit factors.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (_, Some(0.0)) => a,
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(0.0), _) | (_, Some(0.0)) => Expr::Const(0.0),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
            (Some(0.0), _) => Expr::Const(0.0),
            (_, Some(1.0)) => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn powi(a: Expr, k: u32) -> Expr {
        match (a.as_const(), k) {
            (_, 0) => Expr::Const(1.0),
            (_, 1) => a,
            (Some(x), k) => Expr::Const(x.powi(k as i32)),
            _ => Expr::IntPow(Box::new(a), k),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    /// Largest variable index used (0 if none).
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(j) => *j,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.max_var().max(b.max_var()),
            Expr::IntPow(a, _) | Expr::Call(_, a) => a.max_var(),
        }
    }

    /// Symbolic partial derivative with respect to `x_j`.
    pub fn diff(&self, j: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(i) => Expr::Const(if *i == j { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => Expr::add(a.diff(j), b.diff(j)),
            Expr::Sub(a, b) => Expr::sub(a.diff(j), b.diff(j)),
            Expr::Mul(a, b) => Expr::add(Expr::mul(a.diff(j), (**b).clone()), Expr::mul((**a).clone(), b.diff(j))),
            Expr::Div(a, b) => {
                // (a'b - ab') / b²
                let num = Expr::sub(Expr::mul(a.diff(j), (**b).clone()), Expr::mul((**a).clone(), b.diff(j)));
                Expr::div(num, Expr::powi((**b).clone(), 2))
            }
            Expr::IntPow(_, 0) => Expr::Const(0.0),
            Expr::IntPow(a, k) => {
                Expr::mul(Expr::mul(Expr::Const(*k as f64), Expr::powi((**a).clone(), k - 1)), a.diff(j))
            }
            Expr::Call(f, a) => {
                let inner = a.diff(j);
                if inner.as_const() == Some(0.0) {
                    return Expr::Const(0.0);
                }
                let a = (**a).clone();
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, a),
                    Func::Cos => Expr::sub(Expr::Const(0.0), Expr::call(Func::Sin, a)),
                    Func::Exp => Expr::call(Func::Exp, a),
                    Func::Log => Expr::div(Expr::Const(1.0), a),
                };
                Expr::mul(outer, inner)
            }
        }
    }

    /// Mixed partial `D^p` for the multi-index `p` (entry `j-1` is the order in `x_j`).
    pub fn diff_multi(&self, p: &[u32]) -> Expr {
        let mut e = self.clone();
        for (j, &k) in p.iter().enumerate() {
            for _ in 0..k {
                e = e.diff(j + 1);
            }
        }
        e
    }

    /// Real evaluation at `point` (`point[j-1]` is `x_j`).
    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(j) => *point.get(j - 1).ok_or(ExprError::UnknownVariable { index: *j, m: point.len() })?,
            Expr::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Expr::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Expr::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Expr::Div(a, b) => {
                let d = b.eval(point)?;
                if d == 0.0 {
                    return Err(ExprError::Domain("division by zero".into()));
                }
                a.eval(point)? / d
            }
            Expr::IntPow(a, k) => a.eval(point)?.powi(*k as i32),
            Expr::Call(f, a) => f.derivative(0, a.eval(point)?)?,
        })
    }
}

/// Evaluates `e` at a point of length `m`.
pub fn eval_real(e: &Expr, point: &[f64]) -> Result<f64, ExprError> {
    e.eval(point)
}

/// Fully parenthesised output that `parse` reads back.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => write!(f, "(-{})", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(j) => write!(f, "x{j}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::IntPow(a, k) => write!(f, "({a})^{k}"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    m: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { offset: self.pos, msg: msg.into() })
    }

    fn expect(&mut self, ch: u8) -> Result<(), ExprError> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", ch as char))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == b'+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = if op == b'*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.uint()?;
            let k = u32::try_from(k).or_else(|_| self.err("exponent too large"))?;
            return Ok(Expr::IntPow(Box::new(base), k));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<usize, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected unsigned integer");
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits").parse().or_else(|_| {
            self.pos = start;
            self.err("integer out of range")
        })
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            let b = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > b
        };
        let mut p = self.pos;
        let int = digits(&mut p);
        let mut frac = false;
        if p < s.len() && s[p] == b'.' {
            p += 1;
            frac = digits(&mut p);
        }
        if !int && !frac {
            return self.err("expected number");
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) {
                p = q;
            }
        }
        self.pos = p;
        let text = std::str::from_utf8(&s[start..p]).expect("ascii");
        text.parse().map(Expr::Const).or_else(|_| {
            self.pos = start;
            self.err("malformed number")
        })
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                let a = self.atom()?;
                Ok(match a {
                    Expr::Const(c) => Expr::Const(-c),
                    a => Expr::Sub(Box::new(Expr::Const(0.0)), Box::new(a)),
                })
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(b'x') if self.src.get(self.pos + 1).is_some_and(u8::is_ascii_digit) => {
                let start = self.pos;
                self.pos += 1;
                let j = self.uint()?;
                if j == 0 {
                    self.pos = start;
                    return self.err("variables are numbered from x1");
                }
                if j > self.m {
                    return Err(ExprError::UnknownVariable { index: j, m: self.m });
                }
                Ok(Expr::Var(j))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let f = match name {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    _ => {
                        self.pos = start;
                        return self.err(format!("unknown identifier `{name}`"));
                    }
                };
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Call(f, Box::new(arg)))
            }
            Some(c) => self.err(format!("unexpected character `{}`", c as char)),
        }
    }
}

/// Parses `text` as an expression in the variables `x1..xm`.
pub fn parse(text: &str, m: usize) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, m };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}
