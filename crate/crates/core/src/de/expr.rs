//! Coefficient expressions: a small recursive-descent parser, an evaluator
//! that reports domain errors, and a canonical printer.
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := factor (("*"|"/") factor)* ;
//! factor := base ("^" factor)? ;
//! base   := NUMBER | VAR | FUNC "(" expr ")" | "(" expr ")" | "-" base ;
//! FUNC   := "sin"|"cos"|"tan"|"exp"|"ln" ;  VAR := "t"|"x"|"y" ;
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{func} is undefined at {arg}")]
    Domain { func: &'static str, arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite result")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }

    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 3,
        }
    }

    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

/// Variable bindings for evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Env {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl Env {
    pub fn at_t(t: f64) -> Self {
        Env { t, ..Env::default() }
    }

    pub fn at_xy(x: f64, y: f64) -> Self {
        Env { x, y, ..Env::default() }
    }
}

// |cos| below this is treated as a pole of tan
const TAN_POLE_TOL: f64 = 1e-12;

impl Expr {
    pub fn eval(&self, env: &Env) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::T) => env.t,
            Expr::Var(Var::X) => env.x,
            Expr::Var(Var::Y) => env.y,
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Call(f, arg) => {
                let a = arg.eval(env)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => {
                        if a.cos().abs() < TAN_POLE_TOL {
                            return Err(EvalError::Domain { func: "tan", arg: a });
                        }
                        a.tan()
                    }
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if a <= 0.0 {
                            return Err(EvalError::Domain { func: "ln", arg: a });
                        }
                        a.ln()
                    }
                }
            }
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.eval(env)?, r.eval(env)?);
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        l / r
                    }
                    BinOp::Pow => {
                        let v = l.powf(r);
                        if v.is_nan() {
                            return Err(EvalError::Domain { func: "pow", arg: l });
                        }
                        v
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    fn is_binary(&self) -> bool {
        matches!(self, Expr::Bin(..))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.precedence(),
            _ => u8::MAX,
        }
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        write!(f, "{v:e}")
    } else {
        write!(f, "{v}")
    }
}

fn write_paren(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 => {
                f.write_str("(")?;
                write_num(f, *v)?;
                f.write_str(")")
            }
            Expr::Num(v) => write_num(f, *v),
            Expr::Var(Var::T) => f.write_str("t"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_paren(f, e, e.is_binary())
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
            Expr::Bin(BinOp::Pow, l, r) => {
                write_paren(f, l, l.is_binary())?;
                f.write_str("^")?;
                write_paren(f, r, r.precedence() < BinOp::Pow.precedence())
            }
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                write_paren(f, l, l.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_paren(f, r, r.precedence() <= p)
            }
        }
    }
}

/// A parsed coefficient function of `t` (or of `x`, `y`).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientExpr {
    root: Expr,
}

impl CoefficientExpr {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let mut p = Parser { src, pos: 0 };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < src.len() {
            return Err(p.syntax("unexpected trailing input"));
        }
        Ok(CoefficientExpr { root })
    }

    pub fn constant(v: f64) -> Self {
        CoefficientExpr { root: Expr::Num(v) }
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    /// The value when the expression mentions no variable and evaluates.
    pub fn constant_value(&self) -> Option<f64> {
        fn has_var(e: &Expr) -> bool {
            match e {
                Expr::Num(_) => false,
                Expr::Var(_) => true,
                Expr::Neg(e) | Expr::Call(_, e) => has_var(e),
                Expr::Bin(_, l, r) => has_var(l) || has_var(r),
            }
        }
        if has_var(&self.root) {
            None
        } else {
            self.root.eval(&Env::default()).ok()
        }
    }

    pub fn eval(&self, env: &Env) -> Result<f64, EvalError> {
        self.root.eval(env)
    }

    pub fn eval_t(&self, t: f64) -> Result<f64, EvalError> {
        self.root.eval(&Env::at_t(t))
    }
}

impl FromStr for CoefficientExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CoefficientExpr::parse(s)
    }
}

impl fmt::Display for CoefficientExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_owned(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.factor()?));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.eat(b'^') {
            Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.factor()?)))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.base()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        self.digits();
        if self.peek() == Some(b'.') {
            self.pos += 1;
            if self.digits() == 0 {
                return Err(self.syntax("expected digits after `.`"));
            }
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                return Err(self.syntax("expected exponent digits"));
            }
        }
        let v: f64 = self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError::Syntax {
                offset: start,
                message: "malformed number".into(),
            })?;
        if !v.is_finite() {
            return Err(ParseError::Syntax {
                offset: start,
                message: "number out of range".into(),
            });
        }
        Ok(Expr::Num(v))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        match name {
            "t" => return Ok(Expr::Var(Var::T)),
            "x" => return Ok(Expr::Var(Var::X)),
            "y" => return Ok(Expr::Var(Var::Y)),
            _ => {}
        }
        let Some(func) = Func::lookup(name) else {
            return Err(ParseError::UnknownIdentifier {
                offset: start,
                name: name.to_owned(),
            });
        };
        if !self.eat(b'(') {
            return Err(self.syntax("expected `(` after function name"));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.syntax("expected `)`"));
        }
        Ok(Expr::Call(func, Box::new(arg)))
    }
}
