//! Expression parsing.
//!
//! Grammar (the exact ring accepts the restriction of this to sin/cos of an
//! angle coordinate and no exp; the numeric verification path evaluates the
//! full tree):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := base ("^" int)?
//! base   := rational | ident | "sin" "(" expr ")" | "cos" "(" expr ")"
//!         | "exp" "(" expr ")" | "(" expr ")" | "-" factor
//! ```

use super::{Chart, NumericPoint, Q, RingError, ScalarField};
use num_bigint::BigInt;
use num_traits::Zero;
use std::str::FromStr;

/// A parsed expression tree. Exact lowering and numeric evaluation share it.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Rational(Q),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

pub fn parse_expression(text: &str) -> Result<Expr, RingError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> RingError {
        RingError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), RingError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, RingError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, RingError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, RingError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let e = self.integer_literal()?;
            Ok(Expr::Pow(Box::new(base), e))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr, RingError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.skip_ws();
                let f = self.factor()?;
                Ok(Expr::Neg(Box::new(f)))
            }
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.unsigned_integer()?;
                self.skip_ws();
                Ok(Expr::Rational(Q::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let id = self.identifier();
                self.skip_ws();
                match id.as_str() {
                    "sin" | "cos" | "exp" if self.peek() == Some(b'(') => {
                        self.pos += 1;
                        self.skip_ws();
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(match id.as_str() {
                            "sin" => Expr::Sin(Box::new(arg)),
                            "cos" => Expr::Cos(Box::new(arg)),
                            _ => Expr::Exp(Box::new(arg)),
                        })
                    }
                    _ => Ok(Expr::Var(id)),
                }
            }
            Some(_) => Err(self.err("expected a number, identifier or parenthesis")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn identifier(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn unsigned_integer(&mut self) -> Result<BigInt, RingError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        BigInt::from_str(text).map_err(|_| self.err("integer literal out of range"))
    }

    fn integer_literal(&mut self) -> Result<i64, RingError> {
        let neg = self.eat(b'-');
        let n = self.unsigned_integer()?;
        self.skip_ws();
        let v: i64 = (&n)
            .try_into()
            .map_err(|_| self.err("exponent out of range"))?;
        Ok(if neg { -v } else { v })
    }
}

impl Expr {
    /// Lower into the exact ring. sin/cos must wrap exactly an angle
    /// coordinate; exp is rejected.
    pub fn to_scalar_field(&self, chart: &Chart) -> Result<ScalarField, RingError> {
        match self {
            Expr::Rational(q) => Ok(ScalarField::rational(chart, q.clone())),
            Expr::Var(name) => {
                let i = chart
                    .coord_index(name)
                    .ok_or_else(|| RingError::UnknownIdentifier(name.clone()))?;
                ScalarField::coordinate(chart, i)
            }
            Expr::Add(a, b) => Ok(a.to_scalar_field(chart)?.add(&b.to_scalar_field(chart)?)),
            Expr::Sub(a, b) => Ok(a.to_scalar_field(chart)?.sub(&b.to_scalar_field(chart)?)),
            Expr::Mul(a, b) => Ok(a.to_scalar_field(chart)?.mul(&b.to_scalar_field(chart)?)),
            Expr::Div(a, b) => a.to_scalar_field(chart)?.div(&b.to_scalar_field(chart)?),
            Expr::Neg(a) => Ok(a.to_scalar_field(chart)?.neg()),
            Expr::Pow(a, e) => a.to_scalar_field(chart)?.pow(*e),
            Expr::Sin(arg) => match arg.as_ref() {
                Expr::Var(name) => {
                    let i = chart
                        .coord_index(name)
                        .ok_or_else(|| RingError::UnknownIdentifier(name.clone()))?;
                    ScalarField::sin_of(chart, i)
                }
                _ => Err(RingError::NotInRing("sin of a compound expression".into())),
            },
            Expr::Cos(arg) => match arg.as_ref() {
                Expr::Var(name) => {
                    let i = chart
                        .coord_index(name)
                        .ok_or_else(|| RingError::UnknownIdentifier(name.clone()))?;
                    ScalarField::cos_of(chart, i)
                }
                _ => Err(RingError::NotInRing("cos of a compound expression".into())),
            },
            Expr::Exp(_) => Err(RingError::NotInRing("exp".into())),
        }
    }

    /// Numeric evaluation at a point of the chart (used by the closed-form
    /// verification path, where exp and compound sin/cos are allowed).
    pub fn eval(&self, p: &NumericPoint) -> Result<f64, RingError> {
        let v = self.eval_inner(p)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(RingError::PoleAtPoint)
        }
    }

    fn eval_inner(&self, p: &NumericPoint) -> Result<f64, RingError> {
        Ok(match self {
            Expr::Rational(q) => {
                use num_traits::ToPrimitive;
                q.to_f64().unwrap_or(f64::NAN)
            }
            Expr::Var(name) => {
                let i = p
                    .chart()
                    .coord_index(name)
                    .ok_or_else(|| RingError::UnknownIdentifier(name.clone()))?;
                p.value(i)
            }
            Expr::Add(a, b) => a.eval_inner(p)? + b.eval_inner(p)?,
            Expr::Sub(a, b) => a.eval_inner(p)? - b.eval_inner(p)?,
            Expr::Mul(a, b) => a.eval_inner(p)? * b.eval_inner(p)?,
            Expr::Div(a, b) => {
                let d = b.eval_inner(p)?;
                if d.abs() < 1e-300 {
                    return Err(RingError::PoleAtPoint);
                }
                a.eval_inner(p)? / d
            }
            Expr::Neg(a) => -a.eval_inner(p)?,
            Expr::Pow(a, e) => a.eval_inner(p)?.powi(*e as i32),
            Expr::Sin(a) => a.eval_inner(p)?.sin(),
            Expr::Cos(a) => a.eval_inner(p)?.cos(),
            Expr::Exp(a) => a.eval_inner(p)?.exp(),
        })
    }

    /// Symbolic partial derivative of the tree with respect to a named
    /// coordinate; used to evaluate exterior derivatives of closed-form
    /// coefficients without finite differencing.
    pub fn diff(&self, var: &str) -> Expr {
        match self {
            Expr::Rational(_) => Expr::Rational(Q::zero()),
            Expr::Var(name) => {
                if name == var {
                    Expr::Rational(Q::from_integer(1.into()))
                } else {
                    Expr::Rational(Q::zero())
                }
            }
            Expr::Add(a, b) => Expr::Add(Box::new(a.diff(var)), Box::new(b.diff(var))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.diff(var)), Box::new(b.diff(var))),
            Expr::Mul(a, b) => Expr::Add(
                Box::new(Expr::Mul(Box::new(a.diff(var)), b.clone())),
                Box::new(Expr::Mul(a.clone(), Box::new(b.diff(var)))),
            ),
            Expr::Div(a, b) => {
                // (a/b)' = (a'b - ab')/b^2
                let num = Expr::Sub(
                    Box::new(Expr::Mul(Box::new(a.diff(var)), b.clone())),
                    Box::new(Expr::Mul(a.clone(), Box::new(b.diff(var)))),
                );
                Expr::Div(Box::new(num), Box::new(Expr::Pow(b.clone(), 2)))
            }
            Expr::Neg(a) => Expr::Neg(Box::new(a.diff(var))),
            Expr::Pow(a, e) => {
                if *e == 0 {
                    return Expr::Rational(Q::zero());
                }
                Expr::Mul(
                    Box::new(Expr::Mul(
                        Box::new(Expr::Rational(Q::from_integer((*e).into()))),
                        Box::new(Expr::Pow(a.clone(), e - 1)),
                    )),
                    Box::new(a.diff(var)),
                )
            }
            Expr::Sin(a) => Expr::Mul(Box::new(Expr::Cos(a.clone())), Box::new(a.diff(var))),
            Expr::Cos(a) => Expr::Neg(Box::new(Expr::Mul(
                Box::new(Expr::Sin(a.clone())),
                Box::new(a.diff(var)),
            ))),
            Expr::Exp(a) => Expr::Mul(Box::new(self.clone()), Box::new(a.diff(var))),
        }
    }
}

/// Parse directly into the exact ring.
pub fn parse_scalar(chart: &Chart, text: &str) -> Result<ScalarField, RingError> {
    parse_expression(text)?.to_scalar_field(chart)
}
