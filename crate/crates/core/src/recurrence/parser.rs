//! Recursive-descent parser for the recurrence language.
//!
//! ```text
//! expr     := term { ("+"|"-") term }
//! term     := factor { ("*"|"/") factor }
//! factor   := base [ "^" exponent ]
//! base     := INT | "n" | "a[" INT "]" | "(" expr ")" | "-" factor
//! exponent := ["-"] INT | "n" | "(" affine ")"
//! affine   := ["+"|"-"] aterm { ("+"|"-") aterm }
//! aterm    := INT | INT ["*"] "n" | "n"
//! ```
//!
//! `a[i]` stands for `a_{n+i}`; the recurrence defines `a_{n+k}` where
//! `k = 1 + max i`.

use num_bigint::BigInt;
use thiserror::Error;

use super::ast::{AffineExponent, Expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("recurrence does not reference any a[i]")]
    EmptyWindow,
}

/// Parses a right-hand side and returns it with its inferred order.
pub fn parse_expression(text: &str) -> Result<(Expr, usize), ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty recurrence"));
    }
    let expr = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(format!("unexpected character '{}'", p.peek_char())));
    }
    let order = expr.max_window_index().ok_or(ParseError::EmptyWindow)? + 1;
    Ok((expr, order))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { position: self.pos, message: message.into() }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_char(&self) -> char {
        std::str::from_utf8(&self.src[self.pos..])
            .ok()
            .and_then(|s| s.chars().next())
            .unwrap_or('?')
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    /// Consumes `c` (after whitespace) if it is next.
    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else if self.at_end() {
            Err(self.error(format!("expected '{}', found end of input", c as char)))
        } else {
            Err(self.error(format!("expected '{}', found '{}'", c as char, self.peek_char())))
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digits parse"))
    }

    fn small_integer(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        let v = self.integer()?;
        i64::try_from(v).map_err(|_| ParseError::Syntax {
            position: start,
            message: "integer too large".into(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let exp = self.exponent()?;
            Ok(Expr::Pow(Box::new(base), exp))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("expected operand, found end of input")),
            Some(b'0'..=b'9') => Ok(Expr::Int(self.integer()?)),
            Some(b'n') => {
                self.pos += 1;
                Ok(Expr::Index)
            }
            Some(b'a') => {
                self.pos += 1;
                self.expect(b'[')?;
                let start = self.pos;
                let idx = self.small_integer()?;
                let idx = usize::try_from(idx).map_err(|_| ParseError::Syntax {
                    position: start,
                    message: "window index out of range".into(),
                })?;
                self.expect(b']')?;
                Ok(Expr::Window(idx))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(_) => Err(self.error(format!("unexpected character '{}'", self.peek_char()))),
        }
    }

    fn exponent(&mut self) -> Result<AffineExponent, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'n') => {
                self.pos += 1;
                Ok(AffineExponent { constant: 0, coeff: 1 })
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.affine()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(AffineExponent::constant(-self.small_integer()?))
            }
            Some(b'0'..=b'9') => Ok(AffineExponent::constant(self.small_integer()?)),
            None => Err(self.error("expected exponent, found end of input")),
            Some(_) => Err(self.error(format!("unexpected character '{}' in exponent", self.peek_char()))),
        }
    }

    fn affine(&mut self) -> Result<AffineExponent, ParseError> {
        let mut acc = AffineExponent::default();
        let mut first = true;
        loop {
            let sign = if self.eat(b'+') {
                1
            } else if self.eat(b'-') {
                -1
            } else if first {
                1
            } else {
                return Ok(acc);
            };
            first = false;
            self.skip_ws();
            if self.peek() == Some(b'n') {
                self.pos += 1;
                acc.coeff += sign;
                continue;
            }
            let v = self.small_integer()?;
            let has_star = self.eat(b'*');
            self.skip_ws();
            if self.peek() == Some(b'n') {
                self.pos += 1;
                acc.coeff += sign * v;
            } else if has_star {
                return Err(self.error("expected 'n' after '*' in exponent"));
            } else {
                acc.constant += sign * v;
            }
        }
    }
}
