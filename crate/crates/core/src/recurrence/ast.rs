use std::fmt;

use num_bigint::BigInt;

use crate::arith::{ArithError, BigRational, DualRational};

/// Integer exponent of the form `constant + coeff·n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AffineExponent {
    pub constant: i64,
    pub coeff: i64,
}

impl AffineExponent {
    pub fn constant(c: i64) -> Self {
        Self { constant: c, coeff: 0 }
    }

    pub fn at(&self, n: i64) -> i64 {
        self.constant + self.coeff * n
    }
}

impl fmt::Display for AffineExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.constant, self.coeff) {
            (c, 0) => write!(f, "{c}"),
            (0, 1) => write!(f, "n"),
            (0, k) => write!(f, "({k}*n)"),
            (c, k) if k < 0 => write!(f, "({c}-{}*n)", -k),
            (c, k) => write!(f, "({c}+{k}*n)"),
        }
    }
}

/// Right-hand side of a windowed recurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    /// The running index `n`.
    Index,
    /// `a[i]`, i.e. `a_{n+i}`.
    Window(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, AffineExponent),
}

impl Expr {
    /// Largest `a[i]` index referenced, if any.
    pub fn max_window_index(&self) -> Option<usize> {
        match self {
            Expr::Int(_) | Expr::Index => None,
            Expr::Window(i) => Some(*i),
            Expr::Neg(e) | Expr::Pow(e, _) => e.max_window_index(),
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                match (l.max_window_index(), r.max_window_index()) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                }
            }
        }
    }

    /// Exact dual evaluation with `a[i] ↦ window[i]` and `n ↦ (n, 0)`.
    ///
    /// Panics if a window index is out of range for `window`; parsed
    /// specs always size the window from the expression.
    pub fn eval(&self, window: &[DualRational], n: i64) -> Result<DualRational, ArithError> {
        Ok(match self {
            Expr::Int(v) => DualRational::real(BigRational::from_integer(v.clone())),
            Expr::Index => DualRational::real(BigRational::from_integer(n.into())),
            Expr::Window(i) => window[*i].clone(),
            Expr::Neg(e) => -e.eval(window, n)?,
            Expr::Add(l, r) => l.eval(window, n)? + r.eval(window, n)?,
            Expr::Sub(l, r) => l.eval(window, n)? - r.eval(window, n)?,
            Expr::Mul(l, r) => l.eval(window, n)? * r.eval(window, n)?,
            Expr::Div(l, r) => l.eval(window, n)?.checked_div(&r.eval(window, n)?)?,
            Expr::Pow(b, e) => b.eval(window, n)?.pow(e.at(n))?,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Index => write!(f, "n"),
            Expr::Window(i) => write!(f, "a[{i}]"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(l, r) => write!(f, "({l} + {r})"),
            Expr::Sub(l, r) => write!(f, "({l} - {r})"),
            Expr::Mul(l, r) => write!(f, "({l} * {r})"),
            Expr::Div(l, r) => write!(f, "({l} / {r})"),
            Expr::Pow(b, e) => write!(f, "({b})^{e}"),
        }
    }
}
