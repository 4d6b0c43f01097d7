//! Reference sequences computed from closed forms and classical two-term
//! recurrences, independent of the dual-number engine.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OracleId {
    Naturals,
    Tetrahedral,
    TetrahedralMinusOne,
    Fibonacci,
    FibSelfConv,
    Catalan,
    CentralBinomial,
    DoubleBinomial,
    OddFibonacci,
    OddPell,
    Pell,
    BisectionConv,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("index {index} is below the offset {offset} of {id}")]
    IndexBelowOffset { id: OracleId, index: i64, offset: i64 },
    #[error("unknown oracle '{0}'")]
    Unknown(String),
}

impl OracleId {
    pub const ALL: [OracleId; 12] = [
        OracleId::Naturals,
        OracleId::Tetrahedral,
        OracleId::TetrahedralMinusOne,
        OracleId::Fibonacci,
        OracleId::FibSelfConv,
        OracleId::Catalan,
        OracleId::CentralBinomial,
        OracleId::DoubleBinomial,
        OracleId::OddFibonacci,
        OracleId::OddPell,
        OracleId::Pell,
        OracleId::BisectionConv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OracleId::Naturals => "naturals",
            OracleId::Tetrahedral => "tetrahedral",
            OracleId::TetrahedralMinusOne => "tetrahedral-minus-one",
            OracleId::Fibonacci => "fibonacci",
            OracleId::FibSelfConv => "fib_self_conv",
            OracleId::Catalan => "catalan",
            OracleId::CentralBinomial => "central_binomial",
            OracleId::DoubleBinomial => "double_binomial",
            OracleId::OddFibonacci => "odd_fibonacci",
            OracleId::OddPell => "odd_pell",
            OracleId::Pell => "pell",
            OracleId::BisectionConv => "bisection_conv",
        }
    }

    /// OEIS number of the sequence this oracle reproduces.
    pub fn oeis(self) -> &'static str {
        match self {
            OracleId::Naturals => "A000027",
            OracleId::Tetrahedral => "A000292",
            OracleId::TetrahedralMinusOne => "A062748",
            OracleId::Fibonacci => "A000045",
            OracleId::FibSelfConv => "A001629",
            OracleId::Catalan => "A000108",
            OracleId::CentralBinomial => "A000984",
            OracleId::DoubleBinomial => "A162551",
            OracleId::OddFibonacci => "A001519",
            OracleId::OddPell => "A001653",
            OracleId::Pell => "A000129",
            OracleId::BisectionConv => "A238846",
        }
    }

    /// Smallest valid index.
    pub fn offset(self) -> i64 {
        match self {
            OracleId::Naturals
            | OracleId::Tetrahedral
            | OracleId::TetrahedralMinusOne
            | OracleId::Fibonacci
            | OracleId::FibSelfConv
            | OracleId::OddFibonacci
            | OracleId::OddPell => 1,
            OracleId::Catalan
            | OracleId::CentralBinomial
            | OracleId::DoubleBinomial
            | OracleId::Pell
            | OracleId::BisectionConv => 0,
        }
    }

    pub fn term(self, n: i64) -> Result<BigInt, OracleError> {
        oracle_term(self, n)
    }

    /// `count` consecutive terms from the offset.
    pub fn terms(self, count: usize) -> Vec<BigInt> {
        let o = self.offset();
        (0..count as i64)
            .map(|i| oracle_term(self, o + i).expect("index at or above offset"))
            .collect()
    }
}

impl fmt::Display for OracleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OracleId {
    type Err = OracleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OracleId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| OracleError::Unknown(s.to_string()))
    }
}

pub fn oracle_term(id: OracleId, n: i64) -> Result<BigInt, OracleError> {
    if n < id.offset() {
        return Err(OracleError::IndexBelowOffset { id, index: n, offset: id.offset() });
    }
    let big = BigInt::from(n);
    Ok(match id {
        OracleId::Naturals => big,
        OracleId::Tetrahedral => tetrahedral(&big),
        OracleId::TetrahedralMinusOne => tetrahedral(&big) - 1,
        OracleId::Fibonacci => fibonacci(n),
        OracleId::FibSelfConv => {
            // ((n-1) F_n + 2n F_{n-1}) / 5
            let num = (&big - 1) * fibonacci(n) + 2 * &big * fibonacci(n - 1);
            num / 5
        }
        OracleId::Catalan => binomial(2 * n, n) / (n + 1),
        OracleId::CentralBinomial => binomial(2 * n, n),
        OracleId::DoubleBinomial => 2 * binomial(2 * n, n - 1),
        OracleId::OddFibonacci => fibonacci(2 * n - 1),
        OracleId::OddPell => pell(2 * n - 1),
        OracleId::Pell => pell(n),
        OracleId::BisectionConv => {
            convolution(|i| fibonacci(2 * i + 2), |j| fibonacci(2 * j - 1), n, (0, 0))
        }
    })
}

fn tetrahedral(n: &BigInt) -> BigInt {
    (n - 1) * n * (n + 1) / 6
}

/// `F_n` for any integer `n`, with `F_{-n} = (-1)^{n+1} F_n`.
pub fn fibonacci(n: i64) -> BigInt {
    if n < 0 {
        let f = fibonacci(-n);
        return if n.is_even() { -f } else { f };
    }
    two_term(n, 1)
}

/// Pell numbers `P_0 = 0, P_1 = 1, P_{n+2} = 2 P_{n+1} + P_n`, for `n ≥ 0`.
pub fn pell(n: i64) -> BigInt {
    assert!(n >= 0, "pell index must be nonnegative");
    two_term(n, 2)
}

/// `x_0 = 0, x_1 = 1, x_{k+2} = m x_{k+1} + x_k`.
fn two_term(n: i64, m: u32) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let next = &b * m + &a;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `C(n, k)` by the incremental product `Π (n-k+i)/i`; zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// `Σ_{i+j=n, i,j ≥ 0} f(i+p) · g(j+q)`; zero for negative `n`.
pub fn convolution<F, G>(f: F, g: G, n: i64, offsets: (i64, i64)) -> BigInt
where
    F: Fn(i64) -> BigInt,
    G: Fn(i64) -> BigInt,
{
    let (p, q) = offsets;
    (0..=n).fold(BigInt::zero(), |acc, i| acc + f(i + p) * g(n - i + q))
}
