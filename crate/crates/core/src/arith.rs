//! Exact rationals and the dual-number ring `Q[ε]/(ε²)` built on top of them.
//!
//! `BigRational` is `num_rational::Ratio<BigInt>`, which keeps every value
//! reduced with a positive denominator. [`DualRational`] pairs two of them
//! as `re + eps·ε`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    /// The divisor has zero real part and is therefore a zero divisor in the dual ring.
    #[error("division by a dual number with zero real part")]
    ZeroRealPartDivision,
}

/// Builds an integer-valued rational.
pub fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Builds `num/den`, reduced. Panics on a zero denominator.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Renders a rational as `p/q`, or just `p` when the denominator is one.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p` or `p/q` (optional leading sign, `q` nonzero).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(int),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
    }
}

/// A dual number `re + eps·ε` with `ε² = 0` over exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualRational {
    pub re: BigRational,
    pub eps: BigRational,
}

impl DualRational {
    pub fn new(re: BigRational, eps: BigRational) -> Self {
        Self { re, eps }
    }

    /// Integer-valued dual number `re + eps·ε`.
    pub fn from_ints(re: impl Into<BigInt>, eps: impl Into<BigInt>) -> Self {
        Self::new(int(re), int(eps))
    }

    /// Pure real number with zero ε-part.
    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    /// Exact quotient. Fails when the divisor's real part is zero.
    pub fn checked_div(&self, rhs: &DualRational) -> Result<DualRational, ArithError> {
        if rhs.re.is_zero() {
            return Err(ArithError::ZeroRealPartDivision);
        }
        let re = &self.re / &rhs.re;
        let eps = (&self.eps * &rhs.re - &self.re * &rhs.eps) / (&rhs.re * &rhs.re);
        Ok(DualRational::new(re, eps))
    }

    /// `x^m` via the closed form `(a^m, m·a^(m-1)·α)`; negative `m` inverts first.
    pub fn pow(&self, m: i64) -> Result<DualRational, ArithError> {
        if m < 0 {
            let inv = DualRational::one().checked_div(self)?;
            return inv.pow(-m);
        }
        if m == 0 {
            return Ok(DualRational::one());
        }
        let m_u = u32::try_from(m).expect("exponent out of range");
        let lower = num_traits::pow::pow(self.re.clone(), (m_u - 1) as usize);
        let re = &lower * &self.re;
        let eps = int(m) * lower * &self.eps;
        Ok(DualRational::new(re, eps))
    }

    /// Integrality of each component: `(re_integral, eps_integral)`.
    pub fn is_integral(&self) -> (bool, bool) {
        (self.re.is_integer(), self.eps.is_integer())
    }

    pub fn is_fully_integral(&self) -> bool {
        self.re.is_integer() && self.eps.is_integer()
    }
}

impl fmt::Display for DualRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eps = &self.eps;
        if eps.is_negative() {
            write!(f, "{} - {}ε", format_rational(&self.re), format_rational(&-eps))
        } else {
            write!(f, "{} + {}ε", format_rational(&self.re), format_rational(eps))
        }
    }
}

macro_rules! forward_binop {
    ($imp:ident, $method:ident) => {
        impl $imp<DualRational> for DualRational {
            type Output = DualRational;
            fn $method(self, rhs: DualRational) -> DualRational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $imp<&'a DualRational> for DualRational {
            type Output = DualRational;
            fn $method(self, rhs: &'a DualRational) -> DualRational {
                (&self).$method(rhs)
            }
        }
        impl<'a> $imp<DualRational> for &'a DualRational {
            type Output = DualRational;
            fn $method(self, rhs: DualRational) -> DualRational {
                self.$method(&rhs)
            }
        }
    };
}

impl<'a, 'b> Add<&'b DualRational> for &'a DualRational {
    type Output = DualRational;
    fn add(self, rhs: &'b DualRational) -> DualRational {
        DualRational::new(&self.re + &rhs.re, &self.eps + &rhs.eps)
    }
}

impl<'a, 'b> Sub<&'b DualRational> for &'a DualRational {
    type Output = DualRational;
    fn sub(self, rhs: &'b DualRational) -> DualRational {
        DualRational::new(&self.re - &rhs.re, &self.eps - &rhs.eps)
    }
}

impl<'a, 'b> Mul<&'b DualRational> for &'a DualRational {
    type Output = DualRational;
    fn mul(self, rhs: &'b DualRational) -> DualRational {
        DualRational::new(
            &self.re * &rhs.re,
            &self.re * &rhs.eps + &self.eps * &rhs.re,
        )
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for DualRational {
    type Output = DualRational;
    fn neg(self) -> DualRational {
        DualRational::new(-self.re, -self.eps)
    }
}

impl Neg for &DualRational {
    type Output = DualRational;
    fn neg(self) -> DualRational {
        DualRational::new(-&self.re, -&self.eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(re: i64, eps: i64) -> DualRational {
        DualRational::from_ints(re, eps)
    }

    #[test]
    fn add_sub_examples() {
        let a = d(7, -3);
        assert_eq!(&d(0, 0) + &a, a);
        assert_eq!(d(1, 1) + d(1, 1), d(2, 2));
        assert_eq!(d(1, 0) - d(2, 4), d(-1, -4));
        assert_eq!(-d(2, -5), d(-2, 5));
    }

    #[test]
    fn mul_examples() {
        let a = d(7, -3);
        assert_eq!(&d(1, 0) * &a, a);
        assert_eq!(d(0, 1) * d(0, 1), d(0, 0));
        // (2+3ε)(5+7ε) = 10 + (14+15)ε
        assert_eq!(d(2, 3) * d(5, 7), d(10, 29));
    }

    #[test]
    fn div_examples() {
        assert_eq!(d(4, 12).checked_div(&d(2, 3)).unwrap(), d(2, 3));
        assert_eq!(
            d(1, 0).checked_div(&d(2, 0)).unwrap(),
            DualRational::new(ratio(1, 2), int(0))
        );
        // Markov mutation above the (1,2) pair: (B² + C²)/A
        let (a, b, c) = (d(1, 1), d(1, 1), d(2, 4));
        let num = b.pow(2).unwrap() + c.pow(2).unwrap();
        assert_eq!(num.checked_div(&a).unwrap(), d(5, 13));
    }

    #[test]
    fn div_by_zero_divisor() {
        assert_eq!(
            d(1, 1).checked_div(&d(0, 5)),
            Err(ArithError::ZeroRealPartDivision)
        );
        assert_eq!(d(0, 1).pow(-1), Err(ArithError::ZeroRealPartDivision));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(d(9, 4).pow(0).unwrap(), d(1, 0));
        assert_eq!(d(1, 1).pow(2).unwrap(), d(1, 2));
        assert_eq!(d(2, 3).pow(2).unwrap(), d(4, 12));
        // (2+3ε)^-1 = 1/2 - 3/4 ε
        assert_eq!(
            d(2, 3).pow(-1).unwrap(),
            DualRational::new(ratio(1, 2), ratio(-3, 4))
        );
        // (-1)^n parity
        assert_eq!(d(-1, 0).pow(4).unwrap(), d(1, 0));
        assert_eq!(d(-1, 0).pow(-3).unwrap(), d(-1, 0));
    }

    #[test]
    fn integrality_flags() {
        assert_eq!(d(3, 4).is_integral(), (true, true));
        assert_eq!(
            DualRational::new(ratio(1, 2), int(1)).is_integral(),
            (false, true)
        );
        assert_eq!(
            DualRational::new(int(5), ratio(13, 2)).is_integral(),
            (true, false)
        );
    }

    #[test]
    fn rational_text_roundtrip() {
        for s in ["0", "-7", "3/4", "-44/3", "123456789012345678901234567890"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    fn rational() -> impl Strategy<Value = BigRational> {
        (-1000i64..1000, 1i64..50).prop_map(|(p, q)| ratio(p, q))
    }

    fn dual() -> impl Strategy<Value = DualRational> {
        (rational(), rational()).prop_map(|(re, eps)| DualRational::new(re, eps))
    }

    fn is_canonical(x: &BigRational) -> bool {
        use num_integer::Integer;
        x.denom().is_positive() && x.numer().gcd(x.denom()).is_one()
    }

    proptest! {
        #[test]
        fn ring_axioms(x in dual(), y in dual(), z in dual()) {
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x - &x, DualRational::zero());
        }

        #[test]
        fn division_inverts_multiplication(x in dual(), y in dual()) {
            prop_assume!(!y.re.is_zero());
            let q = x.checked_div(&y).unwrap();
            prop_assert_eq!(&q * &y, x);
        }

        #[test]
        fn pure_eps_is_nilpotent(s in rational(), t in rational()) {
            let p = DualRational::new(int(0), s) * DualRational::new(int(0), t);
            prop_assert_eq!(p, DualRational::zero());
        }

        #[test]
        fn pow_matches_repeated_mul(x in dual(), m in 0i64..=8) {
            let mut acc = DualRational::one();
            for _ in 0..m {
                acc = &acc * &x;
            }
            prop_assert_eq!(x.pow(m).unwrap(), acc);
        }

        #[test]
        fn negative_pow_matches_repeated_div(x in dual(), m in 1i64..=5) {
            prop_assume!(!x.re.is_zero());
            let mut acc = DualRational::one();
            for _ in 0..m {
                acc = acc.checked_div(&x).unwrap();
            }
            prop_assert_eq!(x.pow(-m).unwrap(), acc);
        }

        #[test]
        fn results_are_canonical(x in dual(), y in dual()) {
            prop_assume!(!y.re.is_zero());
            for r in [&x + &y, &x - &y, &x * &y, x.checked_div(&y).unwrap()] {
                prop_assert!(is_canonical(&r.re) && is_canonical(&r.eps));
                let again = DualRational::new(
                    BigRational::new(r.re.numer().clone(), r.re.denom().clone()),
                    BigRational::new(r.eps.numer().clone(), r.eps.denom().clone()),
                );
                prop_assert_eq!(again, r);
            }
        }
    }
}
