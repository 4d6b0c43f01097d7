//! Hard-coded linear shadow recurrences, evaluated on plain rationals.
//!
//! These never touch dual arithmetic and are used to cross-check the
//! generic dual evaluator.

use num_traits::Zero;
use thiserror::Error;

use crate::arith::{int, BigRational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExplicitBuiltin {
    /// `a_n α_{n+2} = 2 a_{n+1} α_{n+1} − a_{n+2} α_n`
    Naturals,
    /// `φ_{n+2} = (2 F_{n+1} φ_{n+1} − F_{n+2} φ_n) / F_n`
    FibonacciCassini,
    /// `γ_{n+1} = 2 Σ_{i=0..n} C_i γ_{n−i}` for `n ≥ 1`
    Catalan,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplicitError {
    #[error("need {needed} real terms, got {got}")]
    InsufficientRealTerms { needed: usize, got: usize },
    #[error("need 2 initial shadow terms, got {0}")]
    InitArity(usize),
    #[error("zero divisor a[{position}] while computing shadow term {target}")]
    DivisionByZero { position: usize, target: usize },
}

/// Evaluates `count` shadow terms from two initial ones.
///
/// `real_terms[i]` pairs with the output at position `i`; positions are
/// 0-based regardless of the sequence's own index convention.
pub fn run_explicit_shadow(
    builtin: ExplicitBuiltin,
    real_terms: &[BigRational],
    shadow_init: &[BigRational],
    count: usize,
) -> Result<Vec<BigRational>, ExplicitError> {
    if shadow_init.len() != 2 {
        return Err(ExplicitError::InitArity(shadow_init.len()));
    }
    let needed = match builtin {
        ExplicitBuiltin::Catalan => count.saturating_sub(1),
        _ => count,
    };
    if real_terms.len() < needed {
        return Err(ExplicitError::InsufficientRealTerms { needed, got: real_terms.len() });
    }
    let mut out: Vec<BigRational> = shadow_init.iter().take(count).cloned().collect();
    let a = real_terms;
    match builtin {
        ExplicitBuiltin::Naturals | ExplicitBuiltin::FibonacciCassini => {
            // Both are the ε-part of a_n a_{n+2} = a_{n+1}² − c_n.
            for t in 2..count {
                if a[t - 2].is_zero() {
                    return Err(ExplicitError::DivisionByZero { position: t - 2, target: t });
                }
                let next = (int(2) * &a[t - 1] * &out[t - 1] - &a[t] * &out[t - 2]) / &a[t - 2];
                out.push(next);
            }
        }
        ExplicitBuiltin::Catalan => {
            for n in 1..count.saturating_sub(1) {
                let sum = (0..=n).fold(BigRational::zero(), |acc, i| acc + &a[i] * &out[n - i]);
                out.push(int(2) * sum);
            }
        }
    }
    Ok(out)
}

/// The naturals shadow through its index-explicit form
/// `α_{n+2} = (2(n+1)/n) α_{n+1} − ((n+2)/n) α_n`, starting at `n = 1`.
pub fn naturals_shadow_by_index(alpha1: BigRational, alpha2: BigRational, count: usize) -> Vec<BigRational> {
    let mut out = vec![alpha1, alpha2];
    out.truncate(count);
    for n in 1..=(count as i64 - 2) {
        let p = out.len();
        let next = (int(2 * (n + 1)) * &out[p - 1] - int(n + 2) * &out[p - 2]) / int(n);
        out.push(next);
    }
    out
}
