//! Recurrence definitions, their dual-number evaluation, and the shadow
//! (ε-component) sequences they produce.

mod ast;
mod explicit;
mod parser;

pub use ast::{AffineExponent, Expr};
pub use explicit::{naturals_shadow_by_index, run_explicit_shadow, ExplicitBuiltin, ExplicitError};
pub use parser::{parse_expression, ParseError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{format_rational, parse_rational, ArithError, BigRational, DualRational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecurrenceKind {
    /// `a_{n+order} = rhs(a_n, …, a_{n+order-1}, n)`, first term indexed `index_base`.
    Window { order: usize, rhs: Expr, index_base: i64 },
    /// `C_{n+1} = Σ_{i=0..n} C_i C_{n-i}` for `n ≥ 1`, with `C_0`, `C_1` free.
    Convolution,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceSpec {
    pub name: String,
    pub description: String,
    pub kind: RecurrenceKind,
}

impl RecurrenceSpec {
    /// Number of initial terms the recurrence consumes.
    pub fn order(&self) -> usize {
        match &self.kind {
            RecurrenceKind::Window { order, .. } => *order,
            RecurrenceKind::Convolution => 2,
        }
    }

    pub fn index_base(&self) -> i64 {
        match &self.kind {
            RecurrenceKind::Window { index_base, .. } => *index_base,
            RecurrenceKind::Convolution => 0,
        }
    }

    pub fn with_index_base(mut self, base: i64) -> Self {
        if let RecurrenceKind::Window { index_base, .. } = &mut self.kind {
            *index_base = base;
        }
        self
    }
}

/// Parses DSL text into a windowed spec starting at `n₀ = 1`.
pub fn parse_recurrence(text: &str) -> Result<RecurrenceSpec, ParseError> {
    let (rhs, order) = parse_expression(text)?;
    Ok(RecurrenceSpec {
        name: text.trim().to_string(),
        description: format!("a(n+{order}) = {}", text.trim()),
        kind: RecurrenceKind::Window { order, rhs, index_base: 1 },
    })
}

pub const BUILTIN_NAMES: [&str; 4] = ["naturals", "fibonacci-cassini", "catalan", "naturals-alt"];

/// Named recurrences: the positive integers (two ways), Fibonacci via
/// Cassini, and Catalan via Euler's convolution.
pub fn builtin(name: &str) -> Option<RecurrenceSpec> {
    let window = |name: &str, text: &str, description: &str| {
        let (rhs, order) = parse_expression(text).expect("builtin parses");
        RecurrenceSpec {
            name: name.to_string(),
            description: description.to_string(),
            kind: RecurrenceKind::Window { order, rhs, index_base: 1 },
        }
    };
    match name {
        "naturals" => Some(window(
            "naturals",
            "(a[1]^2 - 1)/a[0]",
            "a(n) a(n+2) = a(n+1)^2 - 1",
        )),
        "fibonacci-cassini" | "cassini" | "fibonacci" => Some(window(
            "fibonacci-cassini",
            "(a[1]^2 - (-1)^n)/a[0]",
            "F(n) F(n+2) = F(n+1)^2 - (-1)^n",
        )),
        "naturals-alt" => Some(window(
            "naturals-alt",
            "(a[1]*a[2] - 2)/a[0]",
            "a(n) a(n+3) = a(n+1) a(n+2) - 2",
        )),
        "catalan" => Some(RecurrenceSpec {
            name: "catalan".into(),
            description: "C(n+1) = sum C(i) C(n-i), n >= 1".into(),
            kind: RecurrenceKind::Convolution,
        }),
        _ => None,
    }
}

/// A dual-number run of a recurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRun {
    pub spec: RecurrenceSpec,
    pub start_index: i64,
    pub terms: Vec<DualRational>,
    pub integrality: Vec<(bool, bool)>,
}

impl SequenceRun {
    fn new(spec: RecurrenceSpec, start_index: i64) -> Self {
        Self { spec, start_index, terms: Vec::new(), integrality: Vec::new() }
    }

    fn push(&mut self, term: DualRational) {
        self.integrality.push(term.is_integral());
        self.terms.push(term);
    }

    /// Index `n` of the term at position `pos`.
    pub fn index_at(&self, pos: usize) -> i64 {
        self.start_index + pos as i64
    }

    pub fn reals(&self) -> Vec<BigRational> {
        self.terms.iter().map(|t| t.re.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("expected {expected} initial terms, got {got}")]
    InitArity { expected: usize, got: usize },
    #[error("term count {count} is smaller than the {needed} initial terms")]
    CountTooSmall { count: usize, needed: usize },
    #[error("recurrence '{0}' is not a windowed recurrence")]
    NotWindow(String),
    #[error("step producing n = {index} failed: {source}")]
    Step {
        index: i64,
        source: ArithError,
        /// Terms computed before the failure.
        partial: Box<SequenceRun>,
    },
}

/// Runs a windowed recurrence over dual numbers.
pub fn run_window(
    spec: &RecurrenceSpec,
    init: &[DualRational],
    count: usize,
) -> Result<SequenceRun, RunError> {
    let RecurrenceKind::Window { order, rhs, index_base } = &spec.kind else {
        return Err(RunError::NotWindow(spec.name.clone()));
    };
    let order = *order;
    if init.len() != order {
        return Err(RunError::InitArity { expected: order, got: init.len() });
    }
    if count < order {
        return Err(RunError::CountTooSmall { count, needed: order });
    }
    let mut run = SequenceRun::new(spec.clone(), *index_base);
    for t in init {
        run.push(t.clone());
    }
    for j in order..count {
        let n = index_base + (j - order) as i64;
        match rhs.eval(&run.terms[j - order..j], n) {
            Ok(t) => run.push(t),
            Err(source) => {
                return Err(RunError::Step {
                    index: index_base + j as i64,
                    source,
                    partial: Box::new(run),
                })
            }
        }
    }
    Ok(run)
}

/// Runs the Catalan convolution over dual numbers from free `C_0`, `C_1`.
pub fn run_convolution(init: &[DualRational; 2], count: usize) -> Result<SequenceRun, RunError> {
    if count < 2 {
        return Err(RunError::CountTooSmall { count, needed: 2 });
    }
    let spec = builtin("catalan").expect("catalan builtin");
    let mut run = SequenceRun::new(spec, 0);
    run.push(init[0].clone());
    run.push(init[1].clone());
    for n in 1..count - 1 {
        let next = (0..=n).fold(DualRational::zero(), |acc, i| {
            acc + &run.terms[i] * &run.terms[n - i]
        });
        run.push(next);
    }
    Ok(run)
}

/// Dispatches on the spec kind. Convolution specs need exactly two initial terms.
pub fn run_spec(
    spec: &RecurrenceSpec,
    init: &[DualRational],
    count: usize,
) -> Result<SequenceRun, RunError> {
    match spec.kind {
        RecurrenceKind::Window { .. } => run_window(spec, init, count),
        RecurrenceKind::Convolution => {
            let pair: &[DualRational; 2] = init
                .try_into()
                .map_err(|_| RunError::InitArity { expected: 2, got: init.len() })?;
            run_convolution(pair, count)
        }
    }
}

/// The ε-components of a run.
pub fn shadow_of(run: &SequenceRun) -> Vec<BigRational> {
    run.terms.iter().map(|t| t.eps.clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralityReport {
    pub all_integral: bool,
    /// Index `n` of the first non-integral shadow term.
    pub first_failure: Option<i64>,
}

pub fn integrality_report(run: &SequenceRun) -> IntegralityReport {
    let first_failure = run
        .integrality
        .iter()
        .position(|&(_, eps_int)| !eps_int)
        .map(|pos| run.index_at(pos));
    IntegralityReport { all_integral: first_failure.is_none(), first_failure }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub n: i64,
    pub re: String,
    pub eps: String,
    pub re_int: bool,
    pub eps_int: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunJson {
    pub name: String,
    pub start_index: i64,
    pub terms: Vec<TermJson>,
}

impl RunJson {
    pub fn from_run(run: &SequenceRun) -> Self {
        let terms = run
            .terms
            .iter()
            .zip(&run.integrality)
            .enumerate()
            .map(|(pos, (t, &(re_int, eps_int)))| TermJson {
                n: run.index_at(pos),
                re: format_rational(&t.re),
                eps: format_rational(&t.eps),
                re_int,
                eps_int,
            })
            .collect();
        Self { name: run.spec.name.clone(), start_index: run.start_index, terms }
    }

    /// Decodes the terms back to dual numbers.
    pub fn dual_terms(&self) -> Option<Vec<DualRational>> {
        self.terms
            .iter()
            .map(|t| Some(DualRational::new(parse_rational(&t.re)?, parse_rational(&t.eps)?)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn d(re: i64, eps: i64) -> DualRational {
        DualRational::from_ints(re, eps)
    }

    fn ints(xs: &[BigRational]) -> Vec<BigInt> {
        xs.iter().map(|x| x.to_integer()).collect()
    }

    fn big(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn eval_examples() {
        let (e, _) = parse_expression("(a[1]^2-1)/a[0]").unwrap();
        assert_eq!(e.eval(&[d(1, 0), d(2, 1)], 1).unwrap(), d(3, 4));
        let (e, _) = parse_expression("a[0]*0 + (-1)^n").unwrap();
        assert_eq!(e.eval(&[d(9, 9)], 4).unwrap(), d(1, 0));
        assert_eq!(e.eval(&[d(9, 9)], 3).unwrap(), d(-1, 0));
        let (e, _) = parse_expression("a[0]*0 + n").unwrap();
        assert_eq!(e.eval(&[d(9, 9)], 7).unwrap(), d(7, 0));
    }

    #[test]
    fn tetrahedral_run() {
        let spec = builtin("naturals").unwrap();
        let run = run_window(&spec, &[d(1, 0), d(2, 1)], 7).unwrap();
        assert_eq!(ints(&run.reals()), big(&[1, 2, 3, 4, 5, 6, 7]));
        assert_eq!(ints(&shadow_of(&run)), big(&[0, 1, 4, 10, 20, 35, 56]));
        assert_eq!(run.start_index, 1);
        assert!(integrality_report(&run).all_integral);
    }

    #[test]
    fn alternate_naturals_basis() {
        let spec = builtin("naturals").unwrap();
        let run = run_window(&spec, &[d(1, 1), d(2, 0)], 7).unwrap();
        assert_eq!(ints(&shadow_of(&run)), big(&[1, 0, -3, -9, -19, -34, -55]));
    }

    #[test]
    fn cassini_run() {
        let spec = builtin("fibonacci-cassini").unwrap();
        let run = run_window(&spec, &[d(1, 0), d(1, 1)], 13).unwrap();
        assert_eq!(
            ints(&run.reals()),
            big(&[1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233])
        );
        assert_eq!(
            ints(&shadow_of(&run)),
            big(&[0, 1, 2, 5, 10, 20, 38, 71, 130, 235, 420, 744, 1308])
        );
    }

    #[test]
    fn naturals_alt_fails_integrality() {
        let spec = builtin("naturals-alt").unwrap();
        let run = run_window(&spec, &[d(1, 1), d(2, 0), d(3, 0)], 10).unwrap();
        assert_eq!(ints(&run.reals()), big(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]));
        let report = integrality_report(&run);
        assert_eq!(report, IntegralityReport { all_integral: false, first_failure: Some(6) });
        assert_eq!(run.terms[5].eps, ratio(-44, 3));
        // Non-integral terms are kept, not dropped.
        assert_eq!(run.terms.len(), 10);
    }

    #[test]
    fn zero_divisor_reports_index_and_partial_run() {
        let spec = parse_recurrence("a[1]/a[0]").unwrap();
        let err = run_window(&spec, &[d(1, 3), d(0, 1)], 6).unwrap_err();
        match err {
            RunError::Step { index, source, partial } => {
                // a_3 = a_2/a_1 = ε, then a_4 = a_3/a_2 divides by ε
                assert_eq!(index, 4);
                assert_eq!(source, ArithError::ZeroRealPartDivision);
                assert_eq!(partial.terms.len(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn arity_and_count_errors() {
        let spec = builtin("naturals").unwrap();
        assert_eq!(
            run_window(&spec, &[d(1, 0)], 5),
            Err(RunError::InitArity { expected: 2, got: 1 })
        );
        assert_eq!(
            run_window(&spec, &[d(1, 0), d(2, 0)], 1),
            Err(RunError::CountTooSmall { count: 1, needed: 2 })
        );
        let cat = builtin("catalan").unwrap();
        assert!(matches!(run_window(&cat, &[], 3), Err(RunError::NotWindow(_))));
        assert!(matches!(run_spec(&cat, &[d(1, 0)], 3), Err(RunError::InitArity { .. })));
    }

    #[test]
    fn catalan_runs() {
        let run = run_convolution(&[d(1, 0), d(1, 1)], 12).unwrap();
        assert_eq!(
            ints(&run.reals()),
            big(&[1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786])
        );
        assert_eq!(
            ints(&shadow_of(&run)),
            big(&[0, 1, 2, 6, 20, 70, 252, 924, 3432, 12870, 48620, 184756])
        );
        let run = run_convolution(&[d(1, 1), d(1, 0)], 12).unwrap();
        assert_eq!(
            ints(&shadow_of(&run)),
            big(&[1, 0, 2, 8, 30, 112, 420, 1584, 6006, 22880, 87516, 335920])
        );
    }

    #[test]
    fn catalan_shadow_is_linear_in_init() {
        let a = shadow_of(&run_convolution(&[d(1, 1), d(1, 0)], 15).unwrap());
        let b = shadow_of(&run_convolution(&[d(1, 0), d(1, 1)], 15).unwrap());
        let mix = shadow_of(&run_convolution(&[d(1, 1), d(1, 2)], 15).unwrap());
        for i in 0..15 {
            assert_eq!(mix[i], &a[i] + &b[i] * int(2));
        }
    }

    #[test]
    fn zero_shadow_stays_zero() {
        for name in ["naturals", "fibonacci-cassini"] {
            let spec = builtin(name).unwrap();
            let run = run_window(&spec, &[d(1, 0), d(1 + (name == "naturals") as i64, 0)], 20).unwrap();
            assert!(shadow_of(&run).iter().all(|x| *x == int(0)));
        }
    }

    #[test]
    fn json_roundtrip_bytes() {
        let run = run_window(&builtin("naturals-alt").unwrap(), &[d(1, 0), d(2, 1), d(3, 0)], 8).unwrap();
        let json = serde_json::to_string(&RunJson::from_run(&run)).unwrap();
        assert!(json.contains("\"eps\":\"23/3\""));
        let back: RunJson = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
        assert_eq!(back.dual_terms().unwrap(), run.terms);
    }

    proptest! {
        #[test]
        fn shadow_is_additive_and_homogeneous(
            u in proptest::array::uniform2(-20i64..20),
            v in proptest::array::uniform2(-20i64..20),
            k in -5i64..5,
            which in 0usize..2,
        ) {
            let (name, reals) = [("naturals", [1, 2]), ("fibonacci-cassini", [1, 1])][which];
            let spec = builtin(name).unwrap();
            let shadow = |e: [i64; 2]| {
                let init = [d(reals[0], e[0]), d(reals[1], e[1])];
                shadow_of(&run_window(&spec, &init, 25).unwrap())
            };
            let su = shadow(u);
            let sv = shadow(v);
            let sum = shadow([u[0] + v[0], u[1] + v[1]]);
            let scaled = shadow([k * u[0], k * u[1]]);
            for i in 0..25 {
                prop_assert_eq!(&sum[i], &(&su[i] + &sv[i]));
                prop_assert_eq!(&scaled[i], &(&su[i] * int(k)));
            }
        }

        #[test]
        fn real_projection_matches_plain_run(
            eps in proptest::array::uniform2(-9i64..9),
        ) {
            let spec = builtin("fibonacci-cassini").unwrap();
            let dual = run_window(&spec, &[d(1, eps[0]), d(1, eps[1])], 30).unwrap();
            let plain = run_window(&spec, &[d(1, 0), d(1, 0)], 30).unwrap();
            prop_assert_eq!(dual.reals(), plain.reals());
        }
    }
}
