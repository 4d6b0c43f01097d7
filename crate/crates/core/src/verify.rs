//! On-demand invariant suites, shared by the `verify` command and tests.

use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{int, ratio, BigRational, DualRational};
use crate::markov::{
    branch_sequence, division_free_real, generate_tree, markov_mutate, verify_triple, MarkovError,
    MarkovTree, ShadowInit, Side,
};
use crate::oracles::{oracle_term, OracleId};
use crate::recurrence::{
    builtin, integrality_report, naturals_shadow_by_index, run_convolution, run_explicit_shadow,
    run_spec, run_window, shadow_of, ExplicitBuiltin,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Arith,
    Recurrence,
    Markov,
    Oracles,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "all" => Suite::All,
            "arith" => Suite::Arith,
            "recurrence" => Suite::Recurrence,
            "markov" => Suite::Markov,
            "oracles" => Suite::Oracles,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Markov tree depth for the integrality fuzz.
    pub depth: usize,
    /// Sequence length for recurrence checks.
    pub terms: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { depth: 8, terms: 30, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, result: Result<String, String>) -> Self {
        match result {
            Ok(detail) => Self { name, passed: true, detail },
            Err(detail) => Self { name, passed: false, detail },
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        if self.detail.is_empty() {
            write!(f, "{}: {status}", self.name)
        } else {
            write!(f, "{}: {status} ({})", self.name, self.detail)
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<Check> {
    match suite {
        Suite::Arith => arith_checks(opts),
        Suite::Recurrence => recurrence_checks(opts),
        Suite::Markov => markov_checks(opts),
        Suite::Oracles => oracle_checks(),
        Suite::All => {
            let mut all = arith_checks(opts);
            all.extend(recurrence_checks(opts));
            all.extend(markov_checks(opts));
            all.extend(oracle_checks());
            all
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_dual(rng: &mut impl Rng) -> DualRational {
    let mut r = || ratio(rng.gen_range(-200i64..=200), rng.gen_range(1i64..=30));
    DualRational::new(r(), r())
}

fn random_init(rng: &mut impl Rng) -> ShadowInit {
    [(); 3].map(|_| BigInt::from(rng.gen_range(-10i64..=10)))
}

fn arith_checks(opts: &VerifyOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let samples: Vec<[DualRational; 3]> =
        (0..300).map(|_| [random_dual(&mut rng), random_dual(&mut rng), random_dual(&mut rng)]).collect();

    let ring = samples.iter().try_for_each(|[x, y, z]| {
        ensure(&(x + y) + z == x + &(y + z), || format!("add assoc fails at {x}, {y}, {z}"))?;
        ensure(&(x * y) * z == x * &(y * z), || format!("mul assoc fails at {x}, {y}, {z}"))?;
        ensure(x * y == y * x, || format!("mul commutativity fails at {x}, {y}"))?;
        ensure(x * &(y + z) == &(x * y) + &(x * z), || format!("distributivity fails at {x}, {y}, {z}"))
    });
    let division = samples.iter().try_for_each(|[x, y, _]| {
        if y.re == int(0) {
            return Ok(());
        }
        let q = x.checked_div(y).map_err(|e| e.to_string())?;
        ensure(&q * y == *x, || format!("(x/y)·y ≠ x at {x}, {y}"))
    });
    let nilpotent = samples.iter().try_for_each(|[x, y, _]| {
        let p = DualRational::new(int(0), x.eps.clone()) * DualRational::new(int(0), y.eps.clone());
        ensure(p == DualRational::zero(), || format!("ε² ≠ 0 for {x}, {y}"))
    });
    let powers = samples.iter().try_for_each(|[x, _, _]| {
        let mut acc = DualRational::one();
        for m in 0..=8 {
            ensure(x.pow(m).ok() == Some(acc.clone()), || format!("pow({x}, {m}) mismatch"))?;
            acc = &acc * x;
        }
        Ok(())
    });
    vec![
        Check::new("ring-axioms", ring.map(|_| format!("{} triples", samples.len()))),
        Check::new("division-inverse", division.map(|_| String::new())),
        Check::new("nilpotency", nilpotent.map(|_| String::new())),
        Check::new("pow-vs-mul", powers.map(|_| "m = 0..8".into())),
    ]
}

/// Dual ε-parts against the hard-coded linear shadow recurrences.
pub fn dual_explicit_agreement(terms: usize) -> Result<String, String> {
    let inits = [(0, 1), (1, 0), (3, -2)];
    let mut compared = 0;
    for (name, explicit, oracle) in [
        ("naturals", ExplicitBuiltin::Naturals, OracleId::Naturals),
        ("fibonacci-cassini", ExplicitBuiltin::FibonacciCassini, OracleId::Fibonacci),
        ("catalan", ExplicitBuiltin::Catalan, OracleId::Catalan),
    ] {
        let reals: Vec<BigRational> = oracle.terms(terms).into_iter().map(BigRational::from_integer).collect();
        for (e0, e1) in inits {
            let init = [
                DualRational::new(reals[0].clone(), int(e0)),
                DualRational::new(reals[1].clone(), int(e1)),
            ];
            let run = run_spec(&builtin(name).expect("builtin"), &init, terms)
                .map_err(|e| format!("{name}: {e}"))?;
            let dual = shadow_of(&run);
            let lin = run_explicit_shadow(explicit, &reals, &[int(e0), int(e1)], terms)
                .map_err(|e| format!("{name}: {e}"))?;
            ensure(dual == lin, || format!("{name} init ({e0},{e1}) disagrees"))?;
            if explicit == ExplicitBuiltin::Naturals {
                let by_index = naturals_shadow_by_index(int(e0), int(e1), terms);
                ensure(dual == by_index, || format!("naturals index form, init ({e0},{e1})"))?;
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} runs x {terms} terms"))
}

fn recurrence_checks(opts: &VerifyOptions) -> Vec<Check> {
    let terms = opts.terms.max(3);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x2);
    let d = |re: i64, eps: i64| DualRational::from_ints(re, eps);

    let linearity = (|| {
        for (name, reals) in [("naturals", [1, 2]), ("fibonacci-cassini", [1, 1])] {
            let spec = builtin(name).expect("builtin");
            let shadow = |e: [i64; 2]| -> Result<Vec<BigRational>, String> {
                let init = [d(reals[0], e[0]), d(reals[1], e[1])];
                Ok(shadow_of(&run_window(&spec, &init, terms).map_err(|e| e.to_string())?))
            };
            for _ in 0..20 {
                let u = [rng.gen_range(-20..=20), rng.gen_range(-20..=20)];
                let v = [rng.gen_range(-20..=20), rng.gen_range(-20..=20)];
                let k = rng.gen_range(-5i64..=5);
                let (su, sv) = (shadow(u)?, shadow(v)?);
                let sum = shadow([u[0] + v[0], u[1] + v[1]])?;
                let scaled = shadow([k * u[0], k * u[1]])?;
                for i in 0..terms {
                    ensure(sum[i] == &su[i] + &sv[i], || format!("{name}: additivity at {i}"))?;
                    ensure(scaled[i] == &su[i] * int(k), || format!("{name}: homogeneity at {i}"))?;
                }
            }
        }
        Ok("20 random pairs per builtin".to_string())
    })();

    let projection = (|| {
        for (name, reals) in [("naturals", [1, 2]), ("fibonacci-cassini", [1, 1])] {
            let spec = builtin(name).expect("builtin");
            let plain = run_window(&spec, &[d(reals[0], 0), d(reals[1], 0)], terms).map_err(|e| e.to_string())?;
            let dual = run_window(&spec, &[d(reals[0], 7), d(reals[1], -3)], terms).map_err(|e| e.to_string())?;
            ensure(plain.reals() == dual.reals(), || format!("{name}: real parts differ"))?;
        }
        Ok(String::new())
    })();

    let basis_sum = (|| {
        let spec = builtin("naturals").expect("builtin");
        let a = shadow_of(&run_window(&spec, &[d(1, 0), d(2, 1)], terms).map_err(|e| e.to_string())?);
        let b = shadow_of(&run_window(&spec, &[d(1, 1), d(2, 0)], terms).map_err(|e| e.to_string())?);
        for (n, (x, y)) in (1..).zip(a.iter().zip(&b)) {
            ensure(x + y == int(1), || format!("sum at n={n} is {}", x + y))?;
            let tet = BigRational::from_integer(oracle_term(OracleId::Tetrahedral, n).expect("n >= 1"));
            ensure(*x == tet, || format!("tetrahedral mismatch at n={n}"))?;
        }
        Ok(String::new())
    })();

    let catalan_symmetry = (|| {
        let run = run_convolution(&[d(1, 2), d(1, -1)], terms).map_err(|e| e.to_string())?;
        for n in 1..terms - 1 {
            let expect = int(2)
                * (0..=n).fold(int(0), |acc, i| acc + &run.terms[i].re * &run.terms[n - i].eps);
            ensure(run.terms[n + 1].eps == expect, || format!("ε-step at n={n}"))?;
        }
        Ok(String::new())
    })();

    let negative_control = (|| {
        let spec = builtin("naturals-alt").expect("builtin");
        let terms = terms.max(10);
        let mut firsts = Vec::new();
        for basis in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            let init = [d(1, basis[0]), d(2, basis[1]), d(3, basis[2])];
            let run = run_window(&spec, &init, terms).map_err(|e| e.to_string())?;
            let want: Vec<BigRational> = (1..=terms as i64).map(int).collect();
            ensure(run.reals() == want, || "real parts leave 1,2,3,...".into())?;
            firsts.push(integrality_report(&run).first_failure);
        }
        ensure(firsts == [Some(6), Some(6), None], || format!("first failures {firsts:?}"))?;
        Ok("first non-integral n = 6, 6, none".into())
    })();

    vec![
        Check::new("dual-vs-explicit", dual_explicit_agreement(terms)),
        Check::new("shadow-linearity", linearity),
        Check::new("real-projection", projection),
        Check::new("naturals-basis-sum", basis_sum),
        Check::new("catalan-eps-step", catalan_symmetry),
        Check::new("naturals-alt-nonintegral", negative_control),
    ]
}

fn all_nodes_ok(tree: &MarkovTree, mut f: impl FnMut(&crate::markov::MarkovNode) -> Result<(), String>) -> Result<(), String> {
    tree.nodes.iter().try_for_each(&mut f)
}

/// `D/(abc) = −(α₁+β₁+γ₁)` on every node of a tree.
pub fn defect_invariance(tree: &MarkovTree) -> Result<(), String> {
    let expect = -BigRational::from_integer(tree.shadow_init.iter().sum::<BigInt>());
    all_nodes_ok(tree, |n| {
        let got = verify_triple(&n.triple).defect;
        ensure(got == expect, || format!("defect {got} at path '{}'", n.path_string()))
    })
}

/// Generates `count` trees for random shadow inits in `[-10, 10]³`.
pub fn integrality_fuzz(count: usize, depth: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = 0;
    for _ in 0..count {
        let init = random_init(&mut rng);
        let tree = generate_tree(&init, depth).map_err(|e| format!("init {init:?}: {e}"))?;
        all_nodes_ok(&tree, |n| ensure(n.triple.is_integral(), || format!("non-integral at '{}'", n.path_string())))?;
        nodes += tree.nodes.len();
    }
    Ok(nodes)
}

/// Double mutation at a random index on `count` random nodes.
pub fn involution_sample(count: usize, depth: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trees = Vec::new();
    for _ in 0..4 {
        trees.push(generate_tree(&random_init(&mut rng), depth).map_err(|e| e.to_string())?);
    }
    for _ in 0..count {
        let tree = &trees[rng.gen_range(0..trees.len())];
        let node = &tree.nodes[rng.gen_range(0..tree.nodes.len())];
        let i = rng.gen_range(0..3);
        let back = markov_mutate(&markov_mutate(&node.triple, i).map_err(|e| e.to_string())?, i)
            .map_err(|e| e.to_string())?;
        ensure(back == node.triple, || format!("involution fails at '{}' index {i}", node.path_string()))?;
    }
    Ok(())
}

fn markov_checks(opts: &VerifyOptions) -> Vec<Check> {
    let depth = opts.depth;
    let canonical = generate_tree(&crate::markov::shadow_init(0, 1, 1), depth);
    let tree = match canonical {
        Ok(t) => t,
        Err(e) => return vec![Check::new("markov-tree", Err(e.to_string()))],
    };

    let markov_eq = all_nodes_ok(&tree, |n| {
        ensure(n.triple.satisfies_markov_equation(), || format!("fails at '{}'", n.path_string()))
    })
    .map(|_| format!("{} nodes", tree.nodes.len()));

    let division_free = all_nodes_ok(&tree, |n| {
        (0..3).try_for_each(|i| {
            let m = markov_mutate(&n.triple, i).map_err(|e| e.to_string())?;
            ensure(m.0[i].re == division_free_real(&n.triple, i), || {
                format!("3bc - a differs at '{}' index {i}", n.path_string())
            })
        })
    })
    .map(|_| String::new());

    let fuzz = integrality_fuzz(100, depth, opts.seed).map(|n| format!("100 inits, {n} nodes"));
    let involution = involution_sample(1000, depth.min(6), opts.seed ^ 0x1).map(|_| "1000 nodes".into());

    let defect = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x3);
        defect_invariance(&tree)?;
        for _ in 0..5 {
            let t = generate_tree(&random_init(&mut rng), depth.min(6)).map_err(|e| e.to_string())?;
            defect_invariance(&t)?;
        }
        Ok("canonical + 5 random inits".to_string())
    })();

    let linearity = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x4);
        let d = depth.min(6);
        for _ in 0..5 {
            let (u, v) = (random_init(&mut rng), random_init(&mut rng));
            let w: ShadowInit = [0, 1, 2].map(|i| &u[i] + &v[i]);
            let (tu, tv, tw) = (
                generate_tree(&u, d).map_err(|e| e.to_string())?,
                generate_tree(&v, d).map_err(|e| e.to_string())?,
                generate_tree(&w, d).map_err(|e| e.to_string())?,
            );
            for ((a, b), c) in tu.nodes.iter().zip(&tv.nodes).zip(&tw.nodes) {
                for k in 0..3 {
                    let (x, y, z) = (&a.triple.0[k], &b.triple.0[k], &c.triple.0[k]);
                    ensure(z.eps == &x.eps + &y.eps, || format!("eps not additive at '{}'", a.path_string()))?;
                    ensure(x.re == z.re && y.re == z.re, || "reals depend on shadow init".into())?;
                }
            }
        }
        Ok(String::new())
    })();

    let branches = (|| {
        let d = depth.max(10);
        let t = generate_tree(&crate::markov::shadow_init(0, 1, 1), d).map_err(|e: MarkovError| e.to_string())?;
        let left = branch_sequence(&t, Side::L, d + 1).expect("within depth");
        let right = branch_sequence(&t, Side::R, d + 1).expect("within depth");
        for (k, ((l, _), (r, _))) in left.iter().zip(&right).enumerate() {
            let k = k as i64;
            ensure(*l == oracle_term(OracleId::OddFibonacci, k + 3).expect("offset"), || format!("L[{k}]"))?;
            ensure(*r == oracle_term(OracleId::OddPell, k + 2).expect("offset"), || format!("R[{k}]"))?;
        }
        let mut shadows: Vec<BigInt> = t.preamble_border().iter().map(|c| c.eps.to_integer()).collect();
        shadows.extend(left.into_iter().map(|(_, e)| e));
        let conv = OracleId::BisectionConv.terms(shadows.len());
        ensure(shadows == conv, || "L-branch shadows differ from the bisection convolution".into())?;
        Ok(format!("depth {d}"))
    })();

    vec![
        Check::new("markov_eq", markov_eq),
        Check::new("division-free", division_free),
        Check::new("integrality-fuzz", fuzz),
        Check::new("involution", involution),
        Check::new("defect-invariance", defect),
        Check::new("shadow-linearity", linearity),
        Check::new("branch-oracles", branches),
    ]
}

fn oracle_checks() -> Vec<Check> {
    use crate::oracles::{convolution, fibonacci};
    let t = |id: OracleId, n: i64| oracle_term(id, n).expect("index at or above offset");

    let tetra = (1..=100i64).try_for_each(|n| {
        let lhs = n * t(OracleId::Tetrahedral, n + 2);
        let rhs = 2 * (n + 1) * t(OracleId::Tetrahedral, n + 1) - (n + 2) * t(OracleId::Tetrahedral, n);
        ensure(lhs == rhs, || format!("n = {n}"))
    });
    let cassini = (1..=100i64).try_for_each(|n| {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        ensure(fibonacci(n) * fibonacci(n + 2) == fibonacci(n + 1).pow(2) - sign, || format!("n = {n}"))
    });
    let catalan = (0..=20i64).try_for_each(|n| {
        let sum = convolution(|i| t(OracleId::Catalan, i), |j| t(OracleId::Catalan, j), n, (0, 0));
        ensure(sum == t(OracleId::Catalan, n + 1), || format!("n = {n}"))
    });
    let central = (0..=20i64).try_for_each(|n| {
        ensure(t(OracleId::CentralBinomial, n) == (n + 1) * t(OracleId::Catalan, n), || format!("n = {n}"))
    });
    let fib_conv = (1..=40i64).try_for_each(|n| {
        ensure(convolution(fibonacci, fibonacci, n, (0, 0)) == t(OracleId::FibSelfConv, n), || format!("n = {n}"))
    });
    vec![
        Check::new("tetrahedral-index-recurrence", tetra.map(|_| String::new())),
        Check::new("cassini-identity", cassini.map(|_| String::new())),
        Check::new("catalan-convolution", catalan.map(|_| String::new())),
        Check::new("central-binomial-vs-catalan", central.map(|_| String::new())),
        Check::new("fib-self-convolution", fib_conv.map(|_| String::new())),
    ]
}
