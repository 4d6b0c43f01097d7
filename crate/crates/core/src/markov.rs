//! The Markov-number tree and its shadow, generated by dual mutations
//! `A' = (B² + C²) / A` starting from `(1 + α₁ε, 1 + β₁ε, 1 + γ₁ε)`.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{int, ArithError, BigRational, DualRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkovError {
    #[error("mutation at index {index} produced a non-integral component")]
    IntegralityViolation { index: usize },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("mutation index {0} out of range (expected 0, 1 or 2)")]
    BadIndex(usize),
}

/// An ordered triple of dual numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkovTriple(pub [DualRational; 3]);

impl MarkovTriple {
    pub fn from_ints(parts: [(i64, i64); 3]) -> Self {
        Self(parts.map(|(re, eps)| DualRational::from_ints(re, eps)))
    }

    pub fn reals(&self) -> [BigRational; 3] {
        self.0.clone().map(|c| c.re)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(DualRational::is_fully_integral)
    }

    /// `a² + b² + c² = 3abc` on the real parts.
    pub fn satisfies_markov_equation(&self) -> bool {
        let [a, b, c] = self.reals();
        &a * &a + &b * &b + &c * &c == int(3) * &a * &b * &c
    }
}

impl fmt::Display for MarkovTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.0;
        write!(f, "({a}, {b}, {c})")
    }
}

/// Replaces component `index` by `(other₁² + other₂²) / component`.
pub fn markov_mutate(t: &MarkovTriple, index: usize) -> Result<MarkovTriple, MarkovError> {
    if index > 2 {
        return Err(MarkovError::BadIndex(index));
    }
    let [p, q] = others(index).map(|i| &t.0[i]);
    let num = p.pow(2)? + q.pow(2)?;
    let new = num.checked_div(&t.0[index])?;
    if !new.is_fully_integral() {
        return Err(MarkovError::IntegralityViolation { index });
    }
    let mut out = t.clone();
    out.0[index] = new;
    Ok(out)
}

/// `3·(product of the other real parts) − old real part`.
pub fn division_free_real(t: &MarkovTriple, index: usize) -> BigRational {
    let [p, q] = others(index).map(|i| &t.0[i].re);
    int(3) * p * q - &t.0[index].re
}

fn others(index: usize) -> [usize; 2] {
    match index {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::L => "L",
            Side::R => "R",
        })
    }
}

/// A triple `(x, y, z)` on the tree; `z` is the newest Markov number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovNode {
    pub triple: MarkovTriple,
    pub path: Vec<Side>,
    pub depth: usize,
}

impl MarkovNode {
    pub fn path_string(&self) -> String {
        self.path.iter().map(Side::to_string).collect()
    }

    pub fn newest(&self) -> &DualRational {
        &self.triple.0[2]
    }

    /// Left child `(x, z, (x² + z²)/y)` and right child `(z, y, (y² + z²)/x)`.
    pub fn children(&self) -> Result<(MarkovNode, MarkovNode), MarkovError> {
        let [x, y, z] = self.triple.0.clone();
        let left = markov_mutate(&MarkovTriple([x.clone(), z.clone(), y.clone()]), 2)?;
        let right = markov_mutate(&MarkovTriple([z, y, x]), 2)?;
        let child = |triple, side| {
            let mut path = self.path.clone();
            path.push(side);
            MarkovNode { triple, path, depth: self.depth + 1 }
        };
        Ok((child(left, Side::L), child(right, Side::R)))
    }
}

pub type ShadowInit = [BigInt; 3];

pub fn shadow_init(a: i64, b: i64, c: i64) -> ShadowInit {
    [a.into(), b.into(), c.into()]
}

/// Returns the preamble chain `(1,1,1) → (2,1,1) → (2,5,1)` and the root
/// node, reordered so the real parts read `(1, 2, 5)`.
pub fn markov_root(init: &ShadowInit) -> Result<(Vec<MarkovTriple>, MarkovNode), MarkovError> {
    let start = MarkovTriple(init.clone().map(|e| DualRational::new(int(1), BigRational::from_integer(e))));
    let first = markov_mutate(&start, 0)?;
    let second = markov_mutate(&first, 1)?;
    let [two, five, one] = second.0.clone();
    let root = MarkovNode { triple: MarkovTriple([one, two, five]), path: Vec::new(), depth: 0 };
    Ok((vec![start, first, second], root))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovTree {
    pub shadow_init: ShadowInit,
    pub depth: usize,
    pub preamble: Vec<MarkovTriple>,
    /// Breadth-first, left before right within a level.
    pub nodes: Vec<MarkovNode>,
}

pub fn generate_tree(init: &ShadowInit, depth: usize) -> Result<MarkovTree, MarkovError> {
    let (preamble, root) = markov_root(init)?;
    let mut nodes = Vec::with_capacity((1usize << (depth + 1)) - 1);
    let mut queue = VecDeque::from([root]);
    while let Some(node) = queue.pop_front() {
        if node.depth < depth {
            let (l, r) = node.children()?;
            queue.push_back(l);
            queue.push_back(r);
        }
        nodes.push(node);
    }
    Ok(MarkovTree { shadow_init: init.clone(), depth, preamble, nodes })
}

impl MarkovTree {
    /// Nodes at one level, left to right.
    pub fn level(&self, level: usize) -> &[MarkovNode] {
        let start = (1usize << level) - 1;
        let end = ((1usize << (level + 1)) - 1).min(self.nodes.len());
        &self.nodes[start.min(end)..end]
    }

    /// The node at `path`, if within depth.
    pub fn node(&self, path: &[Side]) -> Option<&MarkovNode> {
        let pos = path.iter().fold(0usize, |i, s| 2 * i + 1 + (*s == Side::R) as usize);
        self.nodes.get(pos)
    }

    /// The duals over 1 and 2 that precede the root's 5 on the
    /// odd-Fibonacci border.
    pub fn preamble_border(&self) -> [DualRational; 2] {
        let second = &self.preamble[2].0;
        [second[2].clone(), second[0].clone()]
    }
}

/// `(real, eps)` of the newest component along the all-`side` path, root first.
pub fn branch_sequence(
    tree: &MarkovTree,
    side: Side,
    length: usize,
) -> Option<Vec<(BigInt, BigInt)>> {
    if length > tree.depth + 1 {
        return None;
    }
    (0..length)
        .map(|k| {
            let node = tree.node(&vec![side; k])?;
            let z = node.newest();
            Some((z.re.to_integer(), z.eps.to_integer()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleCheck {
    pub markov_eq: bool,
    /// `D / (abc)` with `D = 2(aα + bβ + cγ) − 3(αbc + aβc + abγ)`.
    pub defect: BigRational,
}

pub fn verify_triple(t: &MarkovTriple) -> TripleCheck {
    let [a, b, c] = &t.0;
    let (ar, br, cr) = (&a.re, &b.re, &c.re);
    let (ae, be, ce) = (&a.eps, &b.eps, &c.eps);
    let d = int(2) * (ar * ae + br * be + cr * ce)
        - int(3) * (ae * br * cr + ar * be * cr + ar * br * ce);
    let abc = ar * br * cr;
    TripleCheck { markov_eq: t.satisfies_markov_equation(), defect: d / abc }
}

/// Whether every shadow label in the tree is nonnegative.
pub fn shadows_nonnegative(tree: &MarkovTree) -> bool {
    tree.nodes.iter().all(|n| n.triple.0.iter().all(|c| !c.eps.is_negative()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub path: String,
    pub x: [String; 2],
    pub y: [String; 2],
    pub z: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub shadow_init: [String; 3],
    pub depth: usize,
    pub nodes: Vec<NodeJson>,
}

impl TreeJson {
    pub fn from_tree(tree: &MarkovTree) -> Self {
        let pair = |c: &DualRational| [c.re.to_string(), c.eps.to_string()];
        Self {
            shadow_init: tree.shadow_init.clone().map(|v| v.to_string()),
            depth: tree.depth,
            nodes: tree
                .nodes
                .iter()
                .map(|n| NodeJson {
                    path: n.path_string(),
                    x: pair(&n.triple.0[0]),
                    y: pair(&n.triple.0[1]),
                    z: pair(&n.triple.0[2]),
                })
                .collect(),
        }
    }
}

/// Graphviz rendering: one vertex per node labeled `re / eps` of its newest
/// component, edges labeled by the branch side.
pub fn to_dot(tree: &MarkovTree) -> String {
    let mut out = String::from("digraph markov {\n");
    let init = &tree.shadow_init;
    out.push_str(&format!(
        "  label=\"shadow init ({}, {}, {})\";\n  node [shape=box];\n",
        init[0], init[1], init[2]
    ));
    let id = |n: &MarkovNode| {
        if n.path.is_empty() {
            "root".to_string()
        } else {
            format!("n_{}", n.path_string())
        }
    };
    for n in &tree.nodes {
        let z = n.newest();
        out.push_str(&format!("  {} [label=\"{} / {}\"];\n", id(n), z.re, z.eps));
    }
    for n in &tree.nodes {
        if n.depth < tree.depth {
            for side in [Side::L, Side::R] {
                let mut path = n.path.clone();
                path.push(side);
                let child = tree.node(&path).expect("child within depth");
                out.push_str(&format!("  {} -> {} [label=\"{}\"];\n", id(n), id(child), side));
            }
        }
    }
    out.push_str("}\n");
    out
}
