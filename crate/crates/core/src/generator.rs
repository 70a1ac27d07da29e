//! Enumeration of the minimal coefficient set.
//!
//! An ordered vector in the set has its last nonzero entry equal to 1 and
//! every earlier entry equal to the sum of the entries after it divided by
//! an integer θ, where θ may be at most one more than the θ of the next
//! entry (and the last nonzero entry counts as θ = 0). Walking the entries
//! from the tail towards the front therefore spans a tree whose leaves are
//! exactly the set members; the θ-chains along root-to-leaf paths are counted
//! by the `D_k` recursion without building any vectors.
//!
//! Output order is by number of nonzero entries ζ, then by θ-chain read
//! from the tail (`θ_{ζ−1}, …, θ_1`) in descending lexicographic order. That
//! is the row order of the published tables.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{resource, Error, Result};
use crate::rational::{int, one, zero, Rational};
use crate::resolution::LambdaVector;

/// Largest `L` accepted by the ordered enumeration.
pub const MAX_GENERATOR_LEVELS: usize = 14;

/// Largest `L` for which the permutation closure is materialized.
pub const MAX_EXPANSION_LEVELS: usize = 7;

/// A partially built ordered vector: the last `prefix_length` nonzero
/// entries are fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorNode {
    pub prefix_length: usize,
    /// Fixed entries, front to back.
    pub tail: Vec<Rational>,
    /// θ of the front-most fixed entry.
    pub theta_next: u32,
    tail_sum: Rational,
    thetas: Vec<u32>,
}

impl GeneratorNode {
    /// The node holding only the final nonzero entry `1`.
    pub fn root() -> Self {
        GeneratorNode {
            prefix_length: 1,
            tail: vec![one()],
            theta_next: 0,
            tail_sum: one(),
            thetas: Vec::new(),
        }
    }

    /// Admissible values for the next entry: `Σtail / t` for
    /// `t = 1..=θ_next + 1`.
    pub fn choices(&self) -> Vec<(u32, Rational)> {
        (1..=self.theta_next + 1)
            .map(|t| (t, &self.tail_sum / int(t as i64)))
            .collect()
    }

    pub fn child(&self, theta: u32) -> GeneratorNode {
        debug_assert!((1..=self.theta_next + 1).contains(&theta));
        let value = &self.tail_sum / int(theta as i64);
        let mut tail = Vec::with_capacity(self.tail.len() + 1);
        tail.push(value.clone());
        tail.extend(self.tail.iter().cloned());
        let mut thetas = Vec::with_capacity(self.thetas.len() + 1);
        thetas.push(theta);
        thetas.extend(self.thetas.iter().copied());
        GeneratorNode {
            prefix_length: self.prefix_length + 1,
            tail,
            theta_next: theta,
            tail_sum: &self.tail_sum + value,
            thetas,
        }
    }

    /// θ-values of the fixed entries except the last, front to back.
    pub fn thetas(&self) -> &[u32] {
        &self.thetas
    }
}

/// Streams the ordered set members of length `L` in table order.
pub struct OrderedGenerator {
    levels: usize,
    zeta: usize,
    stack: Vec<GeneratorNode>,
}

impl OrderedGenerator {
    pub fn new(levels: usize) -> Result<Self> {
        check_levels(levels)?;
        Ok(OrderedGenerator {
            levels,
            zeta: 1,
            stack: vec![GeneratorNode::root()],
        })
    }

    fn finish(&self, node: GeneratorNode) -> LambdaVector {
        let mut comps = node.tail;
        comps.resize(self.levels, zero());
        LambdaVector::new(comps).expect("generated vectors are nonzero")
    }
}

impl Iterator for OrderedGenerator {
    type Item = LambdaVector;

    fn next(&mut self) -> Option<LambdaVector> {
        loop {
            let Some(node) = self.stack.pop() else {
                if self.zeta >= self.levels {
                    return None;
                }
                self.zeta += 1;
                self.stack.push(GeneratorNode::root());
                continue;
            };
            if node.prefix_length == self.zeta {
                return Some(self.finish(node));
            }
            // Pushed ascending so that the largest θ (smallest value) pops first.
            for t in 1..=node.theta_next + 1 {
                self.stack.push(node.child(t));
            }
        }
    }
}

fn check_levels(levels: usize) -> Result<()> {
    if levels == 0 || levels > MAX_GENERATOR_LEVELS {
        return resource(format!(
            "levels must be in 1..={MAX_GENERATOR_LEVELS}, got {levels}"
        ));
    }
    Ok(())
}

pub fn generate_ordered(levels: usize) -> Result<Vec<LambdaVector>> {
    Ok(OrderedGenerator::new(levels)?.collect())
}

/// All distinct rearrangements of each vector, each block starting with the
/// vector itself.
pub fn expand_permutations(g0: &[LambdaVector]) -> Vec<LambdaVector> {
    let mut out = Vec::new();
    for lambda in g0 {
        let ordered = lambda.ordered();
        // Rank 0 is the largest value; ranks start non-decreasing, which is
        // the descending arrangement, and next_permutation walks the rest.
        let mut ranks = Vec::with_capacity(ordered.len());
        let mut rank = 0usize;
        for (i, v) in ordered.iter().enumerate() {
            if i > 0 && *v != ordered[i - 1] {
                rank += 1;
            }
            ranks.push(rank);
        }
        let mut distinct: Vec<Rational> = ordered.clone();
        distinct.dedup();
        loop {
            let comps = ranks.iter().map(|&r| distinct[r].clone()).collect();
            out.push(LambdaVector::new(comps).expect("rearrangement of a valid lambda"));
            if !next_permutation(&mut ranks) {
                break;
            }
        }
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `D_2, …, D_L`: the number of admissible θ-chains of each length.
pub fn theta_chain_counts(levels: usize) -> Vec<BigUint> {
    let mut out = Vec::new();
    if levels < 2 {
        return out;
    }
    // by_last[v] = chains whose front-most θ equals v.
    let mut by_last: Vec<BigUint> = vec![BigUint::zero(), BigUint::one()];
    out.push(BigUint::one());
    for _ in 3..=levels {
        let max = by_last.len();
        // next[t] = Σ_{v >= t-1} by_last[v], since θ = t may follow any θ >= t - 1.
        let mut next = vec![BigUint::zero(); max + 1];
        let mut running = BigUint::zero();
        for v in (0..max).rev() {
            running += &by_last[v];
            next[v + 1] = running.clone();
        }
        out.push(next.iter().sum());
        by_last = next;
    }
    out
}

/// `S_L⁰ = 1 + Σ_{k=2}^{L} D_k`, without enumerating vectors.
pub fn count_ordered(levels: usize) -> BigUint {
    if levels == 0 {
        return BigUint::zero();
    }
    BigUint::one() + theta_chain_counts(levels).iter().sum::<BigUint>()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountBounds {
    pub lower: BigUint,
    pub count: BigUint,
    pub upper: BigUint,
}

impl CountBounds {
    pub fn holds(&self) -> bool {
        self.lower <= self.count && self.count <= self.upper
    }

    pub fn strict(&self) -> bool {
        self.lower < self.count && self.count < self.upper
    }
}

/// `(2^{L−1}, S_L⁰, L!)`, failing if the sandwich does not hold. Both
/// sides are strict from `L = 4`; at `L = 3` the lower side is tight
/// (`S_3⁰ = 4`).
pub fn check_bounds(levels: usize) -> Result<CountBounds> {
    if levels == 0 {
        return Err(Error::Domain("levels must be positive".into()));
    }
    let lower = BigUint::one() << (levels - 1);
    let upper = (1..=levels).fold(BigUint::one(), |acc, k| acc * BigUint::from(k));
    let bounds = CountBounds {
        lower,
        count: count_ordered(levels),
        upper,
    };
    if !bounds.holds() || (levels >= 4 && !bounds.strict()) {
        return Err(Error::Property(format!(
            "count bounds violated at L={levels}: {} <= {} <= {}",
            bounds.lower, bounds.count, bounds.upper
        )));
    }
    Ok(bounds)
}
