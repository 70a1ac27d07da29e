//! The resolution function `f_α(λ)`.
//!
//! `f_α(λ)` is the largest total weight of an α-resolution of λ: nonnegative
//! weights on the weight-α binary vectors whose weighted column sums stay
//! below λ. Sort λ descending and let `g_α(β)` be the tail average
//! `(λ_{β+1} + … + λ_L) / (α − β)`. Then `f_α(λ)` is the minimum of
//! `g_α(β)` over `β ∈ {0, …, α−1}`. `g_α` is pseudo-convex in β, so a
//! forward scan that stops at the first non-decreasing step finds the
//! minimizer, and the minimizer never decreases as α grows.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{domain, resource, Error, Result};
use crate::lp::{solve, LinearProgram, LpStatus};
use crate::rational::{format_tuple, int, one, sum, zero, Rational};

/// Largest `L` for which the brute-force LP formulations are attempted.
pub const MAX_LP_LEVELS: usize = 12;

/// A nonzero coefficient vector in the nonnegative orthant.
///
/// Keeps the descending order `π`, the count `ζ` of nonzero entries, and,
/// for normalized members of the minimal generator set, the θ-sequence.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LambdaVector {
    components: Vec<Rational>,
    order: Vec<usize>,
    zeta: usize,
    theta: Option<Vec<u32>>,
}

impl fmt::Debug for LambdaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LambdaVector{}", format_tuple(&self.components))
    }
}

impl fmt::Display for LambdaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_tuple(&self.components))
    }
}

impl LambdaVector {
    pub fn new(components: Vec<Rational>) -> Result<Self> {
        if components.is_empty() {
            return domain("lambda must have at least one component");
        }
        if components.iter().any(Signed::is_negative) {
            return domain(format!(
                "lambda components must be nonnegative: {}",
                format_tuple(&components)
            ));
        }
        if components.iter().all(Zero::is_zero) {
            return domain("lambda must not be the zero vector");
        }
        let mut order: Vec<usize> = (0..components.len()).collect();
        order.sort_by(|&a, &b| components[b].cmp(&components[a]));
        let zeta = components.iter().filter(|c| !c.is_zero()).count();
        let theta = theta_of_ordered(&order.iter().map(|&i| &components[i]).collect::<Vec<_>>(), zeta);
        Ok(LambdaVector {
            components,
            order,
            zeta,
            theta,
        })
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| int(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Rational] {
        &self.components
    }

    /// The permutation `π` with `λ_{π(0)} ≥ λ_{π(1)} ≥ …`, ties by index.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Components in descending order.
    pub fn ordered(&self) -> Vec<Rational> {
        self.order.iter().map(|&i| self.components[i].clone()).collect()
    }

    pub fn zeta(&self) -> usize {
        self.zeta
    }

    /// `θ_1, …, θ_{ζ−1}` when λ is a normalized member of the minimal
    /// generator set (up to permutation), with `λ_{π(j)}` equal to the tail
    /// sum after it divided by `θ_j`. Empty for `ζ = 1`.
    pub fn theta_seq(&self) -> Option<&[u32]> {
        self.theta.as_deref()
    }

    /// The tables' θ column: `θ_1`, or 0 when only one component is nonzero.
    pub fn leading_theta(&self) -> Option<u32> {
        self.theta.as_ref().map(|t| t.first().copied().unwrap_or(0))
    }

    pub fn min_nonzero(&self) -> Rational {
        self.components
            .iter()
            .filter(|c| !c.is_zero())
            .min()
            .cloned()
            .expect("nonzero lambda")
    }

    pub fn is_normalized(&self) -> bool {
        self.min_nonzero().is_one()
    }

    pub fn is_ordered(&self) -> bool {
        self.components.windows(2).all(|w| w[0] >= w[1])
    }

    /// Divides by the minimum nonzero component; returns the divisor too.
    pub fn normalized(&self) -> (LambdaVector, Rational) {
        let scale = self.min_nonzero();
        if scale.is_one() {
            return (self.clone(), scale);
        }
        let comps = self.components.iter().map(|c| c / &scale).collect();
        (LambdaVector::new(comps).expect("scaled lambda stays valid"), scale)
    }

    /// Whether some positive multiple of λ lies in the generator set.
    pub fn in_generator_set(&self) -> bool {
        self.normalized().0.theta.is_some()
    }

    /// The vector `(λ_{perm(0)}, λ_{perm(1)}, …)`.
    pub fn permuted(&self, perm: &[usize]) -> Result<LambdaVector> {
        let mut seen = vec![false; self.len()];
        let valid = perm.len() == self.len()
            && perm.iter().all(|&i| i < seen.len() && !std::mem::replace(&mut seen[i], true));
        if !valid {
            return domain("not a permutation of the lambda indices");
        }
        LambdaVector::new(perm.iter().map(|&i| self.components[i].clone()).collect())
    }

    pub fn scaled(&self, mu: &Rational) -> Result<LambdaVector> {
        if !mu.is_positive() {
            return domain("scale factor must be positive");
        }
        LambdaVector::new(self.components.iter().map(|c| c * mu).collect())
    }
}

fn theta_of_ordered(ordered: &[&Rational], zeta: usize) -> Option<Vec<u32>> {
    if !ordered[zeta - 1].is_one() {
        return None;
    }
    let mut theta = vec![0u32; zeta - 1];
    let mut tail = one();
    let mut prev = 0u32;
    for j in (0..zeta - 1).rev() {
        let ratio = &tail / ordered[j];
        if !ratio.is_integer() {
            return None;
        }
        let t: u32 = ratio.to_integer().try_into().ok()?;
        if t < 1 || t > prev + 1 {
            return None;
        }
        theta[j] = t;
        prev = t;
        tail += ordered[j];
    }
    Some(theta)
}

/// `(f_1(λ), …, f_L(λ))` with the minimizing `β*_α` for each level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FVector {
    pub values: Vec<Rational>,
    pub beta_stars: Vec<usize>,
}

/// Sparse nonnegative weights on `L`-bit vectors of Hamming weight `alpha`.
/// Bit `i` of a mask corresponds to component `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    levels: usize,
    alpha: usize,
    weights: BTreeMap<u32, Rational>,
}

impl Resolution {
    pub fn new(levels: usize, alpha: usize) -> Result<Self> {
        if alpha == 0 || alpha > levels || levels > 31 {
            return domain(format!("invalid resolution shape L={levels}, alpha={alpha}"));
        }
        Ok(Resolution {
            levels,
            alpha,
            weights: BTreeMap::new(),
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn weights(&self) -> &BTreeMap<u32, Rational> {
        &self.weights
    }

    pub fn get(&self, mask: u32) -> Rational {
        self.weights.get(&mask).cloned().unwrap_or_else(zero)
    }

    /// Adds `weight` to the entry for `mask`; zero weights are not stored.
    pub fn add(&mut self, mask: u32, weight: Rational) -> Result<()> {
        if mask.count_ones() as usize != self.alpha || mask >> self.levels != 0 {
            return domain(format!(
                "mask {} is not a weight-{} vector of length {}",
                mask_to_string(mask, self.levels),
                self.alpha,
                self.levels
            ));
        }
        if weight.is_negative() {
            return domain("resolution weights must be nonnegative");
        }
        if weight.is_zero() {
            return Ok(());
        }
        *self.weights.entry(mask).or_insert_with(zero) += weight;
        Ok(())
    }

    pub fn total(&self) -> Rational {
        sum(self.weights.values())
    }

    /// `Σ_v c(v)·v`, one entry per component.
    pub fn column_sums(&self) -> Vec<Rational> {
        let mut cols = vec![zero(); self.levels];
        for (mask, w) in &self.weights {
            for (i, col) in cols.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *col += w;
                }
            }
        }
        cols
    }
}

/// Renders a mask as a 0/1 string in component order, e.g. `110`.
pub fn mask_to_string(mask: u32, levels: usize) -> String {
    (0..levels)
        .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn mask_from_string(s: &str) -> Result<u32> {
    if s.is_empty() || s.len() > 31 {
        return Err(Error::Parse(format!("bad binary vector {s:?}")));
    }
    s.bytes().enumerate().try_fold(0u32, |acc, (i, b)| match b {
        b'0' => Ok(acc),
        b'1' => Ok(acc | 1 << i),
        _ => Err(Error::Parse(format!("bad binary vector {s:?}"))),
    })
}

/// All `levels`-bit masks with exactly `weight` bits set, ascending.
pub fn masks_of_weight(levels: usize, weight: usize) -> Vec<u32> {
    (0u32..1 << levels)
        .filter(|m| m.count_ones() as usize == weight)
        .collect()
}

fn check_alpha(lambda: &LambdaVector, alpha: usize) -> Result<()> {
    if alpha == 0 || alpha > lambda.len() {
        return domain(format!("alpha={alpha} outside 1..={}", lambda.len()));
    }
    Ok(())
}

/// `suffix[i] = Σ_{k ≥ i} ordered[k]`, with `suffix[L] = 0`.
fn suffix_sums(ordered: &[Rational]) -> Vec<Rational> {
    let mut suffix = vec![zero(); ordered.len() + 1];
    for i in (0..ordered.len()).rev() {
        suffix[i] = &suffix[i + 1] + &ordered[i];
    }
    suffix
}

fn g_from_suffix(suffix: &[Rational], alpha: usize, beta: usize) -> Rational {
    &suffix[beta] / int((alpha - beta) as i64)
}

/// Forward scan from `start`, stopping at the first β with
/// `g(β) ≤ g(β+1)`.
fn scan_beta(suffix: &[Rational], alpha: usize, start: usize) -> usize {
    let mut beta = start;
    while beta + 1 < alpha && g_from_suffix(suffix, alpha, beta) > g_from_suffix(suffix, alpha, beta + 1) {
        beta += 1;
    }
    debug_assert!(
        (beta..alpha.saturating_sub(1))
            .all(|b| g_from_suffix(suffix, alpha, b) <= g_from_suffix(suffix, alpha, b + 1)),
        "g is not weakly increasing after the scan stop"
    );
    beta
}

/// The tail average `g_{α,λ}(β)` on the descending order of λ.
pub fn g_value(lambda: &LambdaVector, alpha: usize, beta: usize) -> Result<Rational> {
    check_alpha(lambda, alpha)?;
    if beta >= alpha {
        return domain(format!("beta={beta} outside 0..{alpha}"));
    }
    let suffix = suffix_sums(&lambda.ordered());
    Ok(g_from_suffix(&suffix, alpha, beta))
}

/// Smallest minimizer of `g_{α,λ}` over `0..α`.
pub fn beta_star(lambda: &LambdaVector, alpha: usize) -> Result<usize> {
    check_alpha(lambda, alpha)?;
    let suffix = suffix_sums(&lambda.ordered());
    Ok(scan_beta(&suffix, alpha, 0))
}

pub fn f_alpha(lambda: &LambdaVector, alpha: usize) -> Result<Rational> {
    check_alpha(lambda, alpha)?;
    let (normalized, scale) = lambda.normalized();
    let suffix = suffix_sums(&normalized.ordered());
    let beta = scan_beta(&suffix, alpha, 0);
    Ok(g_from_suffix(&suffix, alpha, beta) * scale)
}

/// All of `f_1 … f_L`; each scan resumes at the previous level's `β*`.
pub fn f_vector(lambda: &LambdaVector) -> FVector {
    let (normalized, scale) = lambda.normalized();
    let suffix = suffix_sums(&normalized.ordered());
    let mut values = Vec::with_capacity(lambda.len());
    let mut beta_stars = Vec::with_capacity(lambda.len());
    let mut beta = 0;
    for alpha in 1..=lambda.len() {
        beta = scan_beta(&suffix, alpha, beta);
        values.push(g_from_suffix(&suffix, alpha, beta) * &scale);
        beta_stars.push(beta);
    }
    FVector { values, beta_stars }
}

/// `f_α(λ)` as the optimum of the resolution LP itself.
pub fn f_alpha_bruteforce(lambda: &LambdaVector, alpha: usize) -> Result<Rational> {
    check_alpha(lambda, alpha)?;
    let levels = lambda.len();
    if levels > MAX_LP_LEVELS {
        return resource(format!(
            "resolution LP limited to L <= {MAX_LP_LEVELS}, got {levels}"
        ));
    }
    let masks = masks_of_weight(levels, alpha);
    let mut lp = LinearProgram::new(masks.len());
    for (i, cap) in lambda.components().iter().enumerate() {
        let row = masks
            .iter()
            .map(|m| if m >> i & 1 == 1 { one() } else { zero() })
            .collect();
        lp.add_le(row, cap.clone());
    }
    lp.maximize(vec![one(); masks.len()]);
    let res = solve(&lp)?;
    match (res.status, res.objective_value) {
        (LpStatus::Optimal, Some(v)) => Ok(v),
        (status, _) => Err(Error::Property(format!(
            "resolution LP ended with {status:?}"
        ))),
    }
}

/// An α-resolution attaining `f_α(λ)`, in the caller's component order.
///
/// The `β*` largest components sit in every support vector; the remaining
/// `(α−β*)`-resolution of the tail is perfect and is found by exact LP
/// feasibility. The support is whatever the deterministic pivot order
/// produces, so callers must not rely on a particular one.
pub fn optimal_resolution(lambda: &LambdaVector, alpha: usize) -> Result<Resolution> {
    check_alpha(lambda, alpha)?;
    let levels = lambda.len();
    let mut res = Resolution::new(levels, alpha)?;
    if alpha > lambda.zeta() {
        return Ok(res);
    }
    if levels > MAX_LP_LEVELS {
        return resource(format!(
            "resolution LP limited to L <= {MAX_LP_LEVELS}, got {levels}"
        ));
    }
    let ordered = lambda.ordered();
    let suffix = suffix_sums(&ordered);
    let bstar = scan_beta(&suffix, alpha, 0);
    let target = g_from_suffix(&suffix, alpha, bstar);

    let tail = &ordered[bstar..];
    let sub_alpha = alpha - bstar;
    let masks = masks_of_weight(tail.len(), sub_alpha);
    let mut lp = LinearProgram::new(masks.len());
    for (i, cap) in tail.iter().enumerate() {
        let row = masks
            .iter()
            .map(|m| if m >> i & 1 == 1 { one() } else { zero() })
            .collect();
        lp.add_le(row, cap.clone());
    }
    lp.add_eq(vec![one(); masks.len()], target);
    let sol = solve(&lp)?;
    let Some(point) = sol.point.filter(|_| sol.status == LpStatus::Feasible) else {
        return Err(Error::Property(format!(
            "tail of {lambda} admits no perfect {sub_alpha}-resolution"
        )));
    };

    let order = lambda.order();
    let prefix: u32 = order[..bstar].iter().fold(0, |acc, &i| acc | 1 << i);
    for (mask, w) in masks.iter().zip(point) {
        if w.is_zero() {
            continue;
        }
        let full = (0..tail.len())
            .filter(|k| mask >> k & 1 == 1)
            .fold(prefix, |acc, k| acc | 1 << order[bstar + k]);
        res.add(full, w)?;
    }
    Ok(res)
}

/// Checks feasibility of `res` against λ and that its total is exactly
/// `expected_total`.
pub fn verify_resolution(
    lambda: &LambdaVector,
    res: &Resolution,
    expected_total: &Rational,
) -> Result<bool> {
    if res.levels() != lambda.len() {
        return domain(format!(
            "resolution has L={}, lambda has L={}",
            res.levels(),
            lambda.len()
        ));
    }
    let shapes_ok = res.weights().iter().all(|(mask, w)| {
        mask.count_ones() as usize == res.alpha() && mask >> res.levels() == 0 && !w.is_negative()
    });
    let caps_ok = res
        .column_sums()
        .iter()
        .zip(lambda.components())
        .all(|(col, cap)| col <= cap);
    Ok(shapes_ok && caps_ok && &res.total() == expected_total)
}
