//! Subset entropy inequality checks on concrete distributions.
//!
//! Joint entropies are irrational in general. Each `H_u` is evaluated in
//! double precision and rounded to a multiple of `2^-40`; every comparison
//! against a closed inequality is then granted a slack of `2^-30` in the
//! `≥` direction.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{domain, resource, Error, Result};
use crate::generator::OrderedGenerator;
use crate::lp::{solve, LinearProgram};
use crate::rational::{format, format_list, frac, one, zero, Rational};
use crate::resolution::{f_vector, masks_of_weight, verify_resolution, LambdaVector, Resolution};
use crate::rng::{random_weights, seeded, Prng};

pub const MAX_ENTROPY_LEVELS: usize = 5;
pub const MAX_ALPHABET_PRODUCT: usize = 1_000_000;
/// Largest `L` accepted by [`chain_feasibility`] and the batch runner.
pub const MAX_CHAIN_LEVELS: usize = 4;

const ROUNDING_BITS: u32 = 40;
const SLACK_BITS: u32 = 30;

/// `2^-30`, the tolerance granted to every entropy comparison.
pub fn slack() -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << SLACK_BITS)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    levels: usize,
    alphabet_sizes: Vec<usize>,
    pmf: BTreeMap<Vec<u32>, Rational>,
}

impl JointDistribution {
    /// Zero-probability entries are dropped; the rest must be positive,
    /// inside the alphabets, and sum to exactly one.
    pub fn new(alphabet_sizes: Vec<usize>, pmf: BTreeMap<Vec<u32>, Rational>) -> Result<Self> {
        let levels = alphabet_sizes.len();
        if levels == 0 || levels > MAX_ENTROPY_LEVELS {
            return resource(format!(
                "distributions limited to 1..={MAX_ENTROPY_LEVELS} variables, got {levels}"
            ));
        }
        if alphabet_sizes.contains(&0) {
            return domain("alphabet sizes must be positive");
        }
        let product = alphabet_sizes
            .iter()
            .try_fold(1usize, |acc, &a| acc.checked_mul(a).filter(|&p| p <= MAX_ALPHABET_PRODUCT));
        if product.is_none() {
            return resource(format!("alphabet product exceeds {MAX_ALPHABET_PRODUCT}"));
        }
        let mut total = zero();
        let mut kept = BTreeMap::new();
        for (symbols, p) in pmf {
            if symbols.len() != levels
                || symbols.iter().zip(&alphabet_sizes).any(|(&s, &a)| s as usize >= a)
            {
                return domain(format!("symbol tuple {symbols:?} outside the alphabets"));
            }
            if p.is_negative() {
                return domain("probabilities must be nonnegative");
            }
            if !p.is_zero() {
                total += &p;
                kept.insert(symbols, p);
            }
        }
        if !total.is_one() {
            return domain(format!("probabilities sum to {}, not 1", format(&total)));
        }
        Ok(JointDistribution {
            levels,
            alphabet_sizes,
            pmf: kept,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    pub fn pmf(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.pmf
    }

    /// `L` independent uniform bits.
    pub fn independent_bits(levels: usize) -> Result<Self> {
        let cells = 1u32 << levels;
        let p = frac(1, cells as i64);
        let pmf = (0..cells)
            .map(|c| ((0..levels).map(|i| c >> i & 1).collect(), p.clone()))
            .collect();
        JointDistribution::new(vec![2; levels], pmf)
    }

    /// One uniform bit copied into all `L` variables.
    pub fn copy_chain(levels: usize) -> Result<Self> {
        let pmf = [(vec![0; levels], frac(1, 2)), (vec![1; levels], frac(1, 2))]
            .into_iter()
            .collect();
        JointDistribution::new(vec![2; levels], pmf)
    }

    /// Alphabets of size 2 or 3 and integer weights below `2^16`,
    /// normalized exactly.
    pub fn random(rng: &mut Prng, levels: usize) -> Result<Self> {
        use rand::Rng;
        let sizes: Vec<usize> = (0..levels).map(|_| rng.gen_range(2..=3)).collect();
        let tuples = all_tuples(&sizes);
        let weights = random_weights(rng, tuples.len());
        let total: u64 = weights.iter().map(|&w| u64::from(w)).sum();
        let pmf = tuples
            .into_iter()
            .zip(weights)
            .map(|(t, w)| (t, Rational::new(BigInt::from(w), BigInt::from(total))))
            .collect();
        JointDistribution::new(sizes, pmf)
    }

    /// SHA-256 of the canonical text form, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }

    fn canonical_text(&self) -> String {
        let mut s = format!("{:?}", self.alphabet_sizes);
        for (symbols, p) in &self.pmf {
            s.push_str(&format!(";{symbols:?}={}", format(p)));
        }
        s
    }
}

fn all_tuples(sizes: &[usize]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &a in sizes {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..a as u32).map(move |s| {
                    let mut t = t.clone();
                    t.push(s);
                    t
                })
            })
            .collect();
    }
    out
}

/// `H_u` for every nonzero `L`-bit mask `u` (bit `i` = variable `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyVector {
    levels: usize,
    values: BTreeMap<u32, Rational>,
}

impl EntropyVector {
    /// Builds a vector from explicit values; masks missing from `values`
    /// are rejected.
    pub fn new(levels: usize, values: BTreeMap<u32, Rational>) -> Result<Self> {
        if levels == 0 || levels > MAX_ENTROPY_LEVELS {
            return resource(format!("entropy vectors limited to L <= {MAX_ENTROPY_LEVELS}"));
        }
        if (1u32..1 << levels).any(|m| !values.contains_key(&m)) || values.len() != (1 << levels) - 1 {
            return domain("need exactly one value per nonzero mask");
        }
        Ok(EntropyVector { levels, values })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `H_u`, with `H_0 = 0`.
    pub fn get(&self, mask: u32) -> Rational {
        self.values.get(&mask).cloned().unwrap_or_else(zero)
    }

    pub fn values(&self) -> &BTreeMap<u32, Rational> {
        &self.values
    }

    /// `H_u ≤ H_{u+i}` up to the slack, checked on single-element
    /// extensions.
    pub fn is_monotone(&self) -> bool {
        let s = slack();
        (0u32..1 << self.levels).all(|u| {
            (0..self.levels)
                .filter(|i| u >> i & 1 == 0)
                .all(|i| self.get(u) <= self.get(u | 1 << i) + &s)
        })
    }

    /// The elemental form `H_{u+i} + H_{u+j} ≥ H_{u+i+j} + H_u` up to the
    /// slack, which implies submodularity for all pairs.
    pub fn is_submodular(&self) -> bool {
        let s = slack();
        (0u32..1 << self.levels).all(|u| {
            (0..self.levels).all(|i| {
                (i + 1..self.levels).all(|j| {
                    if u >> i & 1 == 1 || u >> j & 1 == 1 {
                        return true;
                    }
                    let (a, b) = (u | 1 << i, u | 1 << j);
                    self.get(a) + self.get(b) + &s >= self.get(a | b) + self.get(u)
                })
            })
        })
    }
}

fn round_bits(h: f64) -> Rational {
    let scale = (1u64 << ROUNDING_BITS) as f64;
    let k = (h * scale).round() as i64;
    Rational::new(BigInt::from(k), BigInt::one() << ROUNDING_BITS)
}

/// Every marginal joint entropy in bits, rounded to a multiple of `2^-40`.
pub fn entropy_vector(jd: &JointDistribution) -> Result<EntropyVector> {
    let levels = jd.levels();
    let mut values = BTreeMap::new();
    for mask in 1u32..1 << levels {
        let mut marginal: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (symbols, p) in jd.pmf() {
            let key = (0..levels)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| symbols[i])
                .collect();
            *marginal.entry(key).or_insert_with(zero) += p;
        }
        let h: f64 = marginal
            .values()
            .map(|p| p.to_f64().expect("probability fits in f64"))
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.log2())
            .sum();
        values.insert(mask, round_bits(h));
    }
    EntropyVector::new(levels, values)
}

/// `Σ_{|u|=α−1} H_u / C(L−1, α−2) ≥ Σ_{|u|=α} H_u / C(L−1, α−1)` for
/// `α = 2..L`, up to the slack.
pub fn han_check(ev: &EntropyVector) -> bool {
    chain_holds(ev, &uniform_resolutions(ev.levels()))
}

/// `c_α(u) = 1 / C(L−1, α−1)`: the optimal resolutions of the all-ones λ.
pub fn uniform_resolutions(levels: usize) -> Vec<Resolution> {
    (1..=levels)
        .map(|alpha| {
            let w = frac(1, crate::rational::binomial(levels - 1, alpha - 1) as i64);
            let mut res = Resolution::new(levels, alpha).expect("levels within mask range");
            for mask in masks_of_weight(levels, alpha) {
                res.add(mask, w.clone()).expect("mask has weight alpha");
            }
            res
        })
        .collect()
}

fn weighted_entropy(ev: &EntropyVector, res: &Resolution) -> Rational {
    res.weights()
        .iter()
        .fold(zero(), |acc, (mask, w)| acc + w * ev.get(*mask))
}

/// Whether `Σ c_{α−1}(u) H_u ≥ Σ c_α(u) H_u` (up to the slack) for each
/// consecutive pair of the given per-level resolutions.
pub fn chain_holds(ev: &EntropyVector, resolutions: &[Resolution]) -> bool {
    let s = slack();
    resolutions
        .windows(2)
        .all(|pair| weighted_entropy(ev, &pair[0]) + &s >= weighted_entropy(ev, &pair[1]))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainOutcome {
    pub holds: bool,
    /// One optimal resolution per level `α = 1..L`.
    pub resolutions: Option<Vec<Resolution>>,
}

/// The joint program over all `c_α(u)`; variables are laid out level by
/// level, masks ascending within a level.
pub fn chain_program(lambda: &LambdaVector, ev: &EntropyVector) -> Result<LinearProgram> {
    let levels = lambda.len();
    if levels > MAX_CHAIN_LEVELS {
        return resource(format!("chain program limited to L <= {MAX_CHAIN_LEVELS}"));
    }
    if ev.levels() != levels {
        return domain(format!("lambda has L={levels}, entropy vector has L={}", ev.levels()));
    }
    if !lambda.in_generator_set() {
        return domain(format!("{lambda} is not in the generator set"));
    }
    let blocks: Vec<Vec<u32>> = (1..=levels).map(|a| masks_of_weight(levels, a)).collect();
    let offsets: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, b| {
            let start = *acc;
            *acc += b.len();
            Some(start)
        })
        .collect();
    let n = blocks.iter().map(Vec::len).sum();
    let f = f_vector(lambda);
    let mut lp = LinearProgram::new(n);
    for (a, masks) in blocks.iter().enumerate() {
        for (l, cap) in lambda.components().iter().enumerate() {
            let mut row = vec![zero(); n];
            for (k, m) in masks.iter().enumerate() {
                if m >> l & 1 == 1 {
                    row[offsets[a] + k] = one();
                }
            }
            lp.add_le(row, cap.clone());
        }
        let mut row = vec![zero(); n];
        for k in 0..masks.len() {
            row[offsets[a] + k] = one();
        }
        lp.add_eq(row, f.values[a].clone());
    }
    for a in 1..levels {
        let mut row = vec![zero(); n];
        for (k, m) in blocks[a - 1].iter().enumerate() {
            row[offsets[a - 1] + k] = ev.get(*m);
        }
        for (k, m) in blocks[a].iter().enumerate() {
            row[offsets[a] + k] = -ev.get(*m);
        }
        lp.add_ge(row, -slack());
    }
    Ok(lp)
}

/// Searches for optimal resolutions at every level that satisfy the
/// entropy chain, returning them when they exist.
pub fn chain_feasibility(lambda: &LambdaVector, ev: &EntropyVector) -> Result<ChainOutcome> {
    let lp = chain_program(lambda, ev)?;
    let levels = lambda.len();
    let res = solve(&lp)?;
    let feasible = res.is_feasible();
    let Some(point) = res.point.filter(|_| feasible) else {
        return Ok(ChainOutcome {
            holds: false,
            resolutions: None,
        });
    };
    let mut resolutions = Vec::with_capacity(levels);
    let mut at = 0;
    for alpha in 1..=levels {
        let mut r = Resolution::new(levels, alpha)?;
        for m in masks_of_weight(levels, alpha) {
            r.add(m, point[at].clone())?;
            at += 1;
        }
        resolutions.push(r);
    }
    Ok(ChainOutcome {
        holds: true,
        resolutions: Some(resolutions),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessLevel {
    pub alpha: usize,
    pub total: String,
    pub support: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub instance: String,
    pub distribution: String,
    pub lambda: Vec<String>,
    pub holds: bool,
    pub resolutions_verified: bool,
    pub witness: Option<Vec<WitnessLevel>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchReport {
    pub levels: usize,
    pub trials: usize,
    pub seed: u64,
    pub han_passed: usize,
    pub chain_instances: usize,
    pub chain_passed: usize,
    pub instances: Vec<InstanceReport>,
}

impl BatchReport {
    pub fn all_hold(&self) -> bool {
        self.han_passed == self.trials
            && self.chain_passed == self.chain_instances
            && self.instances.iter().all(|i| i.holds && i.resolutions_verified)
    }
}

/// Draws `trials` random distributions and runs Han's check plus the chain
/// program for every ordered generator member on each of them.
pub fn subset_entropy_batch(levels: usize, trials: usize, seed: u64) -> Result<BatchReport> {
    if !(2..=MAX_CHAIN_LEVELS).contains(&levels) {
        return resource(format!("batch runs need L in 2..={MAX_CHAIN_LEVELS}, got {levels}"));
    }
    let lambdas: Vec<LambdaVector> = OrderedGenerator::new(levels)?.collect();
    let mut rng = seeded(seed);
    let mut report = BatchReport {
        levels,
        trials,
        seed,
        han_passed: 0,
        chain_instances: 0,
        chain_passed: 0,
        instances: Vec::new(),
    };
    for _ in 0..trials {
        let jd = JointDistribution::random(&mut rng, levels)?;
        let ev = entropy_vector(&jd)?;
        if !ev.is_monotone() || !ev.is_submodular() {
            return Err(Error::Property(format!(
                "entropy vector of distribution {} is not polymatroidal",
                jd.digest()
            )));
        }
        if han_check(&ev) {
            report.han_passed += 1;
        }
        let digest = jd.digest();
        for lambda in &lambdas {
            let outcome = chain_feasibility(lambda, &ev)?;
            let f = f_vector(lambda);
            let verified = match &outcome.resolutions {
                Some(rs) => rs
                    .iter()
                    .zip(&f.values)
                    .map(|(r, total)| verify_resolution(lambda, r, total))
                    .collect::<Result<Vec<bool>>>()?
                    .into_iter()
                    .all(|ok| ok),
                None => false,
            };
            report.chain_instances += 1;
            if outcome.holds {
                report.chain_passed += 1;
            }
            let lambda_text = format_list(lambda.components());
            let instance = hex::encode(Sha256::digest(
                format!("{digest}|{}", lambda_text.join(",")).as_bytes(),
            ));
            report.instances.push(InstanceReport {
                instance,
                distribution: digest.clone(),
                lambda: lambda_text,
                holds: outcome.holds,
                resolutions_verified: verified,
                witness: outcome.resolutions.as_ref().map(|rs| {
                    rs.iter()
                        .map(|r| WitnessLevel {
                            alpha: r.alpha(),
                            total: format(&r.total()),
                            support: r.weights().len(),
                        })
                        .collect()
                }),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn independent_bits() {
        let ev = entropy_vector(&JointDistribution::independent_bits(2).unwrap()).unwrap();
        assert_eq!((ev.get(0b01), ev.get(0b10), ev.get(0b11)), (int(1), int(1), int(2)));
        for levels in 1..=5 {
            let ev = entropy_vector(&JointDistribution::independent_bits(levels).unwrap()).unwrap();
            assert!(han_check(&ev));
            for mask in 1u32..1 << levels {
                assert_eq!(ev.get(mask), int(mask.count_ones() as i64));
            }
        }
    }

    #[test]
    fn copy_chain() {
        for levels in 2..=5 {
            let ev = entropy_vector(&JointDistribution::copy_chain(levels).unwrap()).unwrap();
            assert!((1u32..1 << levels).all(|m| ev.get(m) == int(1)));
            assert!(han_check(&ev));
        }
    }

    #[test]
    fn three_point_uniform() {
        let p = frac(1, 3);
        let pmf = [(vec![0, 0], p.clone()), (vec![0, 1], p.clone()), (vec![1, 0], p)]
            .into_iter()
            .collect();
        let ev = entropy_vector(&JointDistribution::new(vec![2, 2], pmf).unwrap()).unwrap();
        let h = ev.get(0b11).to_f64().unwrap();
        assert!((h - 3f64.log2()).abs() < 1e-11);
        assert!((ev.get(0b11) * Rational::from_integer(BigInt::one() << 40)).is_integer());
    }

    #[test]
    fn rejects_unnormalized() {
        let pmf = [(vec![0], frac(1, 3))].into_iter().collect();
        assert!(matches!(JointDistribution::new(vec![2], pmf), Err(Error::Domain(_))));
        let pmf = [(vec![2], one())].into_iter().collect();
        assert!(JointDistribution::new(vec![2], pmf).is_err());
    }

    #[test]
    fn uniform_witness_for_all_ones() {
        let ev = entropy_vector(&JointDistribution::independent_bits(3).unwrap()).unwrap();
        let ones = LambdaVector::from_ints(&[1, 1, 1]).unwrap();
        let out = chain_feasibility(&ones, &ev).unwrap();
        assert!(out.holds);
        // The optimal resolution of the all-ones vector is unique.
        assert_eq!(out.resolutions.unwrap(), uniform_resolutions(3));
    }

    #[test]
    fn chain_examples() {
        let ev = entropy_vector(&JointDistribution::independent_bits(3).unwrap()).unwrap();
        let lam = LambdaVector::from_ints(&[2, 1, 1]).unwrap();
        let out = chain_feasibility(&lam, &ev).unwrap();
        assert!(out.holds);
        let f = f_vector(&lam);
        for (r, total) in out.resolutions.unwrap().iter().zip(&f.values) {
            assert!(verify_resolution(&lam, r, total).unwrap());
        }
        let outside = LambdaVector::from_ints(&[3, 1, 1]).unwrap();
        assert!(matches!(chain_feasibility(&outside, &ev), Err(Error::Domain(_))));
    }

    #[test]
    fn random_vectors_are_polymatroids() {
        let mut rng = seeded(1);
        for _ in 0..20 {
            let ev = entropy_vector(&JointDistribution::random(&mut rng, 4).unwrap()).unwrap();
            assert!(ev.is_monotone() && ev.is_submodular());
        }
    }

    #[test]
    fn small_batch() {
        let report = subset_entropy_batch(3, 3, 42).unwrap();
        assert_eq!(report.chain_instances, 3 * 4);
        assert!(report.all_hold());
        let again = subset_entropy_batch(3, 3, 42).unwrap();
        assert_eq!(
            serde_json::to_string(&report).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }
}
