//! The explicit superposition rate region.
//!
//! A rate tuple `R` is achievable for entropies `H` iff
//! `Σ_l λ_l R_l ≥ Σ_α f_α(λ) H_α` for every λ in the generator set. Two
//! independent membership tests are provided: the inequality test, which
//! pairs each ordered λ with the rates sorted ascending, and an exact LP over
//! the superposition variables `r[l][α]`.

mod export;
mod fm;

pub use export::{InequalityRecord, VerdictRecord, WitnessRecord};
pub use fm::{
    compare_with_generator, cone_implies, fourier_motzkin_region, FmComparison,
    ProjectedInequality, MAX_FM_LEVELS,
};

use num_traits::Signed;

use crate::error::{domain, resource, Result};
use crate::generator::{expand_permutations, generate_ordered, OrderedGenerator, MAX_EXPANSION_LEVELS};
use crate::lp::{solve, LinearProgram, LpStatus};
use crate::rational::{dot, format_tuple, one, zero, Rational};
use crate::resolution::{f_vector, masks_of_weight, FVector, LambdaVector, MAX_LP_LEVELS};

/// Largest `L` for which redundancy certificates are computed.
pub const MAX_REDUNDANCY_LEVELS: usize = 5;

/// `Σ_l λ_l R_l ≥ Σ_α f_α(λ) H_α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub lambda: LambdaVector,
    pub f: FVector,
    pub theta: u32,
}

impl Inequality {
    pub fn new(lambda: LambdaVector) -> Self {
        let f = f_vector(&lambda);
        let theta = lambda.leading_theta().unwrap_or(0);
        Inequality { lambda, f, theta }
    }

    pub fn levels(&self) -> usize {
        self.lambda.len()
    }

    pub fn lhs(&self, rates: &[Rational]) -> Rational {
        dot(self.lambda.components(), rates)
    }

    pub fn rhs(&self, entropies: &[Rational]) -> Rational {
        dot(&self.f.values, entropies)
    }

    pub fn holds(&self, rates: &[Rational], entropies: &[Rational]) -> bool {
        self.lhs(rates) >= self.rhs(entropies)
    }
}

/// A rate tuple together with the source entropies `H(X_1), …, H(X_L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateQuery {
    rates: Vec<Rational>,
    entropies: Vec<Rational>,
}

impl RateQuery {
    pub fn new(rates: Vec<Rational>, entropies: Vec<Rational>) -> Result<Self> {
        if rates.is_empty() || rates.len() != entropies.len() {
            return domain(format!(
                "need equally many rates and entropies, got {} and {}",
                rates.len(),
                entropies.len()
            ));
        }
        if rates.iter().chain(&entropies).any(Signed::is_negative) {
            return domain("rates and entropies must be nonnegative");
        }
        Ok(RateQuery { rates, entropies })
    }

    pub fn levels(&self) -> usize {
        self.rates.len()
    }

    pub fn rates(&self) -> &[Rational] {
        &self.rates
    }

    pub fn entropies(&self) -> &[Rational] {
        &self.entropies
    }
}

/// Superposition rates `r[l][α]` (row = encoder `l`, column = level `α`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperpositionAllocation {
    pub r: Vec<Vec<Rational>>,
}

impl SuperpositionAllocation {
    /// Exact check of nonnegativity, the per-encoder rate sums, and every
    /// level-α subset demand.
    pub fn satisfies(&self, q: &RateQuery) -> bool {
        let levels = q.levels();
        if self.r.len() != levels || self.r.iter().any(|row| row.len() != levels) {
            return false;
        }
        if self.r.iter().flatten().any(Signed::is_negative) {
            return false;
        }
        let sums_ok = self
            .r
            .iter()
            .zip(q.rates())
            .all(|(row, rate)| &row.iter().fold(zero(), |a, x| a + x) == rate);
        let demands_ok = (1..=levels).all(|alpha| {
            masks_of_weight(levels, alpha).into_iter().all(|mask| {
                let supplied = (0..levels)
                    .filter(|l| mask >> l & 1 == 1)
                    .fold(zero(), |acc, l| acc + &self.r[l][alpha - 1]);
                supplied >= q.entropies()[alpha - 1]
            })
        });
        sums_ok && demands_ok
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Inequalities,
    Lp,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Inequalities => "ineq",
            Method::Lp => "lp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// An inequality, in the query's coordinates, that the rates violate.
    Violated(Inequality),
    Allocation(SuperpositionAllocation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipVerdict {
    pub achievable: bool,
    pub method: Method,
    pub witness: Option<Witness>,
}

/// The ordered generator inequalities, streamed in table order.
pub fn ordered_inequalities(levels: usize) -> Result<impl Iterator<Item = Inequality>> {
    Ok(OrderedGenerator::new(levels)?.map(Inequality::new))
}

pub fn list_inequalities(levels: usize, ordered_only: bool) -> Result<Vec<Inequality>> {
    if ordered_only {
        return Ok(ordered_inequalities(levels)?.collect());
    }
    if levels > MAX_EXPANSION_LEVELS {
        return resource(format!(
            "full expansion limited to L <= {MAX_EXPANSION_LEVELS}, got {levels}"
        ));
    }
    let g0 = generate_ordered(levels)?;
    Ok(expand_permutations(&g0).into_iter().map(Inequality::new).collect())
}

/// Tests only the ordered inequalities, each against the rates sorted
/// ascending (the pairing that minimizes the left-hand side). The witness
/// is the first violated inequality in enumeration order, rearranged to
/// the query's coordinates.
pub fn check_achievable_inequalities(q: &RateQuery) -> Result<MembershipVerdict> {
    let levels = q.levels();
    let mut ascending: Vec<usize> = (0..levels).collect();
    ascending.sort_by(|&a, &b| q.rates()[a].cmp(&q.rates()[b]));
    let sorted_rates: Vec<Rational> = ascending.iter().map(|&i| q.rates()[i].clone()).collect();

    for ineq in ordered_inequalities(levels)? {
        if ineq.holds(&sorted_rates, q.entropies()) {
            continue;
        }
        let mut comps = vec![zero(); levels];
        for (pos, &orig) in ascending.iter().enumerate() {
            comps[orig] = ineq.lambda.components()[pos].clone();
        }
        let aligned = Inequality::new(LambdaVector::new(comps)?);
        debug_assert!(!aligned.holds(q.rates(), q.entropies()));
        return Ok(MembershipVerdict {
            achievable: false,
            method: Method::Inequalities,
            witness: Some(Witness::Violated(aligned)),
        });
    }
    Ok(MembershipVerdict {
        achievable: true,
        method: Method::Inequalities,
        witness: None,
    })
}

/// The superposition feasibility program; variable `l·L + (α−1)` is
/// `r[l][α]`.
pub fn superposition_program(q: &RateQuery) -> Result<LinearProgram> {
    let levels = q.levels();
    if levels > MAX_LP_LEVELS {
        return resource(format!(
            "superposition LP limited to L <= {MAX_LP_LEVELS}, got {levels}"
        ));
    }
    let n = levels * levels;
    let var = |l: usize, alpha: usize| l * levels + alpha - 1;
    let mut lp = LinearProgram::new(n);
    for (l, rate) in q.rates().iter().enumerate() {
        let mut row = vec![zero(); n];
        for alpha in 1..=levels {
            row[var(l, alpha)] = one();
        }
        lp.add_eq(row, rate.clone());
    }
    for alpha in 1..=levels {
        for mask in masks_of_weight(levels, alpha) {
            let mut row = vec![zero(); n];
            for l in (0..levels).filter(|l| mask >> l & 1 == 1) {
                row[var(l, alpha)] = one();
            }
            lp.add_ge(row, q.entropies()[alpha - 1].clone());
        }
    }
    Ok(lp)
}

pub fn check_achievable_lp(q: &RateQuery) -> Result<MembershipVerdict> {
    let levels = q.levels();
    let lp = superposition_program(q)?;
    let res = solve(&lp)?;
    let witness = match (res.status, res.point) {
        (LpStatus::Feasible, Some(point)) => Some(Witness::Allocation(SuperpositionAllocation {
            r: point.chunks(levels).map(<[Rational]>::to_vec).collect(),
        })),
        _ => None,
    };
    Ok(MembershipVerdict {
        achievable: witness.is_some(),
        method: Method::Lp,
        witness,
    })
}

#[derive(Debug, Clone)]
pub struct RedundancyCertificate {
    pub index: usize,
    pub inequality: Inequality,
    /// `Σ_α f_α(λ) H_α` of the indexed inequality.
    pub rhs: Rational,
    /// Minimum of `λ·R` subject to all other inequalities and `R ≥ 0`.
    pub optimum: Rational,
    pub essential: bool,
    /// The minimizer; it meets every other inequality and violates this one.
    pub witness_rates: Option<Vec<Rational>>,
    pub program: LinearProgram,
}

fn check_redundancy_args(levels: usize, index: usize, entropies: &[Rational]) -> Result<Vec<Inequality>> {
    if levels == 0 || levels > MAX_REDUNDANCY_LEVELS {
        return resource(format!(
            "redundancy certificates limited to L in 1..={MAX_REDUNDANCY_LEVELS}, got {levels}"
        ));
    }
    if entropies.len() != levels {
        return domain("need one entropy per level");
    }
    if entropies.iter().any(|h| !h.is_positive()) {
        return domain("redundancy certificates need strictly positive entropies");
    }
    let all = list_inequalities(levels, false)?;
    if index >= all.len() {
        return domain(format!("index {index} outside 0..{}", all.len()));
    }
    Ok(all)
}

/// `min λ⁽ⁱ⁰⁾·R` subject to every other inequality, `R ≥ 0`.
pub fn redundancy_program(levels: usize, index: usize, entropies: &[Rational]) -> Result<LinearProgram> {
    let all = check_redundancy_args(levels, index, entropies)?;
    Ok(primal_program(&all, index, entropies))
}

fn primal_program(all: &[Inequality], index: usize, entropies: &[Rational]) -> LinearProgram {
    let levels = all[index].levels();
    let mut lp = LinearProgram::new(levels);
    for (i, ineq) in all.iter().enumerate() {
        if i != index {
            lp.add_ge(ineq.lambda.components().to_vec(), ineq.rhs(entropies));
        }
    }
    lp.minimize(all[index].lambda.components().to_vec());
    lp
}

/// The dual of [`redundancy_program`]: maximize `Σ c_i rhs_i` over
/// `c ≥ 0` with `Σ c_i λ⁽ⁱ⁾ ≤ λ⁽ⁱ⁰⁾` component-wise. Variable `k` is the
/// multiplier of the `k`-th inequality after skipping `index`.
pub fn redundancy_dual_program(levels: usize, index: usize, entropies: &[Rational]) -> Result<LinearProgram> {
    let all = check_redundancy_args(levels, index, entropies)?;
    let others: Vec<&Inequality> = all
        .iter()
        .enumerate()
        .filter_map(|(i, q)| (i != index).then_some(q))
        .collect();
    if others.is_empty() {
        return domain("dual program has no multipliers when L = 1");
    }
    let mut lp = LinearProgram::new(others.len());
    for l in 0..levels {
        let row = others.iter().map(|q| q.lambda.components()[l].clone()).collect();
        lp.add_le(row, all[index].lambda.components()[l].clone());
    }
    lp.maximize(others.iter().map(|q| q.rhs(entropies)).collect());
    Ok(lp)
}

pub fn redundancy_certificate(levels: usize, index: usize, entropies: &[Rational]) -> Result<RedundancyCertificate> {
    let all = check_redundancy_args(levels, index, entropies)?;
    let program = primal_program(&all, index, entropies);
    let res = solve(&program)?;
    let (Some(optimum), Some(point)) = (res.objective_value, res.point) else {
        return Err(crate::Error::Property(format!(
            "redundancy LP for index {index} ended with {:?}",
            res.status
        )));
    };
    let inequality = all[index].clone();
    let rhs = inequality.rhs(entropies);
    let essential = optimum < rhs;
    Ok(RedundancyCertificate {
        index,
        rhs,
        optimum,
        essential,
        witness_rates: essential.then_some(point),
        inequality,
        program,
    })
}

impl std::fmt::Display for Inequality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> {}", self.lambda, format_tuple(&self.f.values))
    }
}
