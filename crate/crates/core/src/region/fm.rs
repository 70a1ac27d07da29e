//! Fourier–Motzkin projection of the superposition system.
//!
//! The entropies are kept symbolic: every row is a homogeneous inequality
//! `a·x ≥ 0` over the columns `(r, R, H)`, with `H ≥ 0` as fixed side
//! conditions. The equalities `R_l = Σ_α r[l][α]` are used up front to
//! substitute `r[l][1]`; the remaining `L(L−1)` variables are eliminated
//! one at a time, and after every step rows implied by the others are
//! dropped by an exact cone-membership LP.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{resource, Result};
use crate::lp::{solve, LinearProgram};
use crate::rational::{format_tuple, zero, Rational};
use crate::resolution::masks_of_weight;

use super::{list_inequalities, Inequality};

pub const MAX_FM_LEVELS: usize = 4;

/// `Σ_l λ_l R_l ≥ Σ_α f_α H_α` as produced by projection, with `λ` scaled
/// so its smallest nonzero entry is 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectedInequality {
    pub lambda: Vec<Rational>,
    pub f: Vec<Rational>,
}

impl ProjectedInequality {
    pub fn rhs(&self, entropies: &[Rational]) -> Rational {
        crate::rational::dot(&self.f, entropies)
    }

    /// The row `λ·R − f·H ≥ 0` over `(R, H)`.
    fn as_cone_row(&self) -> Vec<Rational> {
        self.lambda
            .iter()
            .cloned()
            .chain(self.f.iter().map(|v| -v.clone()))
            .collect()
    }
}

impl std::fmt::Display for ProjectedInequality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> {}", format_tuple(&self.lambda), format_tuple(&self.f))
    }
}

type Row = Vec<BigInt>;

fn normalize(mut row: Row) -> Option<Row> {
    let g = row.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if g.is_zero() {
        return None;
    }
    if !g.is_one() {
        row.iter_mut().for_each(|v| *v /= &g);
    }
    Some(row)
}

fn to_rational(row: &[BigInt]) -> Vec<Rational> {
    row.iter().map(|v| Rational::from_integer(v.clone())).collect()
}

/// Whether `target·x ≥ 0` holds on the cone `{x : g·x ≥ 0 ∀ g}`, i.e.
/// whether `target` is a nonnegative combination of the generators.
pub fn cone_implies(generators: &[Vec<Rational>], target: &[Rational]) -> Result<bool> {
    if target.iter().all(Zero::is_zero) {
        return Ok(true);
    }
    if generators.is_empty() {
        return Ok(false);
    }
    let mut lp = LinearProgram::new(generators.len());
    for (k, t) in target.iter().enumerate() {
        lp.add_eq(generators.iter().map(|g| g[k].clone()).collect(), t.clone());
    }
    Ok(solve(&lp)?.is_feasible())
}

fn side_conditions(width: usize, h_start: usize) -> Vec<Vec<Rational>> {
    (h_start..width)
        .map(|k| {
            let mut row = vec![zero(); width];
            row[k] = crate::rational::one();
            row
        })
        .collect()
}

/// Drops rows implied by the remaining rows and the side conditions,
/// scanning from the last row to the first.
fn remove_redundant(rows: Vec<Row>, side: &[Vec<Rational>]) -> Result<Vec<Row>> {
    let mut kept: Vec<Option<Row>> = rows.into_iter().map(Some).collect();
    for i in (0..kept.len()).rev() {
        let target = to_rational(kept[i].as_ref().expect("row present"));
        let generators: Vec<Vec<Rational>> = kept
            .iter()
            .enumerate()
            .filter_map(|(j, r)| if j == i { None } else { r.as_ref().map(|r| to_rational(r)) })
            .chain(side.iter().cloned())
            .collect();
        if cone_implies(&generators, &target)? {
            kept[i] = None;
        }
    }
    Ok(kept.into_iter().flatten().collect())
}

fn eliminate(rows: &[Row], col: usize) -> Vec<Row> {
    let mut out: BTreeSet<Row> = BTreeSet::new();
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for row in rows {
        if row[col].is_positive() {
            pos.push(row);
        } else if row[col].is_negative() {
            neg.push(row);
        } else if let Some(r) = normalize(row.clone()) {
            out.insert(r);
        }
    }
    for p in &pos {
        for n in &neg {
            let a = &p[col];
            let b = -&n[col];
            let combined: Row = p.iter().zip(n.iter()).map(|(x, y)| x * &b + y * a).collect();
            if let Some(r) = normalize(combined) {
                out.insert(r);
            }
        }
    }
    out.into_iter().collect()
}

/// The initial system over `(r[l][α] for α ≥ 2, R, H)` after substituting
/// `r[l][1] = R_l − Σ_{α≥2} r[l][α]`.
fn initial_rows(levels: usize) -> Vec<Row> {
    let n_elim = levels * (levels - 1);
    let width = n_elim + 2 * levels;
    let r_col = |l: usize, alpha: usize| l * (levels - 1) + alpha - 2;
    let big_r = |l: usize| n_elim + l;
    let big_h = |alpha: usize| n_elim + levels + alpha - 1;
    let mut rows = Vec::new();
    for l in 0..levels {
        // r[l][1] >= H_1 and r[l][1] >= 0.
        for with_h in [true, false] {
            let mut row = vec![BigInt::zero(); width];
            row[big_r(l)] = BigInt::one();
            for alpha in 2..=levels {
                row[r_col(l, alpha)] = -BigInt::one();
            }
            if with_h {
                row[big_h(1)] = -BigInt::one();
            }
            rows.push(row);
        }
    }
    for alpha in 2..=levels {
        for mask in masks_of_weight(levels, alpha) {
            let mut row = vec![BigInt::zero(); width];
            for l in (0..levels).filter(|l| mask >> l & 1 == 1) {
                row[r_col(l, alpha)] = BigInt::one();
            }
            row[big_h(alpha)] = -BigInt::one();
            rows.push(row);
        }
        for l in 0..levels {
            let mut row = vec![BigInt::zero(); width];
            row[r_col(l, alpha)] = BigInt::one();
            rows.push(row);
        }
    }
    rows
}

/// Projects the superposition system onto the rates, returning the
/// irredundant inequalities sorted by `(λ, f)`.
pub fn fourier_motzkin_region(levels: usize) -> Result<Vec<ProjectedInequality>> {
    if levels == 0 || levels > MAX_FM_LEVELS {
        return resource(format!(
            "Fourier-Motzkin projection limited to L in 1..={MAX_FM_LEVELS}, got {levels}"
        ));
    }
    let n_elim = levels * (levels - 1);
    let width = n_elim + 2 * levels;
    let side = side_conditions(width, n_elim + levels);

    let mut rows = remove_redundant(initial_rows(levels), &side)?;
    let mut remaining: Vec<usize> = (0..n_elim).collect();
    while !remaining.is_empty() {
        // Eliminate the column producing the fewest combinations next.
        let (slot, &col) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &c)| {
                let p = rows.iter().filter(|r| r[c].is_positive()).count();
                let n = rows.iter().filter(|r| r[c].is_negative()).count();
                (p * n, c)
            })
            .expect("remaining columns");
        remaining.swap_remove(slot);
        rows = remove_redundant(eliminate(&rows, col), &side)?;
    }

    let mut out: Vec<ProjectedInequality> = rows
        .iter()
        .map(|row| {
            let coeffs = to_rational(&row[n_elim..]);
            let (lambda, h) = coeffs.split_at(levels);
            let scale = lambda
                .iter()
                .filter(|v| !v.is_zero())
                .min()
                .cloned()
                .unwrap_or_else(crate::rational::one);
            ProjectedInequality {
                lambda: lambda.iter().map(|v| v / &scale).collect(),
                f: h.iter().map(|v| -(v / &scale)).collect(),
            }
        })
        .collect();
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct FmComparison {
    pub levels: usize,
    pub projected: Vec<ProjectedInequality>,
    pub generator: Vec<Inequality>,
    /// Every projected row follows from the generator system (and `H ≥ 0`).
    pub projected_implied: bool,
    /// Every generator row follows from the projected system (and `H ≥ 0`).
    pub generator_implied: bool,
    /// The two systems coincide row for row after normalization.
    pub same_rows: bool,
}

impl FmComparison {
    pub fn equivalent(&self) -> bool {
        self.projected_implied && self.generator_implied
    }
}

/// Projects at `L` and checks mutual implication with the full generator
/// system in the joint `(R, H)` space.
pub fn compare_with_generator(levels: usize) -> Result<FmComparison> {
    let projected = fourier_motzkin_region(levels)?;
    let generator = list_inequalities(levels, false)?;
    let side = side_conditions(2 * levels, levels);

    let gen_rows: Vec<Vec<Rational>> = generator
        .iter()
        .map(|q| {
            q.lambda
                .components()
                .iter()
                .cloned()
                .chain(q.f.values.iter().map(|v| -v.clone()))
                .collect()
        })
        .collect();
    let fm_rows: Vec<Vec<Rational>> = projected.iter().map(ProjectedInequality::as_cone_row).collect();

    let with_side = |rows: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
        rows.iter().cloned().chain(side.iter().cloned()).collect()
    };
    let gen_cone = with_side(&gen_rows);
    let fm_cone = with_side(&fm_rows);

    let mut projected_implied = true;
    for row in &fm_rows {
        projected_implied &= cone_implies(&gen_cone, row)?;
    }
    let mut generator_implied = true;
    for row in &gen_rows {
        generator_implied &= cone_implies(&fm_cone, row)?;
    }

    let mut gen_set: Vec<ProjectedInequality> = generator
        .iter()
        .map(|q| ProjectedInequality {
            lambda: q.lambda.components().to_vec(),
            f: q.f.values.clone(),
        })
        .collect();
    gen_set.sort();
    let same_rows = gen_set == projected;

    Ok(FmComparison {
        levels,
        projected,
        generator,
        projected_implied,
        generator_implied,
        same_rows,
    })
}
