//! Executable forms of the structural identities satisfied by `f_α`.
//!
//! Each check evaluates one identity on concrete inputs and reports whether
//! it held. Checks whose premise does not apply return `None`.

use num_traits::Zero;

use crate::error::{domain, Result};
use crate::rational::{dot, int, sum, Rational};
use crate::resolution::{f_alpha, f_vector, g_value, optimal_resolution, verify_resolution, LambdaVector};

/// `f(ω(λ)) = f(λ)` for the rearrangement `perm`.
pub fn permutation_invariance(lambda: &LambdaVector, perm: &[usize]) -> Result<bool> {
    let moved = lambda.permuted(perm)?;
    Ok(f_vector(&moved).values == f_vector(lambda).values)
}

/// `f_α(μλ) = μ f_α(λ)` at every level, for `μ > 0`.
pub fn homogeneity(lambda: &LambdaVector, mu: &Rational) -> Result<bool> {
    let scaled = lambda.scaled(mu)?;
    let f = f_vector(lambda);
    let g = f_vector(&scaled);
    Ok(f.values.iter().zip(&g.values).all(|(a, b)| &(a * mu) == b))
}

/// `f_α(μ₁λ₁ + μ₂λ₂) ≥ μ₁f_α(λ₁) + μ₂f_α(λ₂)` at every level, for
/// `μ₁, μ₂ ≥ 0` not both zero.
pub fn concavity(l1: &LambdaVector, l2: &LambdaVector, mu1: &Rational, mu2: &Rational) -> Result<bool> {
    if l1.len() != l2.len() {
        return domain("concavity needs vectors of equal length");
    }
    let mixed: Vec<Rational> = l1
        .components()
        .iter()
        .zip(l2.components())
        .map(|(a, b)| a * mu1 + b * mu2)
        .collect();
    let mixed = LambdaVector::new(mixed)?;
    let (f1, f2, fm) = (f_vector(l1), f_vector(l2), f_vector(&mixed));
    Ok((0..l1.len()).all(|a| fm.values[a] >= &f1.values[a] * mu1 + &f2.values[a] * mu2))
}

/// The shape of the f-vector: `β*_1 = 0`, `β*` weakly increasing, `f`
/// weakly decreasing, `f_1 = Σλ`, and `f_α = 0` beyond ζ.
pub fn f_vector_shape(lambda: &LambdaVector) -> bool {
    let f = f_vector(lambda);
    let betas_ok = f.beta_stars.first() == Some(&0) && f.beta_stars.windows(2).all(|w| w[0] <= w[1]);
    let values_ok = f.values.windows(2).all(|w| w[0] >= w[1]);
    let f1_ok = f.values[0] == sum(lambda.components());
    let tail_ok = f.values[lambda.zeta()..].iter().all(Zero::is_zero);
    betas_ok && values_ok && f1_ok && tail_ok
}

/// On the descending arrangement `λ`: if `λ_1 > Σ_{i≥2} λ_i`, then
/// `f_α(λ) = (λ_1 − Σ_{i≥2} λ_i) f_α(λ^[1]) + f_α(λ')` with
/// `λ' = (Σ_{i≥2} λ_i, λ_2, …, λ_L)`.
pub fn decomposition(lambda: &LambdaVector) -> Result<Option<bool>> {
    let ordered = lambda.ordered();
    let rest = sum(&ordered[1..]);
    if ordered[0] <= rest || rest.is_zero() {
        return Ok(None);
    }
    let excess = &ordered[0] - &rest;
    let mut prime = ordered.clone();
    prime[0] = rest;
    let prime = LambdaVector::new(prime)?;
    let mut unit = vec![Rational::zero(); ordered.len()];
    unit[0] = int(1);
    let unit = LambdaVector::new(unit)?;
    let (f, fu, fp) = (f_vector(lambda), f_vector(&unit), f_vector(&prime));
    Ok(Some(
        (0..ordered.len()).all(|a| f.values[a] == &excess * &fu.values[a] + &fp.values[a]),
    ))
}

/// The two threshold statements for a given `η ∈ 1..L−1`, on the
/// descending arrangement. Returns `(part i, part ii)`; each is `None`
/// when its premise fails.
pub fn threshold(lambda: &LambdaVector, eta: usize) -> Result<(Option<bool>, Option<bool>)> {
    let levels = lambda.len();
    if eta == 0 || eta >= levels {
        return domain(format!("eta must be in 1..{levels}"));
    }
    let ordered = lambda.ordered();
    let sorted = LambdaVector::new(ordered.clone())?;
    let rest = sum(&ordered[1..]);
    let bound = &rest / int(eta as i64);

    let first = if ordered[0] <= bound {
        let mut ok = true;
        for alpha in 1..=eta + 1 {
            ok &= f_alpha(&sorted, alpha)? == g_value(&sorted, alpha, 0)?;
        }
        Some(ok)
    } else {
        None
    };

    let second = if ordered[0] >= bound {
        let tail = ordered[1..].to_vec();
        let tail = if tail.iter().all(Zero::is_zero) {
            None
        } else {
            Some(LambdaVector::new(tail)?)
        };
        let mut ok = true;
        for alpha in eta + 1..=levels {
            let expected = match &tail {
                Some(t) => f_alpha(t, alpha - 1)?,
                None => Rational::zero(),
            };
            ok &= f_alpha(&sorted, alpha)? == expected;
        }
        Some(ok)
    } else {
        None
    };
    Ok((first, second))
}

/// Descending λ against ascending rates gives the smallest `λ·R` over all
/// rearrangements of λ; checked exhaustively.
pub fn rearrangement(lambda: &LambdaVector, rates: &[Rational]) -> Result<bool> {
    if rates.len() != lambda.len() {
        return domain("need one rate per component");
    }
    let mut ascending = rates.to_vec();
    ascending.sort();
    let paired = dot(&lambda.ordered(), &ascending);
    let mut perm: Vec<usize> = (0..lambda.len()).collect();
    loop {
        let arranged: Vec<Rational> = perm.iter().map(|&i| lambda.components()[i].clone()).collect();
        if dot(&arranged, rates) < paired {
            return Ok(false);
        }
        if !next_permutation(&mut perm) {
            return Ok(true);
        }
    }
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

/// `optimal_resolution` passes `verify_resolution` with total `f_α` at
/// every level.
pub fn resolutions_verify(lambda: &LambdaVector) -> Result<bool> {
    let f = f_vector(lambda);
    for alpha in 1..=lambda.len() {
        let res = optimal_resolution(lambda, alpha)?;
        if !verify_resolution(lambda, &res, &f.values[alpha - 1])? {
            return Ok(false);
        }
    }
    Ok(true)
}
