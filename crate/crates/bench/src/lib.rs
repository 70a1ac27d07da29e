//! Fixed workloads for the criterion benches.

use smdc_core::rng::{random_boundary_query, random_lambda, seeded};
use smdc_core::{LambdaVector, RateQuery};

pub const SEED: u64 = 0x5eed;

/// `n` boundary-straddling queries at `L` levels.
pub fn queries(levels: usize, n: usize) -> Vec<RateQuery> {
    let mut rng = seeded(SEED);
    (0..n).map(|_| random_boundary_query(&mut rng, levels)).collect()
}

/// `n` random normalized coefficient vectors at `L` levels.
pub fn lambdas(levels: usize, n: usize) -> Vec<LambdaVector> {
    let mut rng = seeded(SEED);
    (0..n).map(|_| random_lambda(&mut rng, levels)).collect()
}
