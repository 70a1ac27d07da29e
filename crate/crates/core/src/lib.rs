//! Exact rate-region computations for symmetric multilevel diversity coding.
//!
//! The crate is organized bottom-up:
//!
//! * [`rational`] and [`lp`]: exact scalars and a rational simplex solver.
//! * [`resolution`]: the coefficient vectors λ, the closed form for
//!   `f_α(λ)`, and optimal α-resolutions.
//! * [`generator`]: enumeration and counting of the minimal coefficient set.
//! * [`region`]: the inequality description of the region, two membership
//!   tests, non-redundancy certificates and a Fourier–Motzkin cross-check.
//! * [`entropy`]: subset entropy inequality checks on concrete distributions.
//! * [`rng`]: seeded sampling shared by the randomized checks.

pub mod entropy;
pub mod error;
pub mod generator;
pub mod lemmas;
pub mod lp;
pub mod rational;
pub mod region;
pub mod resolution;
pub mod rng;

pub use error::{Error, Result};
pub use generator::{
    check_bounds, count_ordered, expand_permutations, generate_ordered, CountBounds, OrderedGenerator,
};
pub use lp::{assert_feasible_point, solve, LinearProgram, LpResult, LpStatus, Relation, Sense};
pub use rational::Rational;
pub use region::{
    check_achievable_inequalities, check_achievable_lp, list_inequalities, redundancy_certificate,
    Inequality, MembershipVerdict, Method, RateQuery, RedundancyCertificate, SuperpositionAllocation,
    Witness,
};
pub use resolution::{
    beta_star, f_alpha, f_alpha_bruteforce, f_vector, optimal_resolution, verify_resolution, FVector,
    LambdaVector, Resolution,
};
