use proptest::prelude::*;
use proptest::sample::Index;

use smdc_core::entropy::{entropy_vector, han_check, JointDistribution};
use smdc_core::lemmas;
use smdc_core::rational::{frac, int, Rational};
use smdc_core::region::{
    check_achievable_inequalities, check_achievable_lp, superposition_program, InequalityRecord, RateQuery,
    Witness,
};
use smdc_core::rng::{random_boundary_query, seeded};
use smdc_core::{assert_feasible_point, f_alpha, f_alpha_bruteforce, Inequality, LambdaVector};

fn entry() -> impl Strategy<Value = Rational> {
    prop_oneof![
        1 => Just(int(0)),
        3 => (1i64..=24, 1i64..=6).prop_map(|(n, d)| frac(n, d)),
    ]
}

fn lambda(levels: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = LambdaVector> {
    levels
        .prop_flat_map(|l| prop::collection::vec(entry(), l))
        .prop_filter_map("zero vector", |v| LambdaVector::new(v).ok())
}

fn normalized(levels: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = LambdaVector> {
    lambda(levels).prop_map(|l| l.normalized().0)
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..=40, 1i64..=9).prop_map(|(n, d)| frac(n, d))
}

fn nonnegative() -> impl Strategy<Value = Rational> {
    (0i64..=40, 1i64..=9).prop_map(|(n, d)| frac(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn permutation_invariance(l in lambda(1..=6).prop_flat_map(|l| {
        let n = l.len();
        (Just(l), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })) {
        let (l, perm) = l;
        prop_assert!(lemmas::permutation_invariance(&l, &perm).unwrap());
    }

    #[test]
    fn homogeneity(l in lambda(1..=6), mu in positive()) {
        prop_assert!(lemmas::homogeneity(&l, &mu).unwrap());
    }

    #[test]
    fn concavity(
        pair in (1usize..=6).prop_flat_map(|n| (
            prop::collection::vec(entry(), n),
            prop::collection::vec(entry(), n),
        )),
        mu1 in nonnegative(),
        mu2 in positive(),
    ) {
        let (Ok(a), Ok(b)) = (LambdaVector::new(pair.0), LambdaVector::new(pair.1)) else {
            return Ok(());
        };
        prop_assert!(lemmas::concavity(&a, &b, &mu1, &mu2).unwrap());
    }

    #[test]
    fn f_vector_shape_and_beta_monotonicity(l in lambda(1..=7)) {
        prop_assert!(lemmas::f_vector_shape(&l));
    }

    #[test]
    fn decomposition_with_heavy_leader(
        tail in (1usize..=5).prop_flat_map(|n| prop::collection::vec(entry(), n)),
        extra in positive(),
        shift in any::<Index>(),
    ) {
        let rest: Rational = tail.iter().sum();
        prop_assume!(rest > int(0));
        let mut comps = tail;
        comps.insert(shift.index(comps.len() + 1), rest + extra);
        let l = LambdaVector::new(comps).unwrap();
        prop_assert_eq!(lemmas::decomposition(&l).unwrap(), Some(true));
    }

    #[test]
    fn threshold_parts(l in lambda(2..=6), eta in any::<Index>(), boundary in any::<bool>()) {
        let eta = 1 + eta.index(l.len() - 1);
        let l = if boundary {
            // Force λ_1 = (1/η)Σ_{i≥2}λ_i so that both parts apply.
            let mut ordered = l.ordered();
            let rest: Rational = ordered[1..].iter().sum();
            ordered[0] = rest / int(eta as i64);
            match LambdaVector::new(ordered) {
                Ok(v) if v.ordered() == v.components() => v,
                _ => return Ok(()),
            }
        } else {
            l
        };
        let (first, second) = lemmas::threshold(&l, eta).unwrap();
        prop_assert!(first.is_some() || second.is_some());
        prop_assert_ne!(first, Some(false));
        prop_assert_ne!(second, Some(false));
    }

    #[test]
    fn rearrangement_is_minimal(
        pair in (1usize..=5).prop_flat_map(|n| (
            prop::collection::vec(entry(), n),
            prop::collection::vec(nonnegative(), n),
        )),
    ) {
        let Ok(l) = LambdaVector::new(pair.0) else { return Ok(()) };
        prop_assert!(lemmas::rearrangement(&l, &pair.1).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_form_matches_lp_oracle(l in normalized(1..=6)) {
        for alpha in 1..=l.len() {
            prop_assert_eq!(f_alpha(&l, alpha).unwrap(), f_alpha_bruteforce(&l, alpha).unwrap());
        }
    }

    #[test]
    fn optimal_resolutions_verify(l in lambda(1..=5)) {
        prop_assert!(lemmas::resolutions_verify(&l).unwrap());
    }

    #[test]
    fn methods_agree_with_valid_witnesses(levels in 1usize..=5, seed in any::<u64>()) {
        let q = random_boundary_query(&mut seeded(seed), levels);
        let a = check_achievable_inequalities(&q).unwrap();
        let b = check_achievable_lp(&q).unwrap();
        prop_assert_eq!(a.achievable, b.achievable);
        match (&a.witness, a.achievable) {
            (Some(Witness::Violated(ineq)), false) => {
                prop_assert!(!ineq.holds(q.rates(), q.entropies()));
            }
            (None, true) => {}
            other => prop_assert!(false, "unexpected inequality witness {:?}", other),
        }
        match (&b.witness, b.achievable) {
            (Some(Witness::Allocation(alloc)), true) => {
                prop_assert!(alloc.satisfies(&q));
                let point: Vec<Rational> = alloc.r.concat();
                let lp = superposition_program(&q).unwrap();
                prop_assert!(assert_feasible_point(&lp, &point).unwrap());
            }
            (None, false) => {}
            other => prop_assert!(false, "unexpected lp witness {:?}", other),
        }
    }

    #[test]
    fn achievability_is_monotone(
        levels in 1usize..=5,
        seed in any::<u64>(),
        bumps in prop::collection::vec(nonnegative(), 5),
    ) {
        let q = random_boundary_query(&mut seeded(seed), levels);
        prop_assume!(check_achievable_inequalities(&q).unwrap().achievable);
        let raised: Vec<Rational> = q.rates().iter().zip(&bumps).map(|(r, b)| r + b).collect();
        let q2 = RateQuery::new(raised, q.entropies().to_vec()).unwrap();
        prop_assert!(check_achievable_inequalities(&q2).unwrap().achievable);
    }

    #[test]
    fn inequality_records_round_trip(l in normalized(1..=6)) {
        let q = Inequality::new(l);
        let json = serde_json::to_string(&InequalityRecord::from(&q)).unwrap();
        let back: InequalityRecord = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.to_inequality().unwrap(), q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_entropy_vectors_are_polymatroids(levels in 1usize..=5, seed in any::<u64>()) {
        let jd = JointDistribution::random(&mut seeded(seed), levels).unwrap();
        let ev = entropy_vector(&jd).unwrap();
        prop_assert!(ev.is_monotone());
        prop_assert!(ev.is_submodular());
        prop_assert!(han_check(&ev));
    }
}
