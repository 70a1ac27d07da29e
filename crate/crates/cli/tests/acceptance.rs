//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! Every comparison is exact unless noted; runtime budgets are wall-clock.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::Rng;

use smdc_core::entropy::{entropy_vector, han_check, subset_entropy_batch, JointDistribution};
use smdc_core::lemmas;
use smdc_core::rational::{frac, int, Rational};
use smdc_core::region::{check_achievable_inequalities, check_achievable_lp, compare_with_generator};
use smdc_core::rng::{random_boundary_query, random_lambda, random_permutation, random_positive, seeded, Prng};
use smdc_core::{
    assert_feasible_point, check_bounds, count_ordered, f_alpha, f_alpha_bruteforce, generate_ordered,
    list_inequalities, redundancy_certificate, LambdaVector,
};

const SEED: u64 = 20_240_601;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    if elapsed <= budget {
        Ok(())
    } else {
        Err(format!("took {} over budget {}", secs(elapsed), secs(budget)))
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["smdc"];
    argv.extend_from_slice(args);
    let code = smdc_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).expect("utf-8 output"))
}

const GOLDEN: [&str; 5] = [
    include_str!("golden/table_L1.tsv"),
    include_str!("golden/table_L2.tsv"),
    include_str!("golden/table_L3.tsv"),
    include_str!("golden/table_L4.tsv"),
    include_str!("golden/table_L5.tsv"),
];

fn golden_tables() -> Check {
    let start = Instant::now();
    for (i, expected) in GOLDEN.iter().enumerate() {
        let levels = (i + 1).to_string();
        let (code, out) = run_cli(&["table", "--levels", &levels]);
        ensure(code == 0, format!("table --levels {levels} exited {code}"))?;
        if out != *expected {
            return Err(format!("table --levels {levels} differs from the golden file"));
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("L=1..5 byte-identical, 39 rows ({}, budget 1s)", secs(elapsed)))
}

fn counting() -> Check {
    let counts: Vec<String> = (1..=5).map(|l| count_ordered(l).to_string()).collect();
    ensure(counts == ["1", "2", "4", "9", "23"], format!("counts {counts:?}"))?;
    let mut not_strict = Vec::new();
    for levels in 1..=10 {
        let b = check_bounds(levels).map_err(|e| e.to_string())?;
        ensure(b.holds(), format!("sandwich fails at L={levels}"))?;
        if levels >= 3 && !b.strict() {
            not_strict.push(format!("L={levels}: {} <= {} <= {}", b.lower, b.count, b.upper));
        }
    }
    let start = Instant::now();
    let mut sizes = Vec::new();
    for levels in 1..=10 {
        let n = generate_ordered(levels).map_err(|e| e.to_string())?.len();
        ensure(
            count_ordered(levels).to_string() == n.to_string(),
            format!("count differs from enumeration at L={levels}"),
        )?;
        sizes.push(n);
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    ensure(
        not_strict.is_empty(),
        format!(
            "strictness required for L=3..10 is unattainable, lower bound tight at {}; \
             counts, sandwich and enumeration (|G0_10| = {}, {}) otherwise hold",
            not_strict.join(", "),
            sizes[9],
            secs(elapsed)
        ),
    )?;
    Ok(format!(
        "S0 = 1,2,4,9,23; strict bounds for L=3..10; |G0_10| = {} ({}, budget 60s)",
        sizes[9],
        secs(elapsed)
    ))
}

fn closed_form_vs_oracle() -> Check {
    let start = Instant::now();
    let mut rng = seeded(SEED);
    let mut compared = 0;
    for levels in 2..=5 {
        for _ in 0..500 {
            let l = random_lambda(&mut rng, levels);
            for alpha in 1..=levels {
                let a = f_alpha(&l, alpha).map_err(|e| e.to_string())?;
                let b = f_alpha_bruteforce(&l, alpha).map_err(|e| e.to_string())?;
                ensure(a == b, format!("f_{alpha}{l}: closed form {a} vs oracle {b}"))?;
                compared += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!("{compared} exact matches over 2000 vectors ({}, budget 300s)", secs(elapsed)))
}

fn membership_agreement() -> Check {
    let mut rng = seeded(SEED + 1);
    let (mut achievable, mut total) = (0, 0);
    for levels in 2..=5 {
        for _ in 0..500 {
            let q = random_boundary_query(&mut rng, levels);
            let a = check_achievable_inequalities(&q).map_err(|e| e.to_string())?;
            let b = check_achievable_lp(&q).map_err(|e| e.to_string())?;
            ensure(
                a.achievable == b.achievable,
                format!("disagreement on R={:?} H={:?}", q.rates(), q.entropies()),
            )?;
            achievable += usize::from(a.achievable);
            total += 1;
        }
    }
    ensure(achievable > 0 && achievable < total, "samples did not straddle the boundary")?;
    Ok(format!("{total} queries agree ({achievable} achievable, {} not)", total - achievable))
}

fn non_redundancy() -> Check {
    let mut sizes = Vec::new();
    for levels in 2..=4 {
        let h = vec![int(1); levels];
        let n = list_inequalities(levels, false).map_err(|e| e.to_string())?.len();
        for i in 0..n {
            let cert = redundancy_certificate(levels, i, &h).map_err(|e| e.to_string())?;
            ensure(cert.essential, format!("L={levels} index {i} is redundant"))?;
            let w = cert.witness_rates.as_ref().ok_or("missing witness")?;
            let feasible = assert_feasible_point(&cert.program, w).map_err(|e| e.to_string())?;
            ensure(feasible && !cert.inequality.holds(w, &h), format!("L={levels} index {i}: bad witness"))?;
        }
        sizes.push(n);
    }
    ensure(sizes[1] == 10, format!("L=3 expansion has {} inequalities", sizes[1]))?;
    Ok(format!("all essential with validated witnesses; sizes L=2,3,4: {sizes:?}"))
}

fn fourier_motzkin() -> Check {
    for levels in 2..=3 {
        let c = compare_with_generator(levels).map_err(|e| e.to_string())?;
        ensure(c.equivalent(), format!("L={levels}: systems differ"))?;
    }
    let start = Instant::now();
    let c = compare_with_generator(4).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(600))?;
    ensure(c.equivalent(), "L=4: systems differ")?;
    Ok(format!(
        "L=2,3 equivalent; L=4 projected to {} rows, equivalent ({}, budget 600s)",
        c.projected.len(),
        secs(elapsed)
    ))
}

fn subset_entropy() -> Check {
    let mut rng = seeded(SEED + 2);
    let mut chain = Vec::new();
    for levels in 2..=4 {
        for _ in 0..200 {
            let jd = JointDistribution::random(&mut rng, levels).map_err(|e| e.to_string())?;
            let ev = entropy_vector(&jd).map_err(|e| e.to_string())?;
            ensure(han_check(&ev), format!("Han fails on {}", jd.digest()))?;
        }
        let report = subset_entropy_batch(levels, 100, SEED + levels as u64).map_err(|e| e.to_string())?;
        ensure(
            report.all_hold(),
            format!("L={levels}: {}/{} chain instances", report.chain_passed, report.chain_instances),
        )?;
        chain.push(report.chain_instances);
    }
    Ok(format!("Han on 3x200 distributions; chain instances per L=2,3,4: {chain:?}, all verified"))
}

fn random_tail_lambda(rng: &mut Prng, levels: usize) -> LambdaVector {
    random_lambda(rng, levels)
        .scaled(&random_positive(rng))
        .expect("positive scale")
}

fn property_suites() -> Check {
    const CASES: usize = 1000;
    let mut rng = seeded(SEED + 3);
    let fail = |name: &str, l: &LambdaVector| format!("{name} fails at {l}");
    for _ in 0..CASES {
        let levels = rng.gen_range(1..=6);
        let l = random_tail_lambda(&mut rng, levels);
        let perm = random_permutation(&mut rng, levels);
        ensure(lemmas::permutation_invariance(&l, &perm).map_err(|e| e.to_string())?, fail("permutation", &l))?;
        let mu = random_positive(&mut rng);
        ensure(lemmas::homogeneity(&l, &mu).map_err(|e| e.to_string())?, fail("homogeneity", &l))?;
        let other = random_tail_lambda(&mut rng, levels);
        let (m1, m2) = (random_positive(&mut rng), random_positive(&mut rng));
        ensure(lemmas::concavity(&l, &other, &m1, &m2).map_err(|e| e.to_string())?, fail("concavity", &l))?;
        ensure(lemmas::f_vector_shape(&l), fail("beta monotonicity", &l))?;
    }
    let mut decomposed = 0;
    for _ in 0..CASES {
        let levels = rng.gen_range(2..=6);
        let tail = random_tail_lambda(&mut rng, levels - 1);
        let rest: Rational = tail.components().iter().sum();
        let mut comps = tail.components().to_vec();
        comps.insert(rng.gen_range(0..levels), rest + random_positive(&mut rng));
        let l = LambdaVector::new(comps).map_err(|e| e.to_string())?;
        ensure(lemmas::decomposition(&l).map_err(|e| e.to_string())? == Some(true), fail("decomposition", &l))?;
        decomposed += 1;
    }
    let mut both_parts = 0;
    for case in 0..CASES {
        let levels = rng.gen_range(2..=6);
        let eta = rng.gen_range(1..levels);
        let mut l = random_tail_lambda(&mut rng, levels);
        if case % 2 == 0 {
            let mut ordered = l.ordered();
            let rest: Rational = ordered[1..].iter().sum();
            ordered[0] = rest / int(eta as i64);
            if let Ok(v) = LambdaVector::new(ordered) {
                if v.is_ordered() {
                    l = v;
                }
            }
        }
        let (a, b) = lemmas::threshold(&l, eta).map_err(|e| e.to_string())?;
        ensure(a != Some(false) && b != Some(false), fail("threshold", &l))?;
        both_parts += usize::from(a.is_some() && b.is_some());
    }
    for _ in 0..CASES {
        let levels = rng.gen_range(1..=5);
        let l = random_tail_lambda(&mut rng, levels);
        let rates: Vec<Rational> = (0..levels)
            .map(|_| frac(rng.gen_range(0..=40), rng.gen_range(1..=9)))
            .collect();
        ensure(lemmas::rearrangement(&l, &rates).map_err(|e| e.to_string())?, fail("rearrangement", &l))?;
    }
    Ok(format!(
        "7 suites x {CASES} cases, zero failures ({decomposed} decompositions, {both_parts} two-sided thresholds)"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden tables", golden_tables),
        ("counting and bounds", counting),
        ("closed form vs LP oracle", closed_form_vs_oracle),
        ("membership methods agree", membership_agreement),
        ("non-redundancy certificates", non_redundancy),
        ("Fourier-Motzkin cross-check", fourier_motzkin),
        ("Han and subset entropy chain", subset_entropy),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = secs(start.elapsed());
        match result {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{elapsed}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail} [{elapsed}]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
