//! The `smdc` command line.
//!
//! Data goes to the output stream and diagnostics to the error stream.
//! Exit codes: 0 on success, 1 when a checked property fails, 2 on a usage
//! or input error.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use smdc_core::entropy::subset_entropy_batch;
use smdc_core::generator::check_bounds;
use smdc_core::rational::{format, format_list, format_tuple, parse_list};
use smdc_core::region::{
    check_achievable_inequalities, check_achievable_lp, compare_with_generator, list_inequalities,
    ordered_inequalities, redundancy_certificate, InequalityRecord, RateQuery, VerdictRecord, Witness,
    MAX_REDUNDANCY_LEVELS,
};
use smdc_core::resolution::{beta_star, f_alpha, mask_to_string, optimal_resolution, verify_resolution};
use smdc_core::rng::{random_boundary_query, seeded};
use smdc_core::{assert_feasible_point, Error, LambdaVector, Rational};

#[derive(Debug, Parser)]
#[command(name = "smdc", version, about = "Exact rate-region toolkit for symmetric multilevel diversity coding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Ineq,
    Lp,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the region's inequalities.
    Gen {
        #[arg(long)]
        levels: usize,
        /// Include every rearrangement, not only the ordered vectors.
        #[arg(long)]
        all_perms: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Count the ordered vectors and print the bounds around the count.
    Count {
        #[arg(long)]
        levels: usize,
    },
    /// Print the ordered inequalities as a tab-separated table.
    Table {
        #[arg(long)]
        levels: usize,
    },
    /// Decide whether a rate tuple is achievable.
    Check {
        #[arg(long)]
        levels: usize,
        #[arg(long, allow_hyphen_values = true)]
        rates: String,
        #[arg(long, allow_hyphen_values = true)]
        entropies: String,
        #[arg(long, value_enum, default_value = "ineq")]
        method: MethodArg,
    },
    /// Build and verify an optimal resolution.
    Resolution {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        alpha: usize,
    },
    /// Compare both membership tests on random boundary queries.
    VerifyEquivalence {
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certify that inequalities are not implied by the others.
    Redundancy {
        #[arg(long)]
        levels: usize,
        /// Index into the full expansion; all indices when omitted.
        #[arg(long)]
        index: Option<usize>,
        /// Entropy profile; all ones when omitted.
        #[arg(long, allow_hyphen_values = true)]
        entropies: Option<String>,
    },
    /// Project the superposition system and compare with the inequality list.
    FmCompare {
        #[arg(long)]
        levels: usize,
    },
    /// Check the subset entropy inequality on random distributions.
    SubsetEntropy {
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Property(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Property(_) => Failure::Property(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let to_out = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            let _ = if to_out { write!(out, "{text}") } else { write!(err, "{text}") };
            return if to_out { 0 } else { 2 };
        }
    };
    let result = dispatch(cli.command, out);
    let _ = out.flush();
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Property(msg)) => {
            let _ = writeln!(err, "property violation: {msg}");
            1
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Gen {
            levels,
            all_perms,
            format,
        } => gen(levels, all_perms, format, out),
        Command::Count { levels } => count(levels, out),
        Command::Table { levels } => table(levels, out),
        Command::Check {
            levels,
            rates,
            entropies,
            method,
        } => check(levels, &rates, &entropies, method, out),
        Command::Resolution { lambda, alpha } => resolution(&lambda, alpha, out),
        Command::VerifyEquivalence { levels, trials, seed } => verify_equivalence(levels, trials, seed, out),
        Command::Redundancy {
            levels,
            index,
            entropies,
        } => redundancy(levels, index, entropies.as_deref(), out),
        Command::FmCompare { levels } => fm_compare(levels, out),
        Command::SubsetEntropy { levels, trials, seed } => subset_entropy(levels, trials, seed, out),
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Outcome {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn gen(levels: usize, all_perms: bool, format: Format, out: &mut dyn Write) -> Outcome {
    let ineqs = list_inequalities(levels, !all_perms)?;
    match format {
        Format::Json => {
            for q in &ineqs {
                emit_json(out, &InequalityRecord::from(q))?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["lambda".to_string()];
            header.extend((1..=levels).map(|a| format!("f{a}")));
            header.push("theta".into());
            w.write_record(&header)?;
            for q in &ineqs {
                let mut row = vec![format_tuple(q.lambda.components())];
                row.extend(format_list(&q.f.values));
                row.push(q.theta.to_string());
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn count(levels: usize, out: &mut dyn Write) -> Outcome {
    let b = check_bounds(levels)?;
    writeln!(out, "{{\"S0\":{},\"lower\":{},\"upper\":{}}}", b.count, b.lower, b.upper)?;
    Ok(())
}

fn table(levels: usize, out: &mut dyn Write) -> Outcome {
    let mut header = vec!["suffix".to_string(), "lambda".to_string()];
    header.extend((1..=levels).map(|a| format!("f{a}")));
    header.push("theta".into());
    writeln!(out, "{}", header.join("\t"))?;
    for q in ordered_inequalities(levels)? {
        let comps = q.lambda.components();
        let suffix = if q.lambda.zeta() <= 1 {
            "-".to_string()
        } else {
            format_tuple(&comps[1..])
        };
        let mut row = vec![suffix, format_tuple(comps)];
        row.extend(format_list(&q.f.values));
        row.push(q.theta.to_string());
        writeln!(out, "{}", row.join("\t"))?;
    }
    Ok(())
}

fn parse_vector(flag: &str, text: &str, levels: usize) -> std::result::Result<Vec<Rational>, Failure> {
    let values = parse_list(text).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))?;
    if values.len() != levels {
        return Err(Failure::Usage(format!(
            "--{flag} has {} entries but --levels is {levels}",
            values.len()
        )));
    }
    Ok(values)
}

fn check(levels: usize, rates: &str, entropies: &str, method: MethodArg, out: &mut dyn Write) -> Outcome {
    let rates = parse_vector("rates", rates, levels)?;
    let entropies = parse_vector("entropies", entropies, levels)?;
    let q = RateQuery::new(rates, entropies)?;
    let mut verdicts = Vec::new();
    if method != MethodArg::Lp {
        verdicts.push(check_achievable_inequalities(&q)?);
    }
    if method != MethodArg::Ineq {
        verdicts.push(check_achievable_lp(&q)?);
    }
    for v in &verdicts {
        emit_json(out, &VerdictRecord::from(v))?;
    }
    if verdicts.windows(2).any(|w| w[0].achievable != w[1].achievable) {
        return Err(Failure::Property("membership methods disagree".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct ResolutionReport {
    lambda: Vec<String>,
    alpha: usize,
    f: String,
    beta_star: usize,
    weights: std::collections::BTreeMap<String, String>,
    verified: bool,
}

fn resolution(lambda: &str, alpha: usize, out: &mut dyn Write) -> Outcome {
    let comps = parse_list(lambda).map_err(|e| Failure::Usage(format!("--lambda: {e}")))?;
    let lambda = LambdaVector::new(comps)?;
    let f = f_alpha(&lambda, alpha)?;
    let res = optimal_resolution(&lambda, alpha)?;
    let verified = verify_resolution(&lambda, &res, &f)?;
    let report = ResolutionReport {
        lambda: format_list(lambda.components()),
        alpha,
        f: format(&f),
        beta_star: beta_star(&lambda, alpha)?,
        weights: res
            .weights()
            .iter()
            .map(|(m, w)| (mask_to_string(*m, lambda.len()), format(w)))
            .collect(),
        verified,
    };
    emit_json(out, &report)?;
    if !verified {
        return Err(Failure::Property("resolution failed verification".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct EquivalenceReport {
    levels: usize,
    trials: usize,
    seed: u64,
    achievable: usize,
    agree: usize,
    invalid_witnesses: usize,
    disagreements: Vec<Disagreement>,
}

#[derive(Serialize)]
struct Disagreement {
    trial: usize,
    rates: Vec<String>,
    entropies: Vec<String>,
    inequalities: bool,
    lp: bool,
}

fn witness_valid(q: &RateQuery, w: &Option<Witness>) -> bool {
    match w {
        Some(Witness::Violated(ineq)) => !ineq.holds(q.rates(), q.entropies()),
        Some(Witness::Allocation(a)) => a.satisfies(q),
        None => true,
    }
}

fn verify_equivalence(levels: usize, trials: usize, seed: u64, out: &mut dyn Write) -> Outcome {
    if levels == 0 {
        return Err(Failure::Usage("--levels must be positive".into()));
    }
    let mut rng = seeded(seed);
    let mut report = EquivalenceReport {
        levels,
        trials,
        seed,
        achievable: 0,
        agree: 0,
        invalid_witnesses: 0,
        disagreements: Vec::new(),
    };
    for trial in 0..trials {
        let q = random_boundary_query(&mut rng, levels);
        let a = check_achievable_inequalities(&q)?;
        let b = check_achievable_lp(&q)?;
        if !witness_valid(&q, &a.witness) || !witness_valid(&q, &b.witness) {
            report.invalid_witnesses += 1;
        }
        if a.achievable == b.achievable {
            report.agree += 1;
            report.achievable += usize::from(a.achievable);
        } else {
            report.disagreements.push(Disagreement {
                trial,
                rates: format_list(q.rates()),
                entropies: format_list(q.entropies()),
                inequalities: a.achievable,
                lp: b.achievable,
            });
        }
    }
    emit_json(out, &report)?;
    if report.agree != trials || report.invalid_witnesses > 0 {
        return Err(Failure::Property(format!(
            "{} disagreements, {} invalid witnesses",
            trials - report.agree,
            report.invalid_witnesses
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct CertificateReport {
    index: usize,
    lambda: Vec<String>,
    f: Vec<String>,
    rhs: String,
    optimum: String,
    essential: bool,
    witness: Option<Vec<String>>,
    witness_valid: bool,
}

fn redundancy(levels: usize, index: Option<usize>, entropies: Option<&str>, out: &mut dyn Write) -> Outcome {
    if levels == 0 || levels > MAX_REDUNDANCY_LEVELS {
        return Err(Failure::Usage(format!(
            "--levels must be in 1..={MAX_REDUNDANCY_LEVELS}"
        )));
    }
    let h = match entropies {
        Some(text) => parse_vector("entropies", text, levels)?,
        None => vec![smdc_core::rational::one(); levels],
    };
    let total = list_inequalities(levels, false)?.len();
    let indices: Vec<usize> = match index {
        Some(i) => vec![i],
        None => (0..total).collect(),
    };
    let mut failures = 0;
    for i in indices {
        let cert = redundancy_certificate(levels, i, &h)?;
        let witness_valid = match &cert.witness_rates {
            Some(r) => assert_feasible_point(&cert.program, r)? && !cert.inequality.holds(r, &h),
            None => false,
        };
        if !cert.essential || !witness_valid {
            failures += 1;
        }
        emit_json(
            out,
            &CertificateReport {
                index: i,
                lambda: format_list(cert.inequality.lambda.components()),
                f: format_list(&cert.inequality.f.values),
                rhs: format(&cert.rhs),
                optimum: format(&cert.optimum),
                essential: cert.essential,
                witness: cert.witness_rates.as_deref().map(format_list),
                witness_valid,
            },
        )?;
    }
    if failures > 0 {
        return Err(Failure::Property(format!("{failures} inequalities without a valid certificate")));
    }
    Ok(())
}

#[derive(Serialize)]
struct FmReport {
    levels: usize,
    projected: usize,
    generator: usize,
    projected_implied: bool,
    generator_implied: bool,
    same_rows: bool,
    equivalent: bool,
}

fn fm_compare(levels: usize, out: &mut dyn Write) -> Outcome {
    let c = compare_with_generator(levels)?;
    emit_json(
        out,
        &FmReport {
            levels,
            projected: c.projected.len(),
            generator: c.generator.len(),
            projected_implied: c.projected_implied,
            generator_implied: c.generator_implied,
            same_rows: c.same_rows,
            equivalent: c.equivalent(),
        },
    )?;
    if !c.equivalent() {
        return Err(Failure::Property("projected system differs from the inequality list".into()));
    }
    Ok(())
}

fn subset_entropy(levels: usize, trials: usize, seed: u64, out: &mut dyn Write) -> Outcome {
    let report = subset_entropy_batch(levels, trials, seed)?;
    emit_json(out, &report)?;
    if !report.all_hold() {
        return Err(Failure::Property(format!(
            "Han held on {}/{} distributions, chain on {}/{} instances",
            report.han_passed, report.trials, report.chain_passed, report.chain_instances
        )));
    }
    Ok(())
}
