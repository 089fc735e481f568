//! Command-line front end for `ntau-core`.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (statistical verdicts are data unless `--strict-verdicts`) |
//! | 1 | I/O failure, or `verify` found a failing check |
//! | 2 | malformed input: CSV syntax, sequence expression, bad flag values |
//! | 3 | ties in strict mode (or a constant column) |
//! | 4 | fewer than 2 observations |
//! | 5 | parameter outside the family domain |
//! | 6 | failed verdict under `--strict-verdicts` |
//! | 7 | work budget exceeded without override |

pub mod args;
pub mod ingest;
pub mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ntau_core::harness::{replicate_sample, run_experiment, verify_suite, ExperimentConfig, VerifyOptions};
use ntau_core::theory::{increment_diagnostics, parameters};
use ntau_core::{
    coefficient_set, tau_n_with, CoefficientSelection, Family, FamilyError, HarnessError, McBudget, McFallback,
    RankError, SeqError, SeqSpec, TheoryError, TheoryOptions, TiePolicy,
};
use serde::Serialize;
use thiserror::Error;

use args::{selection, Cli, Command, EstimateArgs, SimulateArgs, TheoryArgs, VerifyArgs};
use ingest::IngestError;
use report::{Report, RunManifest, Timestamps};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error("sequence: {0}")]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{path}: {source}")]
    Output { path: PathBuf, source: io::Error },
}

fn seq_code(e: &SeqError) -> u8 {
    match e {
        SeqError::DivisionByZero { .. } | SeqError::NonFinite { .. } => 5,
        _ => 2,
    }
}

fn theory_code(e: &TheoryError) -> u8 {
    match e {
        TheoryError::TooSmall { .. } => 4,
        TheoryError::Sequence(s) => seq_code(s),
        TheoryError::OutOfDomain { .. } => 5,
        TheoryError::Family(FamilyError::TooFewReps { .. }) => 2,
        TheoryError::Family(_) => 5,
        TheoryError::BudgetExceeded { .. } => 7,
        TheoryError::TooFewPairs { .. } | TheoryError::BadIncrementGrid => 2,
    }
}

fn rank_code(e: &RankError) -> u8 {
    match e {
        RankError::TooFewObservations { .. } => 4,
        RankError::NonFinite { .. } => 2,
        RankError::Ties { .. } | RankError::ZeroVariance { .. } => 3,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Ingest(IngestError::Io { .. }) => 1,
            CliError::Ingest(IngestError::TooFewRows { .. }) => 4,
            CliError::Ingest(_) => 2,
            CliError::Rank(e) => rank_code(e),
            CliError::Seq(e) => seq_code(e),
            CliError::Theory(e) => theory_code(e),
            CliError::Harness(e) => match e {
                HarnessError::Theory(t) => theory_code(t),
                HarnessError::Rank(r) => rank_code(r),
                HarnessError::Family(_) => 5,
                HarnessError::BudgetExceeded { .. } => 7,
                HarnessError::TooFewReplications { .. } => 2,
                HarnessError::TooSmall { .. } => 4,
            },
            CliError::Output { .. } => 1,
        }
    }
}

/// What a command wants printed, and its exit status.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub exit_code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, exit_code: 0 }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let started = report::unix_ms();
    let stamp = |m: &mut RunManifest| {
        if cli.timestamps {
            m.timestamps = Some(Timestamps {
                started_unix_ms: started,
                finished_unix_ms: report::unix_ms(),
            });
        }
    };
    match &cli.command {
        Command::Estimate(a) => estimate(a, stamp),
        Command::Theory(a) => theory(a, stamp),
        Command::Simulate(a) => simulate(a, stamp),
        Command::Verify(a) => verify(a, stamp),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Output {
        path: path.to_owned(),
        source,
    })
}

#[derive(Debug, Serialize)]
struct EstimateConfig<'a> {
    csv: &'a Path,
    ties: TiePolicy,
    coefficients: CoefficientSelection,
}

fn estimate(a: &EstimateArgs, stamp: impl Fn(&mut RunManifest)) -> Result<Outcome, CliError> {
    let config = EstimateConfig {
        csv: &a.csv,
        ties: a.ties.into(),
        coefficients: selection(&a.coefficients),
    };
    let sample = ingest::read_sample(&a.csv)?;
    let results = coefficient_set(&sample, config.ties, config.coefficients)?;
    let mut manifest = RunManifest::new("estimate", None);
    stamp(&mut manifest);
    Ok(Outcome::ok(
        Report {
            manifest: &manifest,
            config: &config,
            results: &results,
        }
        .to_json(),
    ))
}

#[derive(Debug, Serialize)]
struct TheoryConfig<'a> {
    family: Family,
    seq: &'a SeqSpec,
    n: usize,
    options: TheoryOptions,
    #[serde(skip_serializing_if = "<[usize]>::is_empty")]
    increments: &'a [usize],
}

fn theory(a: &TheoryArgs, stamp: impl Fn(&mut RunManifest)) -> Result<Outcome, CliError> {
    let seq = SeqSpec::parse(&a.seq)?;
    let family: Family = a.family.into();
    let options = TheoryOptions {
        pair_budget: a.pair_budget,
        mc_fallback: a.mc_fallback.then_some(McFallback {
            budget: McBudget {
                pairs: a.mc_pairs,
                reps_per_pair: a.mc_reps,
            },
            seed: a.seed,
        }),
    };
    let mut results = tau_n_with(family, &seq, a.n, &options)?;
    if !a.increments.is_empty() {
        results.increments = Some(increment_diagnostics(family, &seq, &a.increments)?);
    }
    let config = TheoryConfig {
        family,
        seq: &seq,
        n: a.n,
        options,
        increments: &a.increments,
    };
    let mut manifest = RunManifest::new("theory", a.mc_fallback.then_some(a.seed));
    stamp(&mut manifest);
    Ok(Outcome::ok(
        Report {
            manifest: &manifest,
            config: &config,
            results: &results,
        }
        .to_json(),
    ))
}

fn replicates_csv(report: &ntau_core::ReplicationReport) -> String {
    let mut out = String::from("replication,kendall,spearman,blended_r,pearson\n");
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.16e}"));
    for e in &report.estimates {
        out.push_str(&format!(
            "{},{:.16e},{},{},{}\n",
            e.replication,
            e.kendall,
            opt(e.spearman),
            opt(e.blended_r),
            opt(e.pearson)
        ));
    }
    out
}

fn simulate(a: &SimulateArgs, stamp: impl Fn(&mut RunManifest)) -> Result<Outcome, CliError> {
    let seq = SeqSpec::parse(&a.seq)?;
    let mut config = ExperimentConfig::new(a.family.into(), seq, a.n, a.replications, a.seed);
    config.ties = a.ties.into();
    config.coefficients = selection(&a.coefficients);
    config.theory.pair_budget = Some(a.pair_budget);
    if a.allow_large {
        config.point_budget = None;
    }
    let results = run_experiment(&config)?;

    let mut manifest = RunManifest::new("simulate", Some(a.seed));
    manifest.outputs.report = a.out.clone();
    if let Some(path) = &a.replicates_csv {
        write_file(path, &replicates_csv(&results))?;
        manifest.outputs.replicates_csv = Some(path.clone());
    }
    if let Some(path) = &a.dump_sample {
        let ts = parameters(config.family, &config.seq, config.n)?;
        let sample = replicate_sample(config.family, &ts, config.seed, 0);
        ingest::write_sample(path, sample.points()).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        })?;
        manifest.outputs.sample_csv = Some(path.clone());
    }
    stamp(&mut manifest);
    let json = Report {
        manifest: &manifest,
        config: &config,
        results: &results,
    }
    .to_json();
    let exit_code = if a.strict_verdicts && !results.verdicts.all_passed() {
        6
    } else {
        0
    };
    let stdout = match &a.out {
        Some(path) => {
            write_file(path, &json)?;
            String::new()
        }
        None => json,
    };
    Ok(Outcome { stdout, exit_code })
}

fn verify_table(report: &ntau_core::VerifyReport) -> String {
    let width = report.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = format!(
        "{:<6} {:<width$} {:>12} {:>12}\n",
        "status", "check", "metric", "threshold"
    );
    for c in &report.checks {
        out.push_str(&format!(
            "{:<6} {:<width$} {:>12.4e} {:>12.4e}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.metric,
            c.threshold
        ));
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", report.checks.len(), failed));
    out
}

fn verify(a: &VerifyArgs, stamp: impl Fn(&mut RunManifest)) -> Result<Outcome, CliError> {
    let mut options = if a.quick {
        VerifyOptions::quick()
    } else {
        VerifyOptions::default()
    };
    options.fixture = a.fixture.map(Into::into);
    let results = verify_suite(a.seed, &options)?;
    let mut manifest = RunManifest::new("verify", Some(a.seed));
    stamp(&mut manifest);
    let stdout = if a.json {
        Report {
            manifest: &manifest,
            config: &options,
            results: &results,
        }
        .to_json()
    } else {
        verify_table(&results)
    };
    Ok(Outcome {
        stdout,
        exit_code: if results.all_passed { 0 } else { 1 },
    })
}

/// Runs `cli`, printing the report to stdout and diagnostics to stderr.
pub fn main_with(cli: &Cli) -> u8 {
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("ntau: warning: {e}");
        }
    }
    match run(cli) {
        Ok(outcome) => {
            let mut out = io::stdout().lock();
            if out
                .write_all(outcome.stdout.as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return 1;
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("ntau: error: {e}");
            e.exit_code()
        }
    }
}
