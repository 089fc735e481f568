//! Seeded Monte Carlo experiments.
//!
//! Replication `r` of an experiment with master seed `s` draws its whole sample
//! from [`stream_rng`]`(s, r)`: point `i` is drawn with parameter `t_i`, in order
//! `i = 1..n`. Replications run in parallel and are aggregated in replication
//! order, so reports are bit-identical for any thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::families::{fgm_conditional_cdf, fgm_conditional_quantile, BivariatePoint, Family, FamilyError};
use crate::rankcoef::{
    coefficient_set, kendall_fast, kendall_naive, CoefficientSelection, CoefficientSet, Provenance, RankError, Sample,
    TiePolicy,
};
use crate::rng::stream_rng;
use crate::seqspec::SeqSpec;
use crate::stats::{ks_critical, ks_statistic, summarize, Summary};
use crate::theory::{
    self, iid_tau, increment_diagnostics, pareto_identity_tau, pareto_tau_double_sum, tau_n, tau_n_mc, tau_n_with,
    variance_bound, McBudget, McFallback, TheoryError, TheoryOptions, TheoryResult,
};

/// Largest `R * n` accepted without an explicit override.
pub const DEFAULT_POINT_BUDGET: u64 = 1_000_000_000;
/// Largest number of exact pair terms before `tau_n` falls back to Monte Carlo.
/// Covers the full quadratic sum at `n = 100_000`.
pub const DEFAULT_PAIR_BUDGET: u64 = 5_000_000_000;
/// Bias verdict threshold on `|mean - tau_n| / SE`.
pub const BIAS_Z_THRESHOLD: f64 = 4.0;
/// Mixed into the master seed for the Monte Carlo `tau_n` fallback, keeping its
/// stream apart from the replication streams.
pub const THEORY_SEED_SALT: u64 = 0x7468_656f_7279_0000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("R * n = {points} sampled points exceeds the budget of {budget}")]
    BudgetExceeded { points: u64, budget: u64 },
    #[error("need at least {min} replications, got {got}")]
    TooFewReplications { min: u64, got: u64 },
    #[error("sample size must be >= 2, got {n}")]
    TooSmall { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub family: Family,
    pub seq: SeqSpec,
    pub n: usize,
    pub replications: u64,
    pub seed: u64,
    pub coefficients: CoefficientSelection,
    pub ties: TiePolicy,
    /// Largest `R * n`; `None` disables the guard.
    pub point_budget: Option<u64>,
    pub theory: TheoryOptions,
}

impl ExperimentConfig {
    /// Config with the default budgets, Kendall only, strict ties, and Monte Carlo
    /// fallback for `tau_n` beyond [`DEFAULT_PAIR_BUDGET`].
    pub fn new(family: Family, seq: SeqSpec, n: usize, replications: u64, seed: u64) -> Self {
        ExperimentConfig {
            family,
            seq,
            n,
            replications,
            seed,
            coefficients: CoefficientSelection::KENDALL,
            ties: TiePolicy::Strict,
            point_budget: Some(DEFAULT_POINT_BUDGET),
            theory: TheoryOptions {
                pair_budget: Some(DEFAULT_PAIR_BUDGET),
                mc_fallback: Some(McFallback {
                    budget: McBudget::default(),
                    seed: seed ^ THEORY_SEED_SALT,
                }),
            },
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n < 2 {
            return Err(HarnessError::TooSmall { n: self.n });
        }
        if self.replications < 1 {
            return Err(HarnessError::TooFewReplications { min: 1, got: 0 });
        }
        let points = self.replications.saturating_mul(self.n as u64);
        if let Some(budget) = self.point_budget {
            if points > budget {
                return Err(HarnessError::BudgetExceeded { points, budget });
            }
        }
        Ok(())
    }
}

/// Draws one non-identical sample: point `i` from `family(ts[i])`.
pub fn draw_sample<R: Rng + ?Sized>(family: Family, ts: &[f64], rng: &mut R) -> Vec<BivariatePoint> {
    ts.iter().map(|&t| family.sample_unchecked(t, rng)).collect()
}

/// Sample of replication `replication` for a config whose parameters are `ts`.
pub fn replicate_sample(family: Family, ts: &[f64], seed: u64, replication: u64) -> Sample {
    let mut rng = stream_rng(seed, replication);
    let points = draw_sample(family, ts, &mut rng);
    Sample::new(
        points,
        Provenance::Simulated {
            family,
            seed,
            replication,
        },
    )
    .expect("samplers return finite points")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleRun {
    pub coefficients: CoefficientSet,
    pub theory: TheoryResult,
}

/// One draw (replication 0) of each requested coefficient, with `tau_n`.
pub fn run_single(config: &ExperimentConfig) -> Result<SingleRun, HarnessError> {
    config.validate()?;
    let ts = theory::parameters(config.family, &config.seq, config.n)?;
    let sample = replicate_sample(config.family, &ts, config.seed, 0);
    let coefficients = coefficient_set(&sample, config.ties, config.coefficients)?;
    let theory = tau_n_with(config.family, &config.seq, config.n, &config.theory)?;
    Ok(SingleRun { coefficients, theory })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicateEstimate {
    pub replication: u64,
    pub kendall: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spearman: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blended_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pearson: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdicts {
    /// `|bias_z| <= 4`; absent with fewer than two replications.
    pub bias_ok: Option<bool>,
    /// Empirical variance of the Kendall estimates within the bound.
    pub bound_ok: Option<bool>,
}

impl Verdicts {
    pub fn all_passed(&self) -> bool {
        self.bias_ok != Some(false) && self.bound_ok != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationReport {
    pub family: Family,
    pub n: usize,
    pub replications: u64,
    pub tau_n_theory: f64,
    pub theory: TheoryResult,
    pub analytic_limit: Option<f64>,
    /// Statistics of the Kendall estimates; absent when `R < 2`.
    pub kendall: Option<Summary>,
    pub variance_bound_value: f64,
    /// `(mean - tau_n) / SE`, with the Monte Carlo error of `tau_n` folded into SE.
    pub bias_z: Option<f64>,
    pub verdicts: Verdicts,
    pub estimates: Vec<ReplicateEstimate>,
}

impl ReplicationReport {
    /// Fraction of replications with `|kendall - target| > eps`.
    pub fn exceedance_fraction(&self, target: f64, eps: f64) -> f64 {
        let over = self
            .estimates
            .iter()
            .filter(|e| (e.kendall - target).abs() > eps)
            .count();
        over as f64 / self.estimates.len() as f64
    }
}

/// Runs all replications of `config` (any `R >= 1`).
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReplicationReport, HarnessError> {
    config.validate()?;
    let ts = theory::parameters(config.family, &config.seq, config.n)?;
    let theory = tau_n_with(config.family, &config.seq, config.n, &config.theory)?;
    let which = CoefficientSelection {
        kendall: true,
        ..config.coefficients
    };
    let estimates: Vec<ReplicateEstimate> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let sample = replicate_sample(config.family, &ts, config.seed, r);
            let c = coefficient_set(&sample, config.ties, which)?;
            Ok(ReplicateEstimate {
                replication: r,
                kendall: c.kendall.expect("kendall requested"),
                spearman: c.spearman,
                blended_r: c.blended_r,
                pearson: c.pearson,
            })
        })
        .collect::<Result<_, RankError>>()?;

    let kendalls: Vec<f64> = estimates.iter().map(|e| e.kendall).collect();
    let kendall = summarize(&kendalls);
    let bound = variance_bound(config.n)?;
    let bias_z = kendall.map(|s| {
        let theory_se = theory.std_error.unwrap_or(0.0);
        let se = (s.std_error * s.std_error + theory_se * theory_se).sqrt();
        let diff = s.mean - theory.tau_n;
        if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    });
    let verdicts = Verdicts {
        bias_ok: bias_z.map(|z| z.abs() <= BIAS_Z_THRESHOLD),
        bound_ok: kendall.map(|s| s.variance <= bound),
    };
    Ok(ReplicationReport {
        family: config.family,
        n: config.n,
        replications: config.replications,
        tau_n_theory: theory.tau_n,
        analytic_limit: theory.analytic_limit,
        theory,
        kendall,
        variance_bound_value: bound,
        bias_z,
        verdicts,
        estimates,
    })
}

/// [`run_experiment`] for `R >= 2`.
pub fn run_replicated(config: &ExperimentConfig) -> Result<ReplicationReport, HarnessError> {
    if config.replications < 2 {
        return Err(HarnessError::TooFewReplications {
            min: 2,
            got: config.replications,
        });
    }
    run_experiment(config)
}

// ---------------------------------------------------------------------------
// Verification battery
// ---------------------------------------------------------------------------

/// Deliberate defects used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fixture {
    /// Replaces the FGM pair expectation with `1/4 + (t_i + t_j) / 18`.
    CorruptFgm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub pair_reps: u64,
    pub ks_samples: usize,
    pub ks_alpha: f64,
    pub kendall_cases: usize,
    pub kendall_max_n: usize,
    pub increment_points: [usize; 3],
    pub fixture: Option<Fixture>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            pair_reps: 1_000_000,
            ks_samples: 100_000,
            ks_alpha: 0.001,
            kendall_cases: 1_000,
            kendall_max_n: 1_000,
            increment_points: [100, 1_000, 10_000],
            fixture: None,
        }
    }
}

impl VerifyOptions {
    /// Reduced effort for quick runs; same checks and thresholds.
    pub fn quick() -> Self {
        VerifyOptions {
            pair_reps: 20_000,
            ks_samples: 10_000,
            kendall_cases: 100,
            kendall_max_n: 200,
            increment_points: [50, 200, 800],
            ..VerifyOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub metric: f64,
    /// Pass threshold for `metric` (pass iff `metric <= threshold`, unless noted).
    pub threshold: f64,
    /// Number of parameter settings or samples the check covered.
    pub cases: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub options: VerifyOptions,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

fn check(name: impl Into<String>, metric: f64, threshold: f64, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: metric <= threshold,
        metric,
        threshold,
        cases: 1,
        detail: detail.into(),
    }
}

impl CheckResult {
    fn with_cases(self, cases: usize) -> Self {
        CheckResult { cases, ..self }
    }
}

fn pair_grid(family: Family) -> Vec<(f64, f64)> {
    let ts: &[f64] = match family {
        Family::BivariateNormal => &[-0.9, -0.5, 0.0, 0.4, 0.8],
        Family::FgmCopula => &[-1.0, -0.5, 0.0, 0.5, 1.0],
        Family::BivariatePareto => &[0.3, 0.7, 1.0, 2.0, 5.0],
    };
    ts.iter().flat_map(|&a| ts.iter().map(move |&b| (a, b))).collect()
}

fn stream_id(check: u64, sub: u64) -> u64 {
    (check << 32) | sub
}

fn check_pair_grid(
    seed: u64,
    family: Family,
    opts: &VerifyOptions,
    family_idx: u64,
) -> Result<CheckResult, HarnessError> {
    let grid = pair_grid(family);
    let closed = |a: f64, b: f64| -> Result<f64, FamilyError> {
        match (family, opts.fixture) {
            (Family::FgmCopula, Some(Fixture::CorruptFgm)) => Ok(0.25 + (a + b) / 18.0),
            _ => family.pair_expectation_closed(a, b),
        }
    };
    let zs: Vec<f64> = grid
        .par_iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let mut rng = stream_rng(seed, stream_id(1 + family_idx, k as u64));
            let est = family.pair_prob_mc(a, b, opts.pair_reps, &mut rng)?;
            Ok((closed(a, b)? - est.estimate).abs() / est.std_error)
        })
        .collect::<Result<_, FamilyError>>()?;
    let worst = zs.iter().copied().fold(0.0, f64::max);
    Ok(check(
        format!("pair_grid/{family}"),
        worst,
        4.0,
        format!(
            "{} parameter pairs, {} reps each; metric = max |closed - mc| / SE",
            grid.len(),
            opts.pair_reps
        ),
    )
    .with_cases(grid.len()))
}

fn check_kendall_paths(seed: u64, opts: &VerifyOptions) -> Result<CheckResult, HarnessError> {
    let mismatches: usize = (0..opts.kendall_cases)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, stream_id(10, k as u64));
            let n = rng.random_range(2..=opts.kendall_max_n);
            let pts = draw_sample(Family::BivariateNormal, &vec![0.3; n], &mut rng);
            let sample = Sample::new(pts, Provenance::Unspecified)?;
            let fast = kendall_fast(&sample, TiePolicy::Strict)?;
            let naive = kendall_naive(&sample, TiePolicy::Strict)?;
            Ok(usize::from(fast.to_bits() != naive.to_bits()))
        })
        .collect::<Result<Vec<_>, RankError>>()?
        .into_iter()
        .sum();
    Ok(check(
        "kendall_fast_vs_naive",
        mismatches as f64,
        0.0,
        format!(
            "{} random tie-free samples, n <= {}; metric = bitwise mismatches",
            opts.kendall_cases, opts.kendall_max_n
        ),
    )
    .with_cases(opts.kendall_cases))
}

fn check_ks(seed: u64, opts: &VerifyOptions) -> Vec<CheckResult> {
    let cases = [
        (Family::BivariateNormal, 0.6),
        (Family::FgmCopula, 0.8),
        (Family::FgmCopula, -1.0),
        (Family::BivariatePareto, 1.5),
    ];
    let crit = ks_critical(opts.ks_samples, opts.ks_alpha);
    cases
        .iter()
        .enumerate()
        .flat_map(|(k, &(family, t))| {
            let mut rng = stream_rng(seed, stream_id(20, k as u64));
            let pts = draw_sample(family, &vec![t; opts.ks_samples], &mut rng);
            let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
            let cdf = |v: f64| family.marginal_cdf(t, v);
            [("x", ks_statistic(&xs, cdf)), ("y", ks_statistic(&ys, cdf))]
                .into_iter()
                .map(|(axis, d)| {
                    check(
                        format!("ks/{family}/t={t}/{axis}"),
                        d,
                        crit,
                        format!("{} draws, alpha = {}", opts.ks_samples, opts.ks_alpha),
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn check_fgm_inversion() -> CheckResult {
    let mut worst: f64 = 0.0;
    for a in 0..=40 {
        let t = -1.0 + a as f64 / 20.0;
        for b in 0..=100 {
            let x = b as f64 / 100.0;
            for c in 0..=100 {
                let u = c as f64 / 100.0;
                let y = fgm_conditional_quantile(t, x, u);
                worst = worst.max((fgm_conditional_cdf(t, x, y) - u).abs());
            }
        }
    }
    check(
        "fgm_inversion_grid",
        worst,
        1e-10,
        "41 x 101 x 101 grid of (t, x, u); metric = max |F(y|x) - u|",
    )
}

fn check_constant_reductions(seed: u64) -> Result<Vec<CheckResult>, HarnessError> {
    let cases = [
        (Family::BivariateNormal, 0.5),
        (Family::BivariateNormal, -0.8),
        (Family::FgmCopula, 0.7),
        (Family::BivariatePareto, 1.0),
        (Family::BivariatePareto, 3.0),
    ];
    let budget = McBudget {
        pairs: 200,
        reps_per_pair: 10_000,
    };
    let mut out = Vec::new();
    for (k, &(family, t)) in cases.iter().enumerate() {
        let seq = SeqSpec::parse(&t.to_string()).expect("numeric literal");
        let exact = tau_n(family, &seq, 25)?.tau_n;
        let iid = iid_tau(family, t);
        out.push(check(
            format!("constant_reduction/{family}/t={t}/closed"),
            (exact - iid).abs(),
            1e-12,
            format!("tau_n = {exact}, iid tau = {iid}"),
        ));
        let mut rng = stream_rng(seed, stream_id(30, k as u64));
        let mc = tau_n_mc(family, &seq, 25, budget, &mut rng)?;
        out.push(check(
            format!("constant_reduction/{family}/t={t}/mc"),
            (mc.estimate - iid).abs() / mc.std_error,
            4.0,
            format!("mc = {} +- {}; metric = |mc - tau| / SE", mc.estimate, mc.std_error),
        ));
    }
    Ok(out)
}

fn check_increments(opts: &VerifyOptions) -> Result<Vec<CheckResult>, HarnessError> {
    let cases = [
        (Family::BivariateNormal, "sin(i)"),
        (Family::FgmCopula, "1/i"),
        (Family::FgmCopula, "3/5 - 1/i"),
        (Family::BivariatePareto, "i"),
    ];
    let mut out = Vec::new();
    for (family, src) in cases {
        let seq = SeqSpec::parse(src).expect("built-in sequence");
        let inc = increment_diagnostics(family, &seq, &opts.increment_points)?;
        let rises = inc.windows(2).filter(|w| w[1].abs_diff >= w[0].abs_diff).count();
        let listing: Vec<String> = inc.iter().map(|d| format!("m={}: {:.3e}", d.m, d.abs_diff)).collect();
        out.push(check(
            format!("increment_decay/{family}/{}", src.replace(' ', "")),
            rises as f64,
            0.0,
            format!(
                "|tau_(m+1) - tau_m|: {}; metric = non-decreasing steps",
                listing.join(", ")
            ),
        ));
    }
    Ok(out)
}

fn check_pareto_reduction() -> CheckResult {
    let n = 2000;
    let ts: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    let double = pareto_tau_double_sum(&ts);
    let single = pareto_identity_tau(n);
    check(
        "pareto_reduction/n=2000",
        (double - single).abs() / single.abs(),
        1e-10,
        format!("double sum {double}, single sum {single}; metric = relative difference"),
    )
}

/// Runs the oracle battery. Failed checks are reported as verdicts, not errors.
pub fn verify_suite(seed: u64, opts: &VerifyOptions) -> Result<VerifyReport, HarnessError> {
    let mut checks = Vec::new();
    for (k, family) in Family::ALL.into_iter().enumerate() {
        checks.push(check_pair_grid(seed, family, opts, k as u64)?);
    }
    checks.push(check_kendall_paths(seed, opts)?);
    checks.extend(check_ks(seed, opts));
    checks.push(check_fgm_inversion());
    checks.extend(check_constant_reductions(seed)?);
    checks.extend(check_increments(opts)?);
    checks.push(check_pareto_reduction());
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        seed,
        options: *opts,
        checks,
        all_passed,
    })
}
