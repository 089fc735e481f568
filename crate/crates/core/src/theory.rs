//! Theoretical Kendall coefficient for independent, non-identically distributed
//! vectors:
//!
//! ```text
//! tau_n = 4 / (n (n - 1)) * sum_{i != j} p_ij - 1
//! ```
//!
//! Every family is evaluated through the centered symmetric pair term
//! `c_ij = p_ij + p_ji - 1/2`, which gives `tau_n = 4 C_n / (n (n - 1))` with
//! `C_n = sum_{j < i} c_ij` and avoids subtracting 1 from a number close to 1.
//!
//! * normal: `c_ij = asin((t_i + t_j) / 2) / pi`, an `O(n^2)` compensated sum
//! * FGM: `c_ij = (t_i + t_j) / 18`, so `tau_n = 2 sum t_i / (9 n)`
//! * Pareto: `c_ij = (t_i^2 + t_i + t_j^2 + t_j) / (s (s + 1)) - 1/2`, `s = t_i + t_j`
//!
//! Quadratic pair sums run over fixed row blocks, each accumulated with
//! compensation, and the block partials are merged in block order. The result is
//! the same for any number of threads.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::families::{Family, FamilyError};
use crate::rng::{stream_rng, StreamRng};
use crate::seqspec::{SeqError, SeqSpec};
use crate::summation::CompensatedSum;

/// Rows per block in the quadratic pair sums.
const ROWS_PER_BLOCK: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("need n >= 2, got {n}")]
    TooSmall { n: usize },
    #[error(transparent)]
    Sequence(#[from] SeqError),
    #[error("t_{index} = {t} is outside the {family} domain {domain}")]
    OutOfDomain {
        index: u64,
        t: f64,
        family: Family,
        domain: crate::families::ParamDomain,
    },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("exact evaluation needs {pairs} pair terms, over the budget of {budget}")]
    BudgetExceeded { pairs: u64, budget: u64 },
    #[error("Monte Carlo estimate needs at least 2 sampled pairs, got {pairs}")]
    TooFewPairs { pairs: u64 },
    #[error("n values must be sorted and >= 2")]
    BadIncrementGrid,
}

/// How `tau_n` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoryMode {
    /// Quadratic sum over all pairs.
    ClosedDoubleSum,
    /// Linear-time closed form (FGM, or Pareto with `t_i = i`).
    ClosedReduction,
    /// Subsampled pair Monte Carlo.
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryResult {
    pub family: Family,
    pub n: usize,
    pub tau_n: f64,
    pub mode: TheoryMode,
    /// Present only for Monte Carlo results.
    pub std_error: Option<f64>,
    /// The `n -> infinity` limit, for sequences where it is known.
    pub analytic_limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub increments: Option<Vec<Increment>>,
}

/// `|tau_{m+1} - tau_m|` at one `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Increment {
    pub m: usize,
    pub tau_m: f64,
    pub tau_m_plus_1: f64,
    pub abs_diff: f64,
}

/// Sampling effort for [`tau_n_mc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McBudget {
    /// Ordered pairs `(i, j)` drawn uniformly.
    pub pairs: u64,
    /// Replications of the pair probability for each drawn pair.
    pub reps_per_pair: u64,
}

impl Default for McBudget {
    fn default() -> Self {
        McBudget {
            pairs: 2_000,
            reps_per_pair: 1_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McTau {
    pub estimate: f64,
    pub std_error: f64,
    pub pairs: u64,
    pub reps_per_pair: u64,
}

/// Exact-or-fallback settings for [`tau_n_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TheoryOptions {
    /// Largest number of pair terms evaluated exactly; `None` is unlimited.
    pub pair_budget: Option<u64>,
    /// Fall back to Monte Carlo over budget instead of failing.
    pub mc_fallback: Option<McFallback>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McFallback {
    pub budget: McBudget,
    pub seed: u64,
}

/// Evaluates `t_1..t_n` and checks every value against the family domain.
pub fn parameters(family: Family, seq: &SeqSpec, n: usize) -> Result<Vec<f64>, TheoryError> {
    let ts = seq.values(n)?;
    for (k, &t) in ts.iter().enumerate() {
        if family.check_param(t).is_err() {
            return Err(TheoryError::OutOfDomain {
                index: k as u64 + 1,
                t,
                family,
                domain: family.domain(),
            });
        }
    }
    Ok(ts)
}

/// Summation strategy for the quadratic pair sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summation {
    /// Row blocks with compensated accumulation, merged in block order.
    Compensated,
    /// Plain left-to-right `f64` accumulation in row-major order.
    Naive,
}

/// `sum_{j < i} f(t_i, t_j)` in row-major order.
pub fn pair_sum<F>(ts: &[f64], summation: Summation, f: F) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let n = ts.len();
    match summation {
        Summation::Naive => {
            let mut s = 0.0;
            for i in 1..n {
                let ti = ts[i];
                for &tj in &ts[..i] {
                    s += f(ti, tj);
                }
            }
            s
        }
        Summation::Compensated => {
            let blocks = n.div_ceil(ROWS_PER_BLOCK);
            let partials: Vec<CompensatedSum> = (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut acc = CompensatedSum::new();
                    let lo = (b * ROWS_PER_BLOCK).max(1);
                    let hi = ((b + 1) * ROWS_PER_BLOCK).min(n);
                    for i in lo..hi {
                        let ti = ts[i];
                        for &tj in &ts[..i] {
                            acc.add(f(ti, tj));
                        }
                    }
                    acc
                })
                .collect();
            let mut total = CompensatedSum::new();
            for p in &partials {
                total.merge(p);
            }
            total.value()
        }
    }
}

#[inline]
fn pareto_centered(a: f64, b: f64) -> f64 {
    let s = a + b;
    (a * a + a + b * b + b) / (s * (s + 1.0)) - 0.5
}

/// `c_ij = p_ij + p_ji - 1/2` for one unordered pair.
pub fn centered_pair(family: Family, a: f64, b: f64) -> f64 {
    match family {
        Family::BivariateNormal => (0.5 * (a + b)).asin() / PI,
        Family::FgmCopula => (a + b) / 18.0,
        Family::BivariatePareto => pareto_centered(a, b),
    }
}

/// `tau_n` for the bivariate normal family:
/// `4 / (pi n (n - 1)) * sum_{j < i} asin((t_i + t_j) / 2)`.
pub fn normal_tau(ts: &[f64], summation: Summation) -> f64 {
    let n = ts.len() as f64;
    let s = pair_sum(ts, summation, |a, b| (0.5 * (a + b)).asin());
    4.0 * s / (PI * n * (n - 1.0))
}

/// `tau_n = 2 sum t_i / (9 n)` for the FGM family.
pub fn fgm_tau(ts: &[f64]) -> f64 {
    let s = ts.iter().sum::<CompensatedSum>().value();
    2.0 * s / (9.0 * ts.len() as f64)
}

/// Pareto `tau_n` by the quadratic double sum.
pub fn pareto_tau_double_sum(ts: &[f64]) -> f64 {
    let n = ts.len() as f64;
    4.0 * pair_sum(ts, Summation::Compensated, pareto_centered) / (n * (n - 1.0))
}

/// Pareto `tau_n` for `t_i = i`:
/// `4 / (n (n - 1)) * sum_j j (j + 1)(n - j) / ((2j + 1)(n + j + 1))`.
pub fn pareto_identity_tau(n: usize) -> f64 {
    let nf = n as f64;
    let s: CompensatedSum = (1..=n)
        .map(|j| {
            let j = j as f64;
            j * (j + 1.0) * (nf - j) / ((2.0 * j + 1.0) * (nf + j + 1.0))
        })
        .sum();
    4.0 * s.value() / (nf * (nf - 1.0))
}

fn is_identity(ts: &[f64]) -> bool {
    ts.iter().enumerate().all(|(k, &t)| t == (k + 1) as f64)
}

/// Number of pair terms the exact path evaluates.
pub fn exact_cost(family: Family, ts: &[f64]) -> u64 {
    let n = ts.len() as u64;
    match family {
        Family::FgmCopula => n,
        Family::BivariatePareto if is_identity(ts) => n,
        _ => n * n.saturating_sub(1) / 2,
    }
}

/// Exact `tau_n` from already validated parameters, with the mode used.
pub fn tau_from_params(family: Family, ts: &[f64]) -> (f64, TheoryMode) {
    match family {
        Family::BivariateNormal => (normal_tau(ts, Summation::Compensated), TheoryMode::ClosedDoubleSum),
        Family::FgmCopula => (fgm_tau(ts), TheoryMode::ClosedReduction),
        Family::BivariatePareto if is_identity(ts) => (pareto_identity_tau(ts.len()), TheoryMode::ClosedReduction),
        Family::BivariatePareto => (pareto_tau_double_sum(ts), TheoryMode::ClosedDoubleSum),
    }
}

/// iid value of Kendall's tau at a single parameter `t`.
pub fn iid_tau(family: Family, t: f64) -> f64 {
    match family {
        Family::BivariateNormal => 2.0 / PI * t.asin(),
        Family::FgmCopula => 2.0 * t / 9.0,
        Family::BivariatePareto => 1.0 / (2.0 * t + 1.0),
    }
}

/// Known limit of `tau_n`: constant sequences reduce to the iid value; the
/// sequences `sin(i)`, `1/i`, `3/5 - 1/i` and `i` have known limits (the
/// Pareto value 0.2275 is rounded to 4 decimals).
pub fn analytic_limit(family: Family, seq: &SeqSpec) -> Option<f64> {
    if seq.is_constant() {
        let t = seq.eval(1).ok()?;
        return family.check_param(t).ok().map(|_| iid_tau(family, t));
    }
    let known: [(Family, &str, f64); 4] = [
        (Family::BivariateNormal, "sin(i)", 0.0),
        (Family::FgmCopula, "1/i", 0.0),
        (Family::FgmCopula, "3/5 - 1/i", 2.0 / 15.0),
        (Family::BivariatePareto, "i", 0.2275),
    ];
    known.iter().find_map(|&(f, src, limit)| {
        let parsed = SeqSpec::parse(src).expect("built-in sequence parses");
        (f == family && parsed.ast() == seq.ast()).then_some(limit)
    })
}

/// Exact `tau_n` for `t_i = seq(i)`, `i = 1..n`.
pub fn tau_n(family: Family, seq: &SeqSpec, n: usize) -> Result<TheoryResult, TheoryError> {
    tau_n_with(family, seq, n, &TheoryOptions::default())
}

/// [`tau_n`] with a pair budget and optional Monte Carlo fallback.
pub fn tau_n_with(
    family: Family,
    seq: &SeqSpec,
    n: usize,
    options: &TheoryOptions,
) -> Result<TheoryResult, TheoryError> {
    if n < 2 {
        return Err(TheoryError::TooSmall { n });
    }
    let ts = parameters(family, seq, n)?;
    let analytic_limit = analytic_limit(family, seq);
    let cost = exact_cost(family, &ts);
    match options.pair_budget {
        Some(budget) if cost > budget => match options.mc_fallback {
            Some(fb) => {
                let mut rng = stream_rng(fb.seed, 0);
                let mc = tau_mc_from_params(family, &ts, fb.budget, &mut rng)?;
                Ok(TheoryResult {
                    family,
                    n,
                    tau_n: mc.estimate,
                    mode: TheoryMode::MonteCarlo,
                    std_error: Some(mc.std_error),
                    analytic_limit,
                    increments: None,
                })
            }
            None => Err(TheoryError::BudgetExceeded { pairs: cost, budget }),
        },
        _ => {
            let (tau, mode) = tau_from_params(family, &ts);
            Ok(TheoryResult {
                family,
                n,
                tau_n: tau,
                mode,
                std_error: None,
                analytic_limit,
                increments: None,
            })
        }
    }
}

/// Unbiased Monte Carlo estimate of `tau_n`: ordered pairs `(i, j)`, `i != j`,
/// are drawn uniformly and `p_ij` is estimated for each by pair simulation.
pub fn tau_n_mc<R: Rng + ?Sized>(
    family: Family,
    seq: &SeqSpec,
    n: usize,
    budget: McBudget,
    rng: &mut R,
) -> Result<McTau, TheoryError> {
    if n < 2 {
        return Err(TheoryError::TooSmall { n });
    }
    let ts = parameters(family, seq, n)?;
    tau_mc_from_params(family, &ts, budget, rng)
}

pub fn tau_mc_from_params<R: Rng + ?Sized>(
    family: Family,
    ts: &[f64],
    budget: McBudget,
    rng: &mut R,
) -> Result<McTau, TheoryError> {
    if budget.pairs < 2 {
        return Err(TheoryError::TooFewPairs { pairs: budget.pairs });
    }
    let n = ts.len();
    let mut sum = CompensatedSum::new();
    let mut sum_sq = CompensatedSum::new();
    for _ in 0..budget.pairs {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let p = family.pair_prob_mc(ts[i], ts[j], budget.reps_per_pair, rng)?.estimate;
        sum.add(p);
        sum_sq.add(p * p);
    }
    let m = budget.pairs as f64;
    let mean = sum.value() / m;
    let var = ((sum_sq.value() - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok(McTau {
        estimate: 4.0 * mean - 1.0,
        std_error: 4.0 * (var / m).sqrt(),
        pairs: budget.pairs,
        reps_per_pair: budget.reps_per_pair,
    })
}

/// Convenience wrapper drawing from stream 0 of `seed`.
pub fn tau_n_mc_seeded(
    family: Family,
    seq: &SeqSpec,
    n: usize,
    budget: McBudget,
    seed: u64,
) -> Result<McTau, TheoryError> {
    let mut rng: StreamRng = stream_rng(seed, 0);
    tau_n_mc(family, seq, n, budget, &mut rng)
}

fn centered_total(family: Family, ts: &[f64]) -> f64 {
    match family {
        Family::FgmCopula => {
            let m = ts.len() as f64;
            (m - 1.0) * ts.iter().sum::<CompensatedSum>().value() / 18.0
        }
        _ => pair_sum(ts, Summation::Compensated, |a, b| centered_pair(family, a, b)),
    }
}

/// `|tau_{m+1} - tau_m|` for each `m`, computed from the new row
/// `R = sum_{j <= m} c_{m+1, j}` as `4 |(m - 1) R - 2 C_m| / ((m - 1) m (m + 1))`.
pub fn increment_diagnostics(family: Family, seq: &SeqSpec, n_values: &[usize]) -> Result<Vec<Increment>, TheoryError> {
    if n_values.iter().any(|&m| m < 2) || n_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(TheoryError::BadIncrementGrid);
    }
    let Some(&max) = n_values.last() else {
        return Ok(Vec::new());
    };
    let ts = parameters(family, seq, max + 1)?;
    n_values
        .iter()
        .map(|&m| {
            let head = &ts[..m];
            let c_m = centered_total(family, head);
            let t_new = ts[m];
            let row = head
                .iter()
                .map(|&tj| centered_pair(family, t_new, tj))
                .sum::<CompensatedSum>()
                .value();
            let mf = m as f64;
            let tau_m = 4.0 * c_m / (mf * (mf - 1.0));
            let tau_m_plus_1 = 4.0 * (c_m + row) / ((mf + 1.0) * mf);
            let diff = 4.0 * ((mf - 1.0) * row - 2.0 * c_m) / ((mf - 1.0) * mf * (mf + 1.0));
            Ok(Increment {
                m,
                tau_m,
                tau_m_plus_1,
                abs_diff: diff.abs(),
            })
        })
        .collect()
}

/// Upper bound on `Var(tau~_n)`:
/// `16 (n (n - 1) / 2 + n (n - 1)(n - 2)) / (n - 1)^4`.
pub fn variance_bound(n: usize) -> Result<f64, TheoryError> {
    if n < 2 {
        return Err(TheoryError::TooSmall { n });
    }
    let nf = n as f64;
    let e1 = nf * (nf - 1.0) / 2.0;
    let e234 = 3.0 * nf * (nf - 1.0) * (nf - 2.0) / 3.0;
    Ok(16.0 * (e1 + e234) / (nf - 1.0).powi(4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqspec::parse_seq;

    fn harmonic(n: usize) -> f64 {
        (1..=n).rev().map(|k| 1.0 / k as f64).sum()
    }

    #[test]
    fn constant_normal_reduces_to_arcsine_law() {
        for &t in &[-0.9, -0.2, 0.0, 0.5, 0.95] {
            let seq = parse_seq(&format!("{t}")).unwrap();
            let r = tau_n(Family::BivariateNormal, &seq, 37).unwrap();
            let want = 2.0 / PI * f64::asin(t);
            assert!((r.tau_n - want).abs() < 1e-14, "{t}: {} vs {want}", r.tau_n);
            assert_eq!(r.analytic_limit, Some(want));
        }
    }

    #[test]
    fn two_point_normal() {
        // n = 2, t = (0, 1) is outside the open domain; (0, 0.999...) is not.
        let seq = parse_seq("(i - 1) * 0.5").unwrap();
        let r = tau_n(Family::BivariateNormal, &seq, 2).unwrap();
        // pair (0, 0.5): (2/pi) asin(0.25)
        assert!((r.tau_n - 2.0 / PI * 0.25f64.asin()).abs() < 1e-15);
        let bad = parse_seq("i - 1").unwrap();
        assert!(matches!(
            tau_n(Family::BivariateNormal, &bad, 2),
            Err(TheoryError::OutOfDomain { index: 2, .. })
        ));
        // the single-pair formula with t = (0, 1) directly
        assert!((normal_tau(&[0.0, 1.0], Summation::Compensated) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn fgm_closed_form() {
        let seq = parse_seq("1/i").unwrap();
        let r = tau_n(Family::FgmCopula, &seq, 1000).unwrap();
        assert_eq!(r.mode, TheoryMode::ClosedReduction);
        assert!((r.tau_n - 2.0 * harmonic(1000) / 9000.0).abs() < 1e-16);
        // agrees with the generic centered double sum
        let ts = seq.values(1000).unwrap();
        let generic =
            4.0 * pair_sum(&ts, Summation::Compensated, |a, b| {
                centered_pair(Family::FgmCopula, a, b)
            }) / (1000.0 * 999.0);
        assert!((generic - r.tau_n).abs() < 1e-15);
        let r50 = tau_n(Family::FgmCopula, &parse_seq("3/5 - 1/i").unwrap(), 50).unwrap();
        assert!((r50.tau_n - 2.0 / 450.0 * (30.0 - harmonic(50))).abs() < 1e-15);
        assert!((r50.tau_n - 0.113_34).abs() < 1e-4);
    }

    #[test]
    fn pareto_reduction_matches_double_sum() {
        for n in [2usize, 3, 10, 257, 2000] {
            let ts: Vec<f64> = (1..=n).map(|k| k as f64).collect();
            let double = pareto_tau_double_sum(&ts);
            let single = pareto_identity_tau(n);
            assert!(
                (double - single).abs() <= 1e-10 * single.abs(),
                "n={n}: {double} vs {single}"
            );
        }
        let r = tau_n(Family::BivariatePareto, &parse_seq("i").unwrap(), 2000).unwrap();
        assert_eq!(r.mode, TheoryMode::ClosedReduction);
        assert_eq!(r.analytic_limit, Some(0.2275));
        let r = tau_n(Family::BivariatePareto, &parse_seq("i + 0").unwrap(), 50).unwrap();
        assert_eq!(r.mode, TheoryMode::ClosedReduction);
        let r = tau_n(Family::BivariatePareto, &parse_seq("2 * i").unwrap(), 50).unwrap();
        assert_eq!(r.mode, TheoryMode::ClosedDoubleSum);
    }

    #[test]
    fn pareto_constant_sequence() {
        let r = tau_n(Family::BivariatePareto, &parse_seq("1").unwrap(), 100).unwrap();
        assert!((r.tau_n - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn compensated_and_naive_sums_agree() {
        let ts = parse_seq("sin(i)").unwrap().values(3000).unwrap();
        let a = normal_tau(&ts, Summation::Compensated);
        let b = normal_tau(&ts, Summation::Naive);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn permutation_invariance() {
        let mut ts = parse_seq("exp(-abs(sin(i)))").unwrap().values(500).unwrap();
        let a = normal_tau(&ts, Summation::Compensated);
        ts.reverse();
        ts.swap(3, 400);
        let b = normal_tau(&ts, Summation::Compensated);
        assert!((a - b).abs() < 1e-14);
        let mut ps: Vec<f64> = (1..=300).map(|k| 0.5 + (k as f64).sqrt()).collect();
        let a = pareto_tau_double_sum(&ps);
        ps.reverse();
        assert!((a - pareto_tau_double_sum(&ps)).abs() < 1e-14);
    }

    #[test]
    fn range_of_tau() {
        for (fam, src) in [
            (Family::BivariateNormal, "sin(i)"),
            (Family::BivariateNormal, "0.999999"),
            (Family::BivariateNormal, "-0.999999"),
            (Family::FgmCopula, "1"),
            (Family::FgmCopula, "-1"),
            (Family::BivariatePareto, "0.0001"),
            (Family::BivariatePareto, "pow(i, 3)"),
        ] {
            let r = tau_n(fam, &parse_seq(src).unwrap(), 300).unwrap();
            assert!(r.tau_n.abs() <= 1.0 + 1e-12, "{fam} {src}: {}", r.tau_n);
        }
    }

    #[test]
    fn increments() {
        let inc = increment_diagnostics(Family::FgmCopula, &parse_seq("1/i").unwrap(), &[10]).unwrap();
        let want = 2.0 / 9.0 * (harmonic(11) / 11.0 - harmonic(10) / 10.0).abs();
        assert!((inc[0].abs_diff - want).abs() < 1e-16);
        assert!((inc[0].tau_m_plus_1 - inc[0].tau_m).abs() - inc[0].abs_diff < 1e-16);

        let flat = increment_diagnostics(Family::BivariatePareto, &parse_seq("2").unwrap(), &[5, 50]).unwrap();
        assert!(flat.iter().all(|d| d.abs_diff < 1e-15));

        let sin = increment_diagnostics(
            Family::BivariateNormal,
            &parse_seq("sin(i)").unwrap(),
            &[100, 1000, 10_000],
        )
        .unwrap();
        assert!(
            sin[0].abs_diff > sin[1].abs_diff && sin[1].abs_diff > sin[2].abs_diff,
            "{sin:?}"
        );
        // consistent with tau_n
        let t100 = tau_n(Family::BivariateNormal, &parse_seq("sin(i)").unwrap(), 100)
            .unwrap()
            .tau_n;
        assert!((sin[0].tau_m - t100).abs() < 1e-15);

        assert_eq!(
            increment_diagnostics(Family::FgmCopula, &parse_seq("1/i").unwrap(), &[10, 5]),
            Err(TheoryError::BadIncrementGrid)
        );
    }

    #[test]
    fn variance_bound_values() {
        assert_eq!(variance_bound(2).unwrap(), 16.0);
        assert!((variance_bound(11).unwrap() - 1.672).abs() < 1e-12);
        assert!(variance_bound(1_000_000).unwrap() < 17.0 / 1e6);
        assert_eq!(variance_bound(1), Err(TheoryError::TooSmall { n: 1 }));
    }

    #[test]
    fn budget_and_fallback() {
        let seq = parse_seq("sin(i)").unwrap();
        let opts = TheoryOptions {
            pair_budget: Some(10),
            mc_fallback: None,
        };
        assert_eq!(
            tau_n_with(Family::BivariateNormal, &seq, 100, &opts),
            Err(TheoryError::BudgetExceeded {
                pairs: 4950,
                budget: 10
            })
        );
        // FGM is linear and stays within budget
        let fgm = tau_n_with(Family::FgmCopula, &parse_seq("1/i").unwrap(), 10, &opts).unwrap();
        assert_eq!(fgm.mode, TheoryMode::ClosedReduction);
        let opts = TheoryOptions {
            pair_budget: Some(10),
            mc_fallback: Some(McFallback {
                budget: McBudget {
                    pairs: 200,
                    reps_per_pair: 1000,
                },
                seed: 3,
            }),
        };
        let r = tau_n_with(Family::BivariateNormal, &seq, 100, &opts).unwrap();
        assert_eq!(r.mode, TheoryMode::MonteCarlo);
        assert!(r.std_error.unwrap() > 0.0);
    }

    #[test]
    fn mc_oracle_examples() {
        let budget = McBudget {
            pairs: 400,
            reps_per_pair: 5000,
        };
        let half = tau_n_mc_seeded(Family::BivariateNormal, &parse_seq("0.5").unwrap(), 50, budget, 1).unwrap();
        assert!((half.estimate - 1.0 / 3.0).abs() <= 4.0 * half.std_error, "{half:?}");
        let fgm = tau_n_mc_seeded(Family::FgmCopula, &parse_seq("1/i").unwrap(), 1000, budget, 2).unwrap();
        let want = 2.0 * harmonic(1000) / 9000.0;
        assert!((fgm.estimate - want).abs() <= 4.0 * fgm.std_error, "{fgm:?} vs {want}");
        let par = tau_n_mc_seeded(Family::BivariatePareto, &parse_seq("1").unwrap(), 10, budget, 3).unwrap();
        assert!((par.estimate - 1.0 / 3.0).abs() <= 4.0 * par.std_error, "{par:?}");
        assert!(matches!(
            tau_n_mc_seeded(
                Family::FgmCopula,
                &parse_seq("1").unwrap(),
                5,
                McBudget {
                    pairs: 1,
                    reps_per_pair: 1000
                },
                0
            ),
            Err(TheoryError::TooFewPairs { .. })
        ));
    }

    #[test]
    fn analytic_limits_table() {
        let lim = |f, s: &str| analytic_limit(f, &parse_seq(s).unwrap());
        assert_eq!(lim(Family::BivariateNormal, "sin(i)"), Some(0.0));
        assert_eq!(lim(Family::FgmCopula, "3 / 5 - 1 / i"), Some(2.0 / 15.0));
        assert_eq!(lim(Family::FgmCopula, "1/i"), Some(0.0));
        assert_eq!(lim(Family::BivariatePareto, "i"), Some(0.2275));
        assert_eq!(lim(Family::BivariateNormal, "exp(-abs(sin(i)))"), None);
        assert_eq!(lim(Family::FgmCopula, "0.9"), Some(0.2));
    }
}
