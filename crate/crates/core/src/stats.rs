//! Summary statistics and the one-sample Kolmogorov–Smirnov test.

use serde::Serialize;

use crate::summation::CompensatedSum;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample variance with divisor `count - 1`.
    pub variance: f64,
    pub sd: f64,
    /// `sd / sqrt(count)`.
    pub std_error: f64,
    /// 99% normal-approximation interval for the mean.
    pub ci99: [f64; 2],
}

/// Summary of `values` in the order given. Needs at least two values.
pub fn summarize(values: &[f64]) -> Option<Summary> {
    let count = values.len();
    if count < 2 {
        return None;
    }
    let m = count as f64;
    let mean = values.iter().sum::<CompensatedSum>().value() / m;
    let ss = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<CompensatedSum>()
        .value();
    let variance = ss / (m - 1.0);
    let sd = variance.sqrt();
    let std_error = sd / m.sqrt();
    Some(Summary {
        count,
        mean,
        variance,
        sd,
        std_error,
        ci99: [mean - Z_99 * std_error, mean + Z_99 * std_error],
    })
}

/// `sup_x |F_n(x) - F(x)|` for the empirical CDF of `values`.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let f = cdf(v);
            let lo = k as f64 / n;
            let hi = (k + 1) as f64 / n;
            (f - lo).max(hi - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value of the KS statistic: `sqrt(-ln(alpha / 2) / 2) / sqrt(n)`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_small_set() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!((s.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(summarize(&[1.0]).is_none());
    }

    #[test]
    fn ks_of_exact_grid_is_half_step() {
        let n = 1000;
        let v: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&v, |x| x);
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
        // shifted sample is rejected
        let shifted: Vec<f64> = v.iter().map(|x| x * 0.9).collect();
        assert!(ks_statistic(&shifted, |x| x) > ks_critical(n, 0.001));
    }

    #[test]
    fn critical_value_at_one_per_mille() {
        // c(0.001) = 1.94947...
        assert!((ks_critical(1, 0.001) - 1.949_47).abs() < 1e-5);
    }
}
