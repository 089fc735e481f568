//! The three bivariate families: bivariate normal with correlation `t`,
//! Farlie–Gumbel–Morgenstern (FGM) copula, and bivariate Pareto.
//!
//! Each family provides an exact sampler, the closed-form pair expectation
//! `p_ij = P(X_j <= X_i, Y_j <= Y_i)` for `(X_i, Y_i) ~ F(t_i)` independent of
//! `(X_j, Y_j) ~ F(t_j)`, and a Monte Carlo estimate of the same probability.
//! The bivariate normal CDF itself is not provided.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed on the arcsin argument before it is treated as a domain error.
pub const ASIN_CLAMP_TOLERANCE: f64 = 1e-12;
/// Below this `|t (1 - 2x)|` the FGM conditional CDF is treated as linear.
pub const FGM_LINEAR_THRESHOLD: f64 = 1e-12;
/// Smallest replication count accepted by [`Family::pair_prob_mc`].
pub const MIN_PAIR_REPS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("parameter t = {t} is outside the {family} domain {domain}")]
    ParameterOutOfDomain {
        family: Family,
        t: f64,
        domain: ParamDomain,
    },
    #[error("point ({x}, {y}) is outside the {family} support")]
    OutsideSupport { family: Family, x: f64, y: f64 },
    #[error("{op} is not available for the {family} family")]
    Unsupported { family: Family, op: &'static str },
    #[error("pair Monte Carlo needs at least {MIN_PAIR_REPS} replications, got {reps}")]
    TooFewReps { reps: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "normal")]
    BivariateNormal,
    #[serde(rename = "fgm")]
    FgmCopula,
    #[serde(rename = "pareto")]
    BivariatePareto,
}

/// Parameter interval; open or closed at each end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamDomain {
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl ParamDomain {
    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lower_closed {
            t >= self.lower
        } else {
            t > self.lower
        };
        let below = if self.upper_closed {
            t <= self.upper
        } else {
            t < self.upper
        };
        above && below && !t.is_nan()
    }
}

impl fmt::Display for ParamDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lower_closed { '[' } else { '(' };
        let r = if self.upper_closed { ']' } else { ')' };
        let up = if self.upper.is_infinite() {
            "inf".to_string()
        } else {
            self.upper.to_string()
        };
        write!(f, "{l}{}, {up}{r}", self.lower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariatePoint {
    pub x: f64,
    pub y: f64,
}

impl BivariatePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        BivariatePoint { x, y }
    }
}

impl From<(f64, f64)> for BivariatePoint {
    fn from((x, y): (f64, f64)) -> Self {
        BivariatePoint { x, y }
    }
}

/// Monte Carlo probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub reps: u64,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::BivariateNormal, Family::FgmCopula, Family::BivariatePareto];

    /// Short name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            Family::BivariateNormal => "normal",
            Family::FgmCopula => "fgm",
            Family::BivariatePareto => "pareto",
        }
    }

    pub fn domain(self) -> ParamDomain {
        match self {
            Family::BivariateNormal => ParamDomain {
                lower: -1.0,
                upper: 1.0,
                lower_closed: false,
                upper_closed: false,
            },
            Family::FgmCopula => ParamDomain {
                lower: -1.0,
                upper: 1.0,
                lower_closed: true,
                upper_closed: true,
            },
            Family::BivariatePareto => ParamDomain {
                lower: 0.0,
                upper: f64::INFINITY,
                lower_closed: false,
                upper_closed: false,
            },
        }
    }

    pub fn check_param(self, t: f64) -> Result<(), FamilyError> {
        let domain = self.domain();
        if domain.contains(t) {
            Ok(())
        } else {
            Err(FamilyError::ParameterOutOfDomain {
                family: self,
                t,
                domain,
            })
        }
    }

    fn check_support(self, p: BivariatePoint) -> Result<(), FamilyError> {
        let ok = p.x.is_finite()
            && p.y.is_finite()
            && match self {
                Family::BivariateNormal => true,
                Family::FgmCopula => (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y),
                Family::BivariatePareto => p.x >= 0.0 && p.y >= 0.0,
            };
        if ok {
            Ok(())
        } else {
            Err(FamilyError::OutsideSupport {
                family: self,
                x: p.x,
                y: p.y,
            })
        }
    }

    /// Joint CDF `F(x, y)`. Not available for the bivariate normal.
    pub fn cdf(self, t: f64, p: BivariatePoint) -> Result<f64, FamilyError> {
        self.check_param(t)?;
        self.check_support(p)?;
        let BivariatePoint { x, y } = p;
        match self {
            Family::BivariateNormal => Err(FamilyError::Unsupported {
                family: self,
                op: "joint cdf",
            }),
            Family::FgmCopula => Ok(x * y + t * (x - x * x) * (y - y * y)),
            Family::BivariatePareto => {
                let v = 1.0 - (1.0 + x).powf(-t) - (1.0 + y).powf(-t) + (1.0 + x + y).powf(-t);
                Ok(v.clamp(0.0, 1.0))
            }
        }
    }

    /// Density `f(x, y)`. Not available for the bivariate normal.
    pub fn density(self, t: f64, p: BivariatePoint) -> Result<f64, FamilyError> {
        self.check_param(t)?;
        self.check_support(p)?;
        let BivariatePoint { x, y } = p;
        match self {
            Family::BivariateNormal => Err(FamilyError::Unsupported {
                family: self,
                op: "density",
            }),
            Family::FgmCopula => Ok(1.0 + t * (1.0 - 2.0 * x) * (1.0 - 2.0 * y)),
            Family::BivariatePareto => Ok(t * (t + 1.0) * (1.0 + x + y).powf(-(t + 2.0))),
        }
    }

    /// CDF of either coordinate (all three families have identical marginals in x and y).
    pub fn marginal_cdf(self, t: f64, v: f64) -> f64 {
        match self {
            Family::BivariateNormal => standard_normal_cdf(v),
            Family::FgmCopula => v.clamp(0.0, 1.0),
            Family::BivariatePareto => {
                if v <= 0.0 {
                    0.0
                } else {
                    -(-t * v.ln_1p()).exp_m1()
                }
            }
        }
    }

    /// One exact draw from `F(t)`.
    pub fn sample<R: Rng + ?Sized>(self, t: f64, rng: &mut R) -> Result<BivariatePoint, FamilyError> {
        self.check_param(t)?;
        Ok(self.sample_unchecked(t, rng))
    }

    pub(crate) fn sample_unchecked<R: Rng + ?Sized>(self, t: f64, rng: &mut R) -> BivariatePoint {
        match self {
            Family::BivariateNormal => {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                BivariatePoint::new(z1, t * z1 + (1.0 - t * t).sqrt() * z2)
            }
            Family::FgmCopula => {
                let x: f64 = rng.sample(Open01);
                let u: f64 = rng.sample(Open01);
                BivariatePoint::new(x, fgm_conditional_quantile(t, x, u))
            }
            Family::BivariatePareto => {
                let u1: f64 = rng.sample(Open01);
                let u2: f64 = rng.sample(Open01);
                pareto_from_uniforms(t, u1, u2)
            }
        }
    }

    /// Closed-form `p_ij = P(X_j <= X_i, Y_j <= Y_i)`.
    ///
    /// * normal: `asin((t_i + t_j) / 2) / (2 pi) + 1/4`
    /// * FGM: `1/4 + (t_i + t_j) / 36`
    /// * Pareto: `(t_j^2 + t_j) / ((t_i + t_j)(t_i + t_j + 1))`
    pub fn pair_expectation_closed(self, t_i: f64, t_j: f64) -> Result<f64, FamilyError> {
        self.check_param(t_i)?;
        self.check_param(t_j)?;
        Ok(match self {
            Family::BivariateNormal => {
                let mut s = 0.5 * (t_i + t_j);
                if s.abs() > 1.0 {
                    if s.abs() > 1.0 + ASIN_CLAMP_TOLERANCE {
                        let t = if t_i.abs() >= t_j.abs() { t_i } else { t_j };
                        return Err(FamilyError::ParameterOutOfDomain {
                            family: self,
                            t,
                            domain: self.domain(),
                        });
                    }
                    s = s.clamp(-1.0, 1.0);
                }
                s.asin() / (2.0 * PI) + 0.25
            }
            Family::FgmCopula => 0.25 + (t_i + t_j) / 36.0,
            Family::BivariatePareto => {
                let s = t_i + t_j;
                (t_j * t_j + t_j) / (s * (s + 1.0))
            }
        })
    }

    /// Monte Carlo estimate of `P(X_j <= X_i, Y_j <= Y_i)` from `reps` independent
    /// pairs of draws.
    pub fn pair_prob_mc<R: Rng + ?Sized>(
        self,
        t_i: f64,
        t_j: f64,
        reps: u64,
        rng: &mut R,
    ) -> Result<PairEstimate, FamilyError> {
        self.check_param(t_i)?;
        self.check_param(t_j)?;
        if reps < MIN_PAIR_REPS {
            return Err(FamilyError::TooFewReps { reps });
        }
        let mut hits = 0u64;
        for _ in 0..reps {
            let a = self.sample_unchecked(t_i, rng);
            let b = self.sample_unchecked(t_j, rng);
            if b.x <= a.x && b.y <= a.y {
                hits += 1;
            }
        }
        let p = hits as f64 / reps as f64;
        Ok(PairEstimate {
            estimate: p,
            std_error: (p * (1.0 - p) / reps as f64).sqrt(),
            reps,
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown family `{0}` (expected normal, fgm or pareto)")]
pub struct UnknownFamily(pub String);

impl FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "normal" => Ok(Family::BivariateNormal),
            "fgm" => Ok(Family::FgmCopula),
            "pareto" => Ok(Family::BivariatePareto),
            _ => Err(UnknownFamily(s.to_string())),
        }
    }
}

/// Free-function form of [`Family::pair_expectation_closed`].
pub fn pair_expectation_closed(family: Family, t_i: f64, t_j: f64) -> Result<f64, FamilyError> {
    family.pair_expectation_closed(t_i, t_j)
}

/// Free-function form of [`Family::pair_prob_mc`].
pub fn pair_prob_mc<R: Rng + ?Sized>(
    family: Family,
    t_i: f64,
    t_j: f64,
    reps: u64,
    rng: &mut R,
) -> Result<PairEstimate, FamilyError> {
    family.pair_prob_mc(t_i, t_j, reps, rng)
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `P(Y <= y | X = x) = y + a (y - y^2)` with `a = t (1 - 2x)`.
pub fn fgm_conditional_cdf(t: f64, x: f64, y: f64) -> f64 {
    let a = t * (1.0 - 2.0 * x);
    y + a * (y - y * y)
}

/// Root in `[0, 1]` of `y + a (y - y^2) = u`.
///
/// The smaller root `((1 + a) - sqrt(D)) / (2a)`, `D = (1 + a)^2 - 4au`, is
/// evaluated as `2u / ((1 + a) + sqrt(D))` so that no cancellation occurs for
/// small `|a|`.
pub fn fgm_conditional_quantile(t: f64, x: f64, u: f64) -> f64 {
    let a = t * (1.0 - 2.0 * x);
    if a.abs() < FGM_LINEAR_THRESHOLD {
        return u;
    }
    let b = 1.0 + a;
    let disc = (b * b - 4.0 * a * u).max(0.0);
    let denom = b + disc.sqrt();
    if denom == 0.0 {
        // a = -1 and u = 0
        return 0.0;
    }
    (2.0 * u / denom).clamp(0.0, 1.0)
}

/// `P(Y <= y | X = x) = 1 - ((1 + x) / (1 + x + y))^(t + 1)`, obtained by
/// differentiating the joint CDF in `x` and dividing by the marginal density.
pub fn pareto_conditional_cdf(t: f64, x: f64, y: f64) -> f64 {
    -(-(t + 1.0) * (y / (1.0 + x)).ln_1p()).exp_m1()
}

/// Maps two uniforms on `(0, 1]` to a Pareto draw:
/// `X = u1^(-1/t) - 1`, `Y = (1 + X)(u2^(-1/(t+1)) - 1)`.
pub fn pareto_from_uniforms(t: f64, u1: f64, u2: f64) -> BivariatePoint {
    let x = (-u1.ln() / t).exp_m1();
    let y = (1.0 + x) * (-u2.ln() / (t + 1.0)).exp_m1();
    BivariatePoint::new(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn domains() {
        assert!(Family::BivariateNormal.check_param(0.99).is_ok());
        assert!(Family::BivariateNormal.check_param(1.0).is_err());
        assert!(Family::BivariateNormal.check_param(-1.0).is_err());
        assert!(Family::FgmCopula.check_param(1.0).is_ok());
        assert!(Family::FgmCopula.check_param(-1.0).is_ok());
        assert!(Family::FgmCopula.check_param(1.0 + 1e-15).is_err());
        assert!(Family::BivariatePareto.check_param(0.0).is_err());
        assert!(Family::BivariatePareto.check_param(1e6).is_ok());
        assert!(Family::BivariatePareto.check_param(f64::NAN).is_err());
        assert_eq!(Family::FgmCopula.domain().to_string(), "[-1, 1]");
        assert_eq!(Family::BivariatePareto.domain().to_string(), "(0, inf)");
    }

    #[test]
    fn names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("gumbel".parse::<Family>().is_err());
    }

    #[test]
    fn cdf_values() {
        let fgm = Family::FgmCopula;
        assert_eq!(fgm.cdf(0.0, (0.5, 0.5).into()).unwrap(), 0.25);
        assert_eq!(fgm.cdf(1.0, (0.5, 0.5).into()).unwrap(), 0.3125);
        let par = Family::BivariatePareto;
        assert!((par.cdf(1.0, (1.0, 1.0).into()).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            Family::BivariateNormal.cdf(0.0, (0.0, 0.0).into()),
            Err(FamilyError::Unsupported { .. })
        ));
        assert!(matches!(
            fgm.cdf(0.5, (1.5, 0.5).into()),
            Err(FamilyError::OutsideSupport { .. })
        ));
        assert!(matches!(
            par.cdf(-1.0, (1.0, 1.0).into()),
            Err(FamilyError::ParameterOutOfDomain { .. })
        ));
    }

    #[test]
    fn cdf_monotone_in_each_coordinate() {
        for fam in [Family::FgmCopula, Family::BivariatePareto] {
            for &t in &[-1.0, -0.3, 0.4, 1.0, 2.5] {
                if fam.check_param(t).is_err() {
                    continue;
                }
                let hi = if fam == Family::FgmCopula { 1.0 } else { 20.0 };
                let grid: Vec<f64> = (0..=40).map(|k| hi * k as f64 / 40.0).collect();
                for &y in &grid {
                    let mut prev = 0.0;
                    for &x in &grid {
                        let v = fam.cdf(t, (x, y).into()).unwrap();
                        assert!((0.0..=1.0).contains(&v));
                        assert!(v + 1e-15 >= prev, "{fam} t={t} x={x} y={y}");
                        prev = v;
                    }
                }
            }
        }
    }

    #[test]
    fn fgm_quadratic_root() {
        // t = 1, x = 0 => a = 1; 2y - y^2 = 0.75 => y = 0.5
        assert!((fgm_conditional_quantile(1.0, 0.0, 0.75) - 0.5).abs() < 1e-15);
        // a = -1 => y^2 = u
        assert!((fgm_conditional_quantile(1.0, 1.0, 0.81) - 0.9).abs() < 1e-15);
        assert_eq!(fgm_conditional_quantile(0.7, 0.5, 0.3), 0.3);
    }

    #[test]
    fn fgm_inversion_dense_grid() {
        let mut worst: f64 = 0.0;
        let ts: Vec<f64> = (0..=40).map(|k| -1.0 + k as f64 / 20.0).collect();
        let xs: Vec<f64> = (0..=200)
            .map(|k| k as f64 / 200.0)
            .chain([0.5 - 1e-9, 0.5 + 1e-11, 0.5 - 1e-13, 1e-300])
            .collect();
        for &t in &ts {
            for &x in &xs {
                for k in 0..=100 {
                    let u = k as f64 / 100.0;
                    let y = fgm_conditional_quantile(t, x, u);
                    assert!((0.0..=1.0).contains(&y));
                    worst = worst.max((fgm_conditional_cdf(t, x, y) - u).abs());
                }
            }
        }
        assert!(worst <= 1e-10, "worst residual {worst}");
    }

    #[test]
    fn pareto_inverse_cdf_arithmetic() {
        // t = 1: X = 0.25^-1 - 1 = 3, Y = 4 (0.25^-1/2 - 1) = 4
        let p = pareto_from_uniforms(1.0, 0.25, 0.25);
        assert!((p.x - 3.0).abs() < 1e-14);
        assert!((p.y - 4.0).abs() < 1e-14);
        // t = 2: X = 0.25^-1/2 - 1 = 1, Y = 2 (0.25^-1/3 - 1)
        let p = pareto_from_uniforms(2.0, 0.25, 0.25);
        assert!((p.x - 1.0).abs() < 1e-14);
        assert!((p.y - 2.0 * (0.25f64.powf(-1.0 / 3.0) - 1.0)).abs() < 1e-14);
        assert_eq!(pareto_from_uniforms(3.0, 1.0, 1.0), BivariatePoint::new(0.0, 0.0));
    }

    #[test]
    fn pareto_conditional_cdf_matches_joint_cdf_derivative() {
        // d/dx F(x, y) / f_X(x), central differences
        let fam = Family::BivariatePareto;
        for &t in &[0.5, 1.0, 3.0] {
            for &x in &[0.1, 1.0, 4.0] {
                for &y in &[0.05, 0.7, 3.0, 12.0] {
                    let h = 1e-5;
                    let dfdx =
                        (fam.cdf(t, (x + h, y).into()).unwrap() - fam.cdf(t, (x - h, y).into()).unwrap()) / (2.0 * h);
                    let fx = t * (1.0 + x).powf(-t - 1.0);
                    let want = dfdx / fx;
                    assert!(
                        (pareto_conditional_cdf(t, x, y) - want).abs() < 1e-7,
                        "t={t} x={x} y={y}"
                    );
                    // the sampler inverts this conditional CDF
                    let u2 = 1.0 - pareto_conditional_cdf(t, x, y);
                    let p = pareto_from_uniforms(t, (1.0 + x).powf(-t), u2);
                    assert!((p.x - x).abs() < 1e-10 * (1.0 + x));
                    assert!((p.y - y).abs() < 1e-9 * (1.0 + y));
                }
            }
        }
    }

    #[test]
    fn pareto_density_is_mixed_partial_of_cdf() {
        let fam = Family::BivariatePareto;
        let h = 1e-4;
        for &(t, x, y) in &[(1.0, 1.0, 1.0), (2.5, 0.3, 2.0), (0.7, 5.0, 0.4)] {
            let f = |a: f64, b: f64| fam.cdf(t, (a, b).into()).unwrap();
            let mixed = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
            let d = fam.density(t, (x, y).into()).unwrap();
            assert!((mixed - d).abs() < 1e-5 * d.max(1.0), "{mixed} vs {d}");
        }
    }

    #[test]
    fn closed_pair_expectations() {
        let n = Family::BivariateNormal;
        assert_eq!(n.pair_expectation_closed(0.0, 0.0).unwrap(), 0.25);
        let v = n.pair_expectation_closed(0.5, 0.5).unwrap();
        assert!((v - (1.0 / 12.0 + 0.25)).abs() < 1e-15);
        let p = Family::BivariatePareto.pair_expectation_closed(1.0, 1.0).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-15);
        let p = Family::BivariatePareto.pair_expectation_closed(2.0, 1.0).unwrap();
        assert!((p - 1.0 / 6.0).abs() < 1e-15);
        let f = Family::FgmCopula.pair_expectation_closed(1.0, 1.0).unwrap();
        assert!((f - (0.25 + 2.0 / 36.0)).abs() < 1e-15);
        assert!(n.pair_expectation_closed(1.0, 0.0).is_err());
    }

    #[test]
    fn symmetric_families_are_symmetric() {
        for &(a, b) in &[(0.3, -0.7), (0.99, 0.1), (-0.5, -0.2)] {
            for fam in [Family::BivariateNormal, Family::FgmCopula] {
                assert_eq!(
                    fam.pair_expectation_closed(a, b).unwrap(),
                    fam.pair_expectation_closed(b, a).unwrap()
                );
            }
        }
    }

    /// Midpoint-rule value of the double integral of F(t_j) against f(t_i) over the unit square.
    fn fgm_integral(t_i: f64, t_j: f64, m: usize) -> f64 {
        let fam = Family::FgmCopula;
        let h = 1.0 / m as f64;
        let mut s = 0.0;
        for a in 0..m {
            for b in 0..m {
                let p = BivariatePoint::new((a as f64 + 0.5) * h, (b as f64 + 0.5) * h);
                s += fam.cdf(t_j, p).unwrap() * fam.density(t_i, p).unwrap();
            }
        }
        s * h * h
    }

    #[test]
    fn fgm_closed_form_matches_brute_force_integral() {
        for &(a, b) in &[(1.0, 1.0), (-1.0, 0.4), (0.3, -0.8), (0.0, 0.0)] {
            let integral = fgm_integral(a, b, 400);
            let closed = Family::FgmCopula.pair_expectation_closed(a, b).unwrap();
            // midpoint error is O(h^2) ~ 1e-6
            assert!((integral - closed).abs() < 1e-5, "{a},{b}: {integral} vs {closed}");
        }
    }

    #[test]
    fn pair_mc_requires_enough_reps() {
        let mut rng = stream_rng(1, 0);
        assert_eq!(
            Family::FgmCopula.pair_prob_mc(0.0, 0.0, 999, &mut rng),
            Err(FamilyError::TooFewReps { reps: 999 })
        );
    }

    #[test]
    fn pair_mc_examples() {
        let cases = [
            (Family::BivariateNormal, 0.0, 0.0, 0.25),
            (Family::FgmCopula, 1.0, 1.0, 0.25 + 2.0 / 36.0),
            (Family::BivariatePareto, 2.0, 1.0, 1.0 / 6.0),
        ];
        for (k, (fam, a, b, want)) in cases.into_iter().enumerate() {
            let mut rng = stream_rng(2024, k as u64);
            let est = fam.pair_prob_mc(a, b, 1_000_000, &mut rng).unwrap();
            assert!(
                (est.estimate - want).abs() <= 3.0 * est.std_error,
                "{fam}: {est:?} vs {want}"
            );
        }
    }

    #[test]
    fn normal_sampler_independent_at_zero() {
        let mut rng = stream_rng(99, 0);
        let n = 1_000_000;
        let (mut sx, mut sy, mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let p = Family::BivariateNormal.sample(0.0, &mut rng).unwrap();
            sx += p.x;
            sy += p.y;
            sxy += p.x * p.y;
            sxx += p.x * p.x;
            syy += p.y * p.y;
        }
        let nf = n as f64;
        let cov = sxy / nf - sx / nf * sy / nf;
        let r = cov / ((sxx / nf - (sx / nf).powi(2)) * (syy / nf - (sy / nf).powi(2))).sqrt();
        assert!(r.abs() < 0.003, "r = {r}");
    }

    #[test]
    fn samples_stay_in_support() {
        let mut rng = stream_rng(5, 5);
        for _ in 0..10_000 {
            let p = Family::FgmCopula.sample(-0.9, &mut rng).unwrap();
            assert!(p.x > 0.0 && p.x < 1.0 && (0.0..=1.0).contains(&p.y));
            let q = Family::BivariatePareto.sample(1e5, &mut rng).unwrap();
            assert!(q.x >= 0.0 && q.y >= 0.0 && q.x.is_finite() && q.y.is_finite());
        }
        assert!(Family::BivariateNormal.sample(1.0, &mut rng).is_err());
    }

    #[test]
    fn marginals() {
        assert!((standard_normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((standard_normal_cdf(1.96) - 0.975_002_104_851_779_5).abs() < 1e-15);
        assert!((Family::BivariatePareto.marginal_cdf(1.0, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(Family::BivariatePareto.marginal_cdf(1.0, -1.0), 0.0);
        assert_eq!(Family::FgmCopula.marginal_cdf(0.3, 0.25), 0.25);
    }
}
