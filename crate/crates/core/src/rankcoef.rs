//! Sample correlation coefficients: Kendall's rank coefficient, Spearman's rank
//! coefficient, the blended rank coefficient `r = (3 tau - rho_S) / 2`, and
//! Pearson's product-moment coefficient.
//!
//! Rank coefficients are computed from concomitants: the sample is sorted by
//! `x` and the `y` values are read off in that order. With
//! `I_ji = I(Y_(j) <= Y_(i))` for concomitants `Y_(1..n)`,
//!
//! ```text
//! kendall  = 4 C / (n (n - 1)) - 1,          C = sum_{j < i} I_ji
//! spearman = 1 - 6 sum_i (R_i - i)^2 / (n^3 - n),   R_i = sum_j I_ji
//! ```
//!
//! Pair counts stay integral until the final division, so the quadratic and
//! merge-sort Kendall paths agree bit for bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{BivariatePoint, Family};
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RankError {
    #[error("need at least 2 observations, got {n}")]
    TooFewObservations { n: usize },
    #[error("observation {index} is not finite")]
    NonFinite { index: usize },
    #[error("sample has ties ({x_pairs} tied x pairs, {y_pairs} tied y pairs); ties are rejected in strict mode")]
    Ties { x_pairs: u64, y_pairs: u64 },
    #[error("{axis} has zero variance")]
    ZeroVariance { axis: char },
}

/// How exact ties in `x` or `y` are treated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Any tie is an error.
    #[default]
    Strict,
    /// Apply `I(Y_(j) <= Y_(i))` as written, with a stable sort on `x`.
    Literal,
}

/// Where a sample came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Simulated {
        family: Family,
        seed: u64,
        replication: u64,
    },
    Ingested {
        path: String,
    },
    Unspecified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    points: Vec<BivariatePoint>,
    provenance: Provenance,
}

impl Sample {
    pub fn new(points: Vec<BivariatePoint>, provenance: Provenance) -> Result<Self, RankError> {
        if let Some(index) = points.iter().position(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(RankError::NonFinite { index });
        }
        Ok(Sample { points, provenance })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, RankError> {
        Sample::new(pairs.iter().map(|&p| p.into()).collect(), Provenance::Unspecified)
    }

    pub fn points(&self) -> &[BivariatePoint] {
        &self.points
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Number of unordered pairs sharing an `x` value, and likewise for `y`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieReport {
    pub x_pairs: u64,
    pub y_pairs: u64,
}

impl TieReport {
    pub fn has_ties(&self) -> bool {
        self.x_pairs > 0 || self.y_pairs > 0
    }
}

/// Which coefficients to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientSelection {
    pub kendall: bool,
    pub spearman: bool,
    pub blended_r: bool,
    pub pearson: bool,
}

impl CoefficientSelection {
    pub const ALL: CoefficientSelection = CoefficientSelection {
        kendall: true,
        spearman: true,
        blended_r: true,
        pearson: true,
    };
    pub const KENDALL: CoefficientSelection = CoefficientSelection {
        kendall: true,
        spearman: false,
        blended_r: false,
        pearson: false,
    };
}

impl Default for CoefficientSelection {
    fn default() -> Self {
        CoefficientSelection::ALL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kendall: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spearman: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blended_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pearson: Option<f64>,
    pub tie_report: TieReport,
}

/// Concomitant `y` ranks in increasing-`x` order. Ranks are dense and start at 0,
/// so `I(Y_(j) <= Y_(i))` is `ranks[j] <= ranks[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concomitants {
    pub ranks: Vec<u32>,
    pub ties: TieReport,
}

fn tied_pairs(run: u64) -> u64 {
    run * run.saturating_sub(1) / 2
}

impl Concomitants {
    pub fn new(sample: &Sample, policy: TiePolicy) -> Result<Self, RankError> {
        let pts = sample.points();
        let n = pts.len();
        if n < 2 {
            return Err(RankError::TooFewObservations { n });
        }

        // stable: equal x keep input order
        let mut by_x: Vec<u32> = (0..n as u32).collect();
        by_x.sort_by(|&a, &b| pts[a as usize].x.total_cmp(&pts[b as usize].x));
        let mut by_y: Vec<u32> = (0..n as u32).collect();
        by_y.sort_unstable_by(|&a, &b| pts[a as usize].y.total_cmp(&pts[b as usize].y));

        let mut ties = TieReport::default();
        let mut run = 1u64;
        for w in by_x.windows(2) {
            if pts[w[0] as usize].x == pts[w[1] as usize].x {
                run += 1;
            } else {
                ties.x_pairs += tied_pairs(run);
                run = 1;
            }
        }
        ties.x_pairs += tied_pairs(run);

        let mut y_rank = vec![0u32; n];
        let mut rank = 0u32;
        run = 1;
        for k in 1..n {
            let (prev, cur) = (by_y[k - 1] as usize, by_y[k] as usize);
            if pts[cur].y == pts[prev].y {
                run += 1;
            } else {
                ties.y_pairs += tied_pairs(run);
                run = 1;
                rank += 1;
            }
            y_rank[cur] = rank;
        }
        ties.y_pairs += tied_pairs(run);

        if policy == TiePolicy::Strict && ties.has_ties() {
            return Err(RankError::Ties {
                x_pairs: ties.x_pairs,
                y_pairs: ties.y_pairs,
            });
        }
        let ranks = by_x.iter().map(|&k| y_rank[k as usize]).collect();
        Ok(Concomitants { ranks, ties })
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// `C = #{j < i : ranks[j] <= ranks[i]}` by the direct double loop.
    pub fn count_le_pairs_naive(&self) -> u64 {
        let r = &self.ranks;
        let mut c = 0u64;
        for i in 1..r.len() {
            let ri = r[i];
            c += r[..i].iter().filter(|&&rj| rj <= ri).count() as u64;
        }
        c
    }

    /// `C` as total pairs minus strict inversions, counted during a bottom-up merge sort.
    pub fn count_le_pairs_merge(&self) -> u64 {
        let n = self.ranks.len() as u64;
        n * (n - 1) / 2 - count_strict_inversions(&self.ranks)
    }

    /// `sum_i (R_i - i)^2` with `R_i = #{j : ranks[j] <= ranks[i]}`.
    pub fn spearman_sum_sq(&self) -> u128 {
        let n = self.ranks.len();
        let max = self.ranks.iter().copied().max().unwrap_or(0) as usize;
        let mut le = vec![0u64; max + 1];
        for &r in &self.ranks {
            le[r as usize] += 1;
        }
        for k in 1..le.len() {
            le[k] += le[k - 1];
        }
        debug_assert_eq!(le[max], n as u64);
        self.ranks
            .iter()
            .enumerate()
            .map(|(k, &r)| {
                let d = le[r as usize] as i128 - (k as i128 + 1);
                (d * d) as u128
            })
            .sum()
    }
}

/// Number of index pairs `j < i` with `v[j] > v[i]`.
pub fn count_strict_inversions(v: &[u32]) -> u64 {
    let n = v.len();
    let mut src = v.to_vec();
    let mut dst = vec![0u32; n];
    let mut inversions = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut a, mut b, mut k) = (lo, mid, lo);
            while a < mid && b < hi {
                // equal keys go left first and are not counted
                if src[b] < src[a] {
                    dst[k] = src[b];
                    inversions += (mid - a) as u64;
                    b += 1;
                } else {
                    dst[k] = src[a];
                    a += 1;
                }
                k += 1;
            }
            dst[k..k + (mid - a)].copy_from_slice(&src[a..mid]);
            k += mid - a;
            dst[k..k + (hi - b)].copy_from_slice(&src[b..hi]);
            lo = hi;
        }
        std::mem::swap(&mut src, &mut dst);
        width *= 2;
    }
    inversions
}

fn kendall_from_count(c: u64, n: usize) -> f64 {
    let pairs = n as i128 * (n as i128 - 1);
    (4 * c as i128 - pairs) as f64 / pairs as f64
}

fn spearman_from_sum_sq(sum_sq: u128, n: usize) -> f64 {
    let n = n as i128;
    let denom = n * n * n - n;
    (denom - 6 * sum_sq as i128) as f64 / denom as f64
}

/// Kendall's coefficient by the `O(n^2)` pair loop.
pub fn kendall_naive(sample: &Sample, policy: TiePolicy) -> Result<f64, RankError> {
    let c = Concomitants::new(sample, policy)?;
    Ok(kendall_from_count(c.count_le_pairs_naive(), c.len()))
}

/// Kendall's coefficient in `O(n log n)`; bit-identical to [`kendall_naive`].
pub fn kendall_fast(sample: &Sample, policy: TiePolicy) -> Result<f64, RankError> {
    let c = Concomitants::new(sample, policy)?;
    Ok(kendall_from_count(c.count_le_pairs_merge(), c.len()))
}

pub fn spearman(sample: &Sample, policy: TiePolicy) -> Result<f64, RankError> {
    let c = Concomitants::new(sample, policy)?;
    Ok(spearman_from_sum_sq(c.spearman_sum_sq(), c.len()))
}

/// `(3 kendall - spearman) / 2`.
pub fn blended_r(sample: &Sample, policy: TiePolicy) -> Result<f64, RankError> {
    let c = Concomitants::new(sample, policy)?;
    let k = kendall_from_count(c.count_le_pairs_merge(), c.len());
    let s = spearman_from_sum_sq(c.spearman_sum_sq(), c.len());
    Ok(blend(k, s))
}

fn blend(kendall: f64, spearman: f64) -> f64 {
    (3.0 * kendall - spearman) / 2.0
}

/// Sample Pearson correlation.
pub fn pearson(sample: &Sample) -> Result<f64, RankError> {
    let pts = sample.points();
    let n = pts.len();
    if n < 2 {
        return Err(RankError::TooFewObservations { n });
    }
    let mx = pts.iter().map(|p| p.x).sum::<CompensatedSum>().value() / n as f64;
    let my = pts.iter().map(|p| p.y).sum::<CompensatedSum>().value() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    for p in pts {
        let (dx, dy) = (p.x - mx, p.y - my);
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    let (sxx, syy) = (sxx.value(), syy.value());
    if sxx <= 0.0 {
        return Err(RankError::ZeroVariance { axis: 'x' });
    }
    if syy <= 0.0 {
        return Err(RankError::ZeroVariance { axis: 'y' });
    }
    Ok((sxy.value() / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Computes the selected coefficients, sharing one concomitant pass.
pub fn coefficient_set(
    sample: &Sample,
    policy: TiePolicy,
    which: CoefficientSelection,
) -> Result<CoefficientSet, RankError> {
    let c = Concomitants::new(sample, policy)?;
    let n = c.len();
    let need_k = which.kendall || which.blended_r;
    let need_s = which.spearman || which.blended_r;
    let k = need_k.then(|| kendall_from_count(c.count_le_pairs_merge(), n));
    let s = need_s.then(|| spearman_from_sum_sq(c.spearman_sum_sq(), n));
    let pearson = if which.pearson { Some(pearson(sample)?) } else { None };
    Ok(CoefficientSet {
        n,
        kendall: k.filter(|_| which.kendall),
        spearman: s.filter(|_| which.spearman),
        blended_r: if which.blended_r {
            Some(blend(k.unwrap(), s.unwrap()))
        } else {
            None
        },
        pearson,
        tie_report: c.ties,
    })
}
