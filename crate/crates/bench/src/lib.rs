//! Input fixtures shared by the criterion benches.

use ntau_core::rng::stream_rng;
use ntau_core::{BivariatePoint, Provenance, Sample};
use rand::Rng;

/// A tie-free sample of `n` points with moderate positive dependence.
pub fn correlated_sample(n: usize, seed: u64) -> Sample {
    let mut rng = stream_rng(seed, 0);
    let points = (0..n)
        .map(|_| {
            let x: f64 = rng.random();
            let y = 0.5 * x + 0.5 * rng.random::<f64>();
            BivariatePoint { x, y }
        })
        .collect();
    Sample::new(points, Provenance::Unspecified).expect("finite points")
}

/// `t_i = sin(i)` for `i = 1..n`, inside the normal domain.
pub fn sin_params(n: usize) -> Vec<f64> {
    (1..=n).map(|i| (i as f64).sin()).collect()
}
