//! Kendall's rank correlation for independent, non-identically distributed
//! bivariate samples.
//!
//! The crate computes the sample coefficient (quadratic and `O(n log n)`
//! paths that agree bit for bit), the theoretical `tau_n` for three parametric
//! families driven by a parameter sequence `t_i`, and seeded Monte Carlo
//! experiments comparing the two.
//!
//! ```
//! use ntau_core::{tau_n, Family, SeqSpec};
//!
//! let seq = SeqSpec::parse("3/5 - 1/i").unwrap();
//! let result = tau_n(Family::FgmCopula, &seq, 100).unwrap();
//! assert!((result.tau_n - 0.1218).abs() < 1e-4);
//! ```

pub mod families;
pub mod harness;
pub mod rankcoef;
pub mod rng;
pub mod seqspec;
pub mod stats;
pub mod summation;
pub mod theory;

pub use families::{BivariatePoint, Family, FamilyError, PairEstimate, ParamDomain};
pub use harness::{
    run_experiment, run_replicated, run_single, verify_suite, ExperimentConfig, Fixture, HarnessError,
    ReplicationReport, SingleRun, VerifyOptions, VerifyReport,
};
pub use rankcoef::{
    coefficient_set, kendall_fast, kendall_naive, CoefficientSelection, CoefficientSet, Provenance, RankError, Sample,
    TiePolicy, TieReport,
};
pub use seqspec::{SeqError, SeqSpec};
pub use stats::Summary;
pub use theory::{tau_n, tau_n_with, McBudget, McFallback, TheoryError, TheoryMode, TheoryOptions, TheoryResult};
