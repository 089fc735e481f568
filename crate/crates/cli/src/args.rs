use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ntau_core::{CoefficientSelection, Family, Fixture, TiePolicy};

#[derive(Debug, Parser)]
#[command(
    name = "ntau",
    version,
    about = "Kendall's tau for independent, non-identically distributed samples"
)]
pub struct Cli {
    /// Worker threads for pair sums and replications (default: all cores).
    #[arg(long, global = true, env = "NTAU_THREADS")]
    pub threads: Option<usize>,

    /// Record wall-clock start and end times in the manifest. Off by default so
    /// that repeated runs produce identical reports.
    #[arg(long, global = true)]
    pub timestamps: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample coefficients of a two-column CSV file.
    Estimate(EstimateArgs),
    /// Theoretical tau_n for a family and parameter sequence.
    Theory(TheoryArgs),
    /// Seeded Monte Carlo replications of the sample coefficients.
    Simulate(SimulateArgs),
    /// Run the oracle battery.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Normal,
    Fgm,
    Pareto,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Normal => Family::BivariateNormal,
            FamilyArg::Fgm => Family::FgmCopula,
            FamilyArg::Pareto => Family::BivariatePareto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TiesArg {
    Strict,
    Literal,
}

impl From<TiesArg> for TiePolicy {
    fn from(t: TiesArg) -> TiePolicy {
        match t {
            TiesArg::Strict => TiePolicy::Strict,
            TiesArg::Literal => TiePolicy::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoefArg {
    Kendall,
    Spearman,
    #[value(name = "blended_r", alias = "blended-r")]
    BlendedR,
    Pearson,
}

pub fn selection(coefs: &[CoefArg]) -> CoefficientSelection {
    CoefficientSelection {
        kendall: coefs.contains(&CoefArg::Kendall),
        spearman: coefs.contains(&CoefArg::Spearman),
        blended_r: coefs.contains(&CoefArg::BlendedR),
        pearson: coefs.contains(&CoefArg::Pearson),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureArg {
    CorruptFgm,
}

impl From<FixtureArg> for Fixture {
    fn from(f: FixtureArg) -> Fixture {
        match f {
            FixtureArg::CorruptFgm => Fixture::CorruptFgm,
        }
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// CSV file with two numeric columns and an optional `x,y` header.
    pub csv: PathBuf,
    #[arg(long, value_enum, default_value = "strict")]
    pub ties: TiesArg,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "kendall,spearman,blended_r,pearson"
    )]
    pub coefficients: Vec<CoefArg>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Parameter sequence in `i`, e.g. "3/5 - 1/i".
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub n: usize,
    /// Largest number of exact pair terms (default: unlimited).
    #[arg(long)]
    pub pair_budget: Option<u64>,
    /// Estimate by pair Monte Carlo when the exact cost exceeds the budget.
    #[arg(long)]
    pub mc_fallback: bool,
    #[arg(long, default_value_t = 2_000)]
    pub mc_pairs: u64,
    #[arg(long, default_value_t = 1_000)]
    pub mc_reps: u64,
    /// Seed of the Monte Carlo fallback.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also report |tau_(m+1) - tau_m| at these m (comma-separated, ascending).
    #[arg(long, value_delimiter = ',')]
    pub increments: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub replications: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "strict")]
    pub ties: TiesArg,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "kendall")]
    pub coefficients: Vec<CoefArg>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write per-replication estimates as CSV.
    #[arg(long)]
    pub replicates_csv: Option<PathBuf>,
    /// Write the sample of replication 0 as CSV.
    #[arg(long)]
    pub dump_sample: Option<PathBuf>,
    /// Exit with status 6 when a statistical verdict fails.
    #[arg(long)]
    pub strict_verdicts: bool,
    /// Lift the R * n sampled-point budget.
    #[arg(long)]
    pub allow_large: bool,
    /// Largest number of exact pair terms for tau_n before falling back to
    /// Monte Carlo.
    #[arg(long, default_value_t = ntau_core::harness::DEFAULT_PAIR_BUDGET)]
    pub pair_budget: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    pub json: bool,
    /// Reduced sample sizes, same checks and thresholds.
    #[arg(long)]
    pub quick: bool,
    /// Inject a known defect; the battery must then fail.
    #[arg(long, value_enum)]
    pub fixture: Option<FixtureArg>,
}
