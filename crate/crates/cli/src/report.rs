//! Report envelope: every JSON document is `{manifest, config, results}`.

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Outputs {
    /// `None` means stdout.
    pub report: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates_csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Timestamps {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

/// What produced a report. Thread count is deliberately absent: results do not
/// depend on it.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outputs: Outputs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamps: Option<Timestamps>,
}

impl RunManifest {
    pub fn new(command: &'static str, seed: Option<u64>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            outputs: Outputs::default(),
            timestamps: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub manifest: &'a RunManifest,
    pub config: &'a C,
    pub results: &'a R,
}

impl<C: Serialize, R: Serialize> Report<'_, C, R> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report types serialize");
        s.push('\n');
        s
    }
}

pub fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis())
}
