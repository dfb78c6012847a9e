use std::collections::BTreeMap;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything needed to rerun a command, embedded in each report. The output
/// path is left out so that reruns into a different file compare equal.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub args: Value,
    pub seed: u64,
    pub threads: Option<usize>,
    pub format: Format,
    pub prng: &'static str,
    pub tolerances: BTreeMap<String, f64>,
    /// Constant in front of the theorem's `ε^c` tolerance; the proof leaves it unspecified.
    pub c_prime: f64,
}

impl ExperimentConfig {
    /// Override from `--tol name=value`, else `default`.
    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }
}
