//! TOML experiment configuration: a problem block, a solver block, and a few
//! top-level knobs. Parsing reports the offending line so a broken config is
//! fixable without reading serde internals.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

/// Top-level config for `run` and `compare`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Base seed; the command-line `--seed` wins over this.
    pub seed: Option<u64>,
    /// Replication count for `compare`; `--reps` wins.
    pub replications: Option<usize>,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Problem name plus the union of per-problem parameters; each builder reads
/// the fields it understands and fills documented defaults for the rest.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub rho: Option<f64>,
    pub s_star: Option<usize>,
    pub noise_sd: Option<f64>,
    pub lambda: Option<f64>,
    pub s: Option<usize>,
    /// Sparsity grid for the comparison study.
    pub sparsity: Option<Vec<usize>>,
    /// norm_power exponent.
    pub q: Option<f64>,
    /// norm_power dimension.
    pub dim: Option<usize>,
    /// Tukey biweight cutoff.
    pub cutoff: Option<f64>,
    /// Mixture generator parameters.
    pub pi: Option<f64>,
    pub mu0: Option<f64>,
    pub sd0: Option<f64>,
    pub mu1: Option<f64>,
    pub sd1: Option<f64>,
    /// Mixture ball radii.
    pub r0: Option<f64>,
    pub r1: Option<f64>,
}

/// Solver selection and overrides; unset fields fall back to problem-aware
/// defaults (step 1/M_g where the smoothness constant is known).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub algorithm: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub c0: Option<f64>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub inner_tol: Option<f64>,
    pub inner_max_iter: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

/// Parse a config from TOML text. The error message carries the line number
/// (toml renders "at line N, column M" with a snippet).
pub fn parse_config(text: &str) -> anyhow::Result<ExperimentConfig> {
    toml::from_str(text).map_err(|e| anyhow::anyhow!("config parse error: {e}"))
}

pub fn load_config(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in config file {}", path.display()))
}
