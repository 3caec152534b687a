//! Experiment harness: configuration, seeded noise, forward datasets,
//! parameter sweeps and inequality checks, driven by the `issp` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod lemmas;
pub mod noise;
pub mod pipeline;
pub mod report;

use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};

use commands::{command, Outcome, RunContext};
use pipeline::Experiment;

/// Command line values that override the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    /// Raw `key=value` pairs.
    pub set: Vec<String>,
}

/// Reads the file (if any) and applies overrides; the result is validated.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut pairs = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?;
            config::parse_pairs(&text)?
        }
        None => Default::default(),
    };
    for s in &overrides.set {
        let (k, v) = config::parse_override(s)?;
        pairs.insert(k, v);
    }
    if let Some(seed) = overrides.seed {
        pairs.insert("seed".into(), seed.to_string());
    }
    if let Some(out) = &overrides.out {
        pairs.insert("out".into(), out.display().to_string());
    }
    if let Some(jobs) = overrides.jobs {
        pairs.insert("jobs".into(), jobs.to_string());
    }
    ExperimentConfig::from_pairs(&pairs)
}

/// Runs a registered command inside a worker pool of `config.jobs` threads.
pub fn run(name: &str, config: ExperimentConfig, emit_plot_script: bool) -> Result<Outcome> {
    let cmd = command(name)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = config.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    pool.install(|| {
        let ctx = RunContext { experiment: Experiment::new(config)?, emit_plot_script };
        cmd.run(&ctx)
    })
}
