//! Experiment runner: reads a TOML config, runs one registered experiment
//! and returns its artifacts as bytes. The `pullbound` binary adds argument
//! parsing, the worker pool and file output on top.

mod artifact;
pub mod config;
pub mod experiments;

use thiserror::Error;

pub use artifact::{Artifact, Outcome};
pub use experiments::{registry, Experiment, ExperimentRegistry};

pub const TOOL_VERSION: &str = concat!("pullbound ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid configuration, or bad invocation.
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] pullbound::Error),
    /// A dominance precondition failed and `--force` was not given.
    #[error("dominance check refused: {0}")]
    Refused(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Refused(_) => 3,
        }
    }
}

/// Invocation overrides applied on top of the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub seed: Option<u64>,
    /// Run even when a dominance precondition fails.
    pub force: bool,
}

/// Runs experiment `name` on the config text. Parallel work uses the
/// current rayon pool.
pub fn run(name: &str, config_text: &str, options: Options) -> Result<Outcome, CliError> {
    let reg = registry();
    let experiment = reg.get(name).ok_or_else(|| {
        CliError::Config(format!(
            "unknown experiment `{name}` (known: {})",
            reg.names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    experiment.run(config_text, options)
}
