//! Experiment runner for location-based beamforming in Rician wiretap
//! channels, built on [`wiretap_core`].
//!
//! The binary `wiretap-lbb` reads a TOML configuration, runs one experiment
//! and writes a self-describing CSV report whose footer reproduces the run.

#![warn(missing_docs)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod experiments;
pub mod plot;
pub mod report;

use std::path::Path;

use config::{ConfigError, ConfigFile, Overrides};
use experiments::Outcome;

/// Substream identifiers shared by the runners and checks. Each consumer of
/// randomness owns a distinct `stream_id` under the run's master seed.
pub mod streams {
    /// Averaged curves; the antenna count is added.
    pub const AVERAGE: u64 = 0x100;
    /// Representative single main-channel draws; the antenna count is added.
    pub const SINGLE_H: u64 = 0x200;
    /// Random-search oracle; the antenna count is added.
    pub const ORACLE: u64 = 0x300;
    /// Empirical CDF samples; the antenna count is added.
    pub const CDF: u64 = 0x400;
    /// Angle-of-arrival invariance runs.
    pub const PHI: u64 = 0x500;
    /// Random configurations for structural invariants.
    pub const INVARIANTS: u64 = 0x600;
    /// Location-uncertainty averaging.
    pub const UNCERTAINTY: u64 = 0x700;

    /// Monte Carlo outage at the `k`-th validation `τ` for `n_alice` antennas.
    pub fn empirical(n_alice: usize, k: usize) -> u64 {
        0x1_0000 + ((n_alice as u64) << 8) + k as u64
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// Success.
    Ok = 0,
    /// Bad configuration, unreadable input or unwritable output.
    Config = 2,
    /// Numerical or geometric degeneracy.
    Numeric = 3,
    /// A validation check failed.
    Validation = 4,
}

/// Failure of a run, mapped onto an exit status.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// Configuration problem.
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    /// Input or output failure.
    #[error("{0}")]
    Io(String),
    /// Error raised by the numerical core.
    #[error("numerical error: {0}")]
    Numeric(#[from] wiretap_core::Error),
}

impl RunError {
    /// Exit status for this error.
    pub fn exit(&self) -> Exit {
        match self {
            RunError::Config(_) | RunError::Io(_) => Exit::Config,
            RunError::Numeric(_) => Exit::Numeric,
        }
    }
}

/// Applies overrides, resolves the configuration and runs the experiment.
/// `text` is the original file contents, used for line numbers in errors.
pub fn run_config(
    file: ConfigFile,
    text: &str,
    overrides: &Overrides,
) -> Result<(ConfigFile, Outcome), RunError> {
    let file = file.with_overrides(overrides);
    let cfg = file.resolve(text)?;
    let outcome = experiments::run(&cfg, file.to_footer_toml())?;
    Ok((file, outcome))
}

/// Reruns the experiment recorded in a report footer.
pub fn rerun_report(path: &Path) -> Result<Outcome, RunError> {
    let parsed = report::read_report(path).map_err(RunError::Io)?;
    let file = config::parse(&parsed.config_toml)?;
    Ok(run_config(file, &parsed.config_toml, &Overrides::default())?.1)
}

/// Runs `f` on a pool of `workers` threads, or on the global pool when `None`.
pub fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, RunError> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(RunError::Io("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| RunError::Io(format!("cannot start {n} worker threads: {e}"))),
    }
}
