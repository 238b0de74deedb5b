//! Synthetic panels with known truth and the Monte Carlo harness that
//! validates the estimators end to end.

mod config;
mod generate;
mod mc;
mod truth;

pub use config::{DgpConfig, FactorSpec, NoiseSpec, SimConfig, SimRunSection};
pub use generate::{generate_dgp, generate_with_stream, GeneratedPanel};
pub use mc::{run_monte_carlo, McOptions, McReport, Replication};
pub use truth::{compute_truth, TruthRecord};

use thiserror::Error;

/// Errors raised by the simulation lab.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LabError {
    #[error("invalid DGP config: {detail}")]
    InvalidConfig { detail: String },
    #[error("need at least 2 replications, got {got}")]
    TooFewReplications { got: usize },
    #[error("{failed} of {total} replications failed (limit 1%)")]
    ExcessiveFailureRate { failed: usize, total: usize },
}

impl LabError {
    pub fn code(&self) -> &'static str {
        match self {
            LabError::InvalidConfig { .. } => "invalid_config",
            LabError::TooFewReplications { .. } => "too_few_replications",
            LabError::ExcessiveFailureRate { .. } => "excessive_failure_rate",
        }
    }
}
