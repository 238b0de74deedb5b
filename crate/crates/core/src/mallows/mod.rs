//! Per-horizon Mallows weights over the candidate models and averaged
//! impulse responses.

mod average;
mod candidate;
mod criterion;
mod cv;
mod solver;

pub use average::{averaged_point_with_se, combine_points, AveragedIrf, AveragedPoint, RegimeScenario};
pub use candidate::{estimate_sigma2, CandidateSet};
pub use criterion::mallows_criterion;
pub use cv::{cv1_criterion, loo_residuals, solve_cv1_weights};
pub use solver::{solve_weights, solve_weights_qp, MallowsWeights, SolverKind};

use thiserror::Error;

/// Errors raised while weighting candidate models.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MallowsError {
    #[error("no candidate models supplied")]
    EmptyCandidateSet,
    #[error("degrees of freedom not positive: T_eff {t_eff} <= dim {dim}")]
    NonPositiveDf { t_eff: usize, dim: usize },
    #[error("weight vector has {got} entries, candidate set has {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("candidate fits must share one sample: {detail}")]
    MismatchedSamples { detail: String },
    #[error("leverage of row {row} is numerically 1; leave-one-out residual undefined")]
    LeverageOne { row: usize },
    #[error("solver produced weight {value}, below the -1e-12 tolerance")]
    NegativeWeight { value: f64 },
    #[error("model sets do not match: {detail}")]
    ModelSetMismatch { detail: String },
}

impl MallowsError {
    pub fn code(&self) -> &'static str {
        match self {
            MallowsError::EmptyCandidateSet => "empty_candidate_set",
            MallowsError::NonPositiveDf { .. } => "non_positive_df",
            MallowsError::DimensionMismatch { .. } => "dimension_mismatch",
            MallowsError::MismatchedSamples { .. } => "mismatched_samples",
            MallowsError::LeverageOne { .. } => "leverage_one",
            MallowsError::NegativeWeight { .. } => "negative_weight",
            MallowsError::ModelSetMismatch { .. } => "model_set_mismatch",
        }
    }
}
