//! Per-horizon local-projection designs, fits, and impulse-response points.

mod design;
mod fit;
pub(crate) mod irf;
mod spec;

pub use design::{
    build_design, build_design_on_rows, candidate_designs, common_rows, CandidateDesigns,
    DesignMatrix,
};
pub use fit::{fit_horizon, fit_projection, HorizonFit, HorizonOutcome, ProjectionResult};
pub use irf::{irf_point, marginal_effect, IrfPoint, RegimeContext, RegimeSpec};
pub use spec::{ModelForm, ModelSpec};

use thiserror::Error;

/// Errors raised while building designs or fitting projections.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProjectionError {
    #[error("column `{column}` not found in panel")]
    MissingVariable { column: String },
    #[error("horizon {k} outside 1..=12")]
    BadHorizon { k: usize },
    #[error("no complete rows for horizon {k}")]
    EmptyDesign { k: usize },
    #[error("policy column `{column}` has zero variance on the estimation sample")]
    AllPolicyVarianceZero { column: String },
    #[error("design is rank deficient after pruning: {detail}")]
    RankDeficientAfterPruning { detail: String },
    #[error("effective sample {t_eff} does not exceed column count {dim}")]
    InsufficientObservations { t_eff: usize, dim: usize },
    #[error("regime descriptor {regime} incompatible with form {form}")]
    RegimeMismatch { form: String, regime: String },
}

impl ProjectionError {
    pub fn code(&self) -> &'static str {
        match self {
            ProjectionError::MissingVariable { .. } => "missing_variable",
            ProjectionError::BadHorizon { .. } => "bad_horizon",
            ProjectionError::EmptyDesign { .. } => "empty_design",
            ProjectionError::AllPolicyVarianceZero { .. } => "all_policy_variance_zero",
            ProjectionError::RankDeficientAfterPruning { .. } => "rank_deficient_after_pruning",
            ProjectionError::InsufficientObservations { .. } => "insufficient_observations",
            ProjectionError::RegimeMismatch { .. } => "regime_mismatch",
        }
    }
}
