//! Interactive fixed effects: iterative least squares + principal
//! components on the residual panel, with data-driven factor counts.

mod interactive;
mod pipeline;
mod select;

pub use interactive::{estimate_interactive, FactorFit};
pub use pipeline::{averaged_irf_with_factors, FactorDiagnostics, FactorHorizonResult};
pub use select::{select_factor_number, FactorSelection};

use thiserror::Error;

/// Errors raised by the factor engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FactorError {
    #[error("no balanced sub-panel: {detail}")]
    Unbalanced { detail: String },
    #[error("r_max {r_max} exceeds min(N, T)/2 = {limit}")]
    RMaxTooLarge { r_max: usize, limit: usize },
    #[error("factor estimation degenerate: {detail}")]
    Degenerate { detail: String },
}

impl FactorError {
    pub fn code(&self) -> &'static str {
        match self {
            FactorError::Unbalanced { .. } => "unbalanced",
            FactorError::RMaxTooLarge { .. } => "r_max_too_large",
            FactorError::Degenerate { .. } => "degenerate",
        }
    }
}
