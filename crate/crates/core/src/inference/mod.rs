//! Robust covariance estimation, the averaged-vs-baseline equality test,
//! and multiple-testing adjustments with whole-path verdicts.

mod adjust;
mod equality;
mod hac;
mod report;

pub use adjust::{
    acceptance_proportion, adjust_pvalues, irf_verdict, AdjustMethod, IrfVerdict, VerdictDetail,
};
pub use equality::{equality_test, zero_test, PointwiseTest};
pub use hac::{joint_robust_cov, robust_cov, with_robust_cov, JointCovariance, RobustCov};
pub use report::{build_test_report, HorizonTests, MethodReport, TestReport};

use thiserror::Error;

/// Errors raised by covariance estimation or testing.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum InferenceError {
    #[error("bandwidth {bandwidth} not below the longest within-country sample {max_len}")]
    BandwidthExceedsSample { bandwidth: usize, max_len: usize },
    #[error("regime value missing at country index {country_index}, period index {period_index}")]
    MissingRegimeValue { country_index: usize, period_index: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("p-value {value} outside [0, 1]")]
    OutOfRangeP { value: f64 },
    #[error("fits must share an identical row set: {detail}")]
    RowMismatch { detail: String },
}

impl InferenceError {
    pub fn code(&self) -> &'static str {
        match self {
            InferenceError::BandwidthExceedsSample { .. } => "bandwidth_exceeds_sample",
            InferenceError::MissingRegimeValue { .. } => "missing_regime_value",
            InferenceError::EmptyInput => "empty_input",
            InferenceError::OutOfRangeP { .. } => "out_of_range_p",
            InferenceError::RowMismatch { .. } => "row_mismatch",
        }
    }
}
