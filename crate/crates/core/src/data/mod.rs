//! Quarterly panel ingestion, validation, and derived regressors.
//!
//! The estimation pipeline ingests *levels* from a wide CSV (one row per
//! country-quarter) and performs every transform internally: 100·log
//! quarterly changes, first differences, interest-rate regime variables,
//! the HP output gap, and merged GDP-forecast anticipation controls.

mod anticipation;
mod hp;
mod load;
mod panel;
mod period;
mod regimes;
mod summary;
mod transform;

pub use anticipation::{load_forecasts, merge_anticipation, ForecastRecord, FORECAST_COLUMN};
pub use hp::{add_output_gap, hp_filter, hp_filter_column, OUTPUT_GAP_COLUMN};
pub use load::{load_panel, ColumnSchema, PanelSchema};
pub use panel::{Column, PanelDataset, Transform};
pub use period::{Period, PeriodRange};
pub use regimes::{attach_regime_columns, build_regimes, RegimeCell, RegimeVariables, REGIME_COLUMNS};
pub use summary::{summary_stats, SummaryRow};
pub use transform::{apply_transforms, diff_series, log_diff_100};

use thiserror::Error;

/// Errors raised while loading or transforming panel data.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum DataError {
    #[error("required column `{column}` not found")]
    MissingColumn { column: String },
    #[error("long-format input detected (columns `variable`/`value`); supply a wide CSV with one row per country-quarter")]
    LongFormat,
    #[error("row {row}: cannot parse period `{value}` (expected YYYY-Qn)")]
    UnparseablePeriod { row: usize, value: String },
    #[error("duplicate row for ({country}, {period})")]
    DuplicateRow { country: String, period: Period },
    #[error("non-finite value in column `{column}` at ({country}, {period})")]
    NonFiniteValue { column: String, country: String, period: Period },
    #[error("non-positive level {value} at {at}; log transforms need strictly positive levels")]
    NonPositiveLevel { at: String, value: f64 },
    #[error("rate column `{column}` not found")]
    MissingRateColumn { column: String },
    #[error("series too short: {len} observations, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },
    #[error("interior missing value at {at}; HP filter needs a gap-free series")]
    InteriorMissing { at: String },
    #[error("smoothing weight must be positive, got {lambda}")]
    InvalidLambda { lambda: f64 },
    #[error("no forecast for ({country}, {period}); need the {edition} edition")]
    MissingForecast { country: String, period: Period, edition: String },
    #[error("invalid panel index: {detail}")]
    BadIndex { detail: String },
}

impl DataError {
    pub fn code(&self) -> &'static str {
        match self {
            DataError::MissingColumn { .. } => "missing_column",
            DataError::LongFormat => "long_format",
            DataError::UnparseablePeriod { .. } => "unparseable_period",
            DataError::DuplicateRow { .. } => "duplicate_row",
            DataError::NonFiniteValue { .. } => "non_finite_value",
            DataError::NonPositiveLevel { .. } => "non_positive_level",
            DataError::MissingRateColumn { .. } => "missing_rate_column",
            DataError::SeriesTooShort { .. } => "series_too_short",
            DataError::InteriorMissing { .. } => "interior_missing",
            DataError::InvalidLambda { .. } => "invalid_lambda",
            DataError::MissingForecast { .. } => "missing_forecast",
            DataError::BadIndex { .. } => "bad_index",
        }
    }
}
