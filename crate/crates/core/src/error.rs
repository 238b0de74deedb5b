//! Crate-wide error type aggregating the per-stage errors.

use thiserror::Error;

use crate::data::DataError;
use crate::factors::FactorError;
use crate::inference::InferenceError;
use crate::lab::LabError;
use crate::mallows::MallowsError;
use crate::pipeline::ConfigError;
use crate::projection::ProjectionError;

/// Any error produced by the crate, tagged by the stage that raised it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("data: {0}")]
    Data(#[from] DataError),
    #[error("projection: {0}")]
    Projection(#[from] ProjectionError),
    #[error("mallows: {0}")]
    Mallows(#[from] MallowsError),
    #[error("inference: {0}")]
    Inference(#[from] InferenceError),
    #[error("factors: {0}")]
    Factors(#[from] FactorError),
    #[error("lab: {0}")]
    Lab(#[from] LabError),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, `<stage>.<variant>`.
    pub fn code(&self) -> String {
        match self {
            Error::Data(e) => format!("data.{}", e.code()),
            Error::Projection(e) => format!("projection.{}", e.code()),
            Error::Mallows(e) => format!("mallows.{}", e.code()),
            Error::Inference(e) => format!("inference.{}", e.code()),
            Error::Factors(e) => format!("factors.{}", e.code()),
            Error::Lab(e) => format!("lab.{}", e.code()),
            Error::Config(e) => format!("config.{}", e.code()),
            Error::Io(_) => "io.error".to_string(),
            Error::Csv(_) => "csv.error".to_string(),
            Error::Json(_) => "json.error".to_string(),
        }
    }
}
