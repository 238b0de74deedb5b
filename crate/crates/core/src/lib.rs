//! Panel local projections with Mallows model averaging.
//!
//! `lpma` estimates horizon-by-horizon impulse responses of macroeconomic
//! outcomes to labor-market policy changes on a quarterly country panel. Six
//! candidate regressions differ in how the interest-rate environment interacts
//! with the policy variable; per-horizon Mallows weights combine them into an
//! averaged impulse response, and an equality test asks whether the monetary
//! environment changes the response path at all.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`data`] — panel ingestion, transforms, regime variables, HP filter,
//!   anticipation controls, summary statistics.
//! - [`projection`] — per-horizon design matrices, least-squares fits, and
//!   regime-conditional impulse-response points.
//! - [`mallows`] — the simplex-constrained quadratic program for model
//!   weights, the leave-one-out alternative, and averaged responses.
//! - [`inference`] — panel HAC covariances, the averaged-vs-baseline equality
//!   test, and multiple-testing adjustments with whole-path verdicts.
//! - [`factors`] — interactive fixed effects (iterative least squares +
//!   principal components) with data-driven factor counts.
//! - [`lab`] — synthetic data generation with known truth and the Monte Carlo
//!   harness used to validate every estimator.
//! - [`pipeline`] — the config-driven front end that ties the stages together
//!   and writes the plot-ready output bundle.

pub mod data;
pub mod error;
pub mod factors;
pub mod inference;
pub mod lab;
pub(crate) mod linalg;
pub mod mallows;
pub mod pipeline;
pub mod projection;

pub use error::Error;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Output schema version stamped into `run.json`.
pub const SCHEMA_VERSION: &str = "1";
