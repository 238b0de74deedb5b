//! Config-driven front end: run the full estimation pipeline and emit the
//! plot-ready output bundle (`irf.csv`, `weights.csv`, `tests.csv`,
//! `summary.csv`, `run.json`, plus `factors.csv` when the factor branch
//! is on).

mod config;
mod output;
mod run;

pub use config::{
    BandwidthRule, ConfigError, DataSection, InferenceSection, ModelSection, OptionsSection,
    RegimeEvalMode, RunConfig, WindowSection,
};
pub use output::{FactorRow, IrfRow, TestRow, WeightRow};
pub use run::{
    compute_artifacts, export_fits, run_pipeline, write_artifact, CoefRow, PipelineArtifacts,
    RunSummary,
};
