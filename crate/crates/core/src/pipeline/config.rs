//! Run configuration: structured key-value text (TOML) mapping onto the
//! pipeline options. Defaults reproduce the baseline setup: four outcomes,
//! three policies, five controls at two dates, horizons 1..12, alpha 0.1,
//! HP lambda 1600, HAC bandwidth equal to the horizon, regime evaluation
//! at pooled sample quartiles.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Transform;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse config: {detail}")]
    Parse { detail: String },
    #[error("missing field `{field}`")]
    MissingField { field: String },
    #[error("bad value for `{field}`: {detail}")]
    BadValue { field: String, detail: String },
    #[error("randomized options (bootstrap, simulation) require an explicit seed")]
    MissingSeed,
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Parse { .. } => "parse",
            ConfigError::MissingField { .. } => "missing_field",
            ConfigError::BadValue { .. } => "bad_value",
            ConfigError::MissingSeed => "missing_seed",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DataSection {
    pub panel: PathBuf,
    #[serde(default)]
    pub forecasts: Option<PathBuf>,
    #[serde(default = "default_rate_column")]
    pub rate_column: String,
}

fn default_rate_column() -> String {
    "stir".into()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ModelSection {
    pub outcomes: Vec<String>,
    pub policies: Vec<String>,
    pub controls: Vec<String>,
    pub horizons: Vec<usize>,
    /// Optional base-period window, e.g. start = "1999-Q1", end = "2010-Q4".
    pub window: Option<WindowSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WindowSection {
    pub start: String,
    pub end: String,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            outcomes: vec!["rgdp".into(), "cpi".into(), "unemp".into(), "reer".into()],
            policies: vec!["rr".into(), "almp".into(), "epl".into()],
            controls: vec![
                "cpi".into(),
                "rgdp".into(),
                "reer".into(),
                "unemp".into(),
                "d_i_q".into(),
            ],
            horizons: (1..=12).collect(),
            window: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct InferenceSection {
    pub alpha: f64,
    /// `"horizon"` or a fixed non-negative integer.
    pub bandwidth: BandwidthRule,
}

impl Default for InferenceSection {
    fn default() -> Self {
        InferenceSection { alpha: 0.1, bandwidth: BandwidthRule::horizon() }
    }
}

/// Either the literal string `"horizon"` or a fixed lag count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BandwidthRule {
    Fixed(usize),
    Named(String),
}

impl BandwidthRule {
    pub const HORIZON: &'static str = "horizon";

    pub fn horizon() -> Self {
        BandwidthRule::Named(Self::HORIZON.into())
    }

    pub fn for_horizon(&self, k: usize) -> usize {
        match self {
            BandwidthRule::Named(_) => k,
            BandwidthRule::Fixed(b) => *b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeEvalMode {
    /// Pooled in-window empirical quartiles of the rate changes.
    SampleQuartiles,
    /// The fixed reference points from `fixed_quartiles`.
    Fixed,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct OptionsSection {
    pub hp_lambda: f64,
    pub regime_eval: RegimeEvalMode,
    /// (lower, upper) quartile override for the quarterly change.
    pub fixed_quartiles_q: (f64, f64),
    /// (lower, upper) quartile override for the annual change.
    pub fixed_quartiles_a: (f64, f64),
    pub anticipation: bool,
    pub output_gap: bool,
    /// Level column feeding the output gap.
    pub output_gap_source: String,
    pub factors: bool,
    pub factor_r_max: usize,
    /// Country-block bootstrap replications for averaged-IRF bands; 0 = off.
    pub bootstrap: usize,
    /// Weight by the leave-one-out criterion instead of the Mallows
    /// criterion.
    pub cv1: bool,
    pub seed: Option<u64>,
    /// Worker threads; 0 keeps the global default.
    pub threads: usize,
}

impl Default for OptionsSection {
    fn default() -> Self {
        OptionsSection {
            hp_lambda: 1600.0,
            regime_eval: RegimeEvalMode::SampleQuartiles,
            fixed_quartiles_q: (-0.40, 0.23),
            fixed_quartiles_a: (-1.35, 0.66),
            anticipation: false,
            output_gap: false,
            output_gap_source: "rgdp".into(),
            factors: false,
            factor_r_max: 4,
            bootstrap: 0,
            cv1: false,
            seed: None,
            threads: 0,
        }
    }
}

/// The full pipeline configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub data: DataSection,
    /// Series to ingest with their transforms; the estimation panel is
    /// built from exactly these plus derived columns.
    pub series: BTreeMap<String, Transform>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub inference: InferenceSection,
    #[serde(default)]
    pub options: OptionsSection,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse { detail: format!("{}: {e}", path.display()) })?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse { detail: e.to_string() })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.series.is_empty() {
            return Err(ConfigError::MissingField { field: "series".into() });
        }
        if self.model.outcomes.is_empty() || self.model.policies.is_empty() {
            return Err(ConfigError::MissingField { field: "model.outcomes/policies".into() });
        }
        if self.model.controls.is_empty() {
            return Err(ConfigError::MissingField { field: "model.controls".into() });
        }
        if self.model.horizons.is_empty()
            || self.model.horizons.iter().any(|&k| !(1..=12).contains(&k))
        {
            return Err(ConfigError::BadValue {
                field: "model.horizons".into(),
                detail: "horizons must be a non-empty subset of 1..=12".into(),
            });
        }
        if !(0.0 < self.inference.alpha && self.inference.alpha < 1.0) {
            return Err(ConfigError::BadValue {
                field: "inference.alpha".into(),
                detail: "alpha must lie in (0, 1)".into(),
            });
        }
        if let BandwidthRule::Named(name) = &self.inference.bandwidth {
            if name != BandwidthRule::HORIZON {
                return Err(ConfigError::BadValue {
                    field: "inference.bandwidth".into(),
                    detail: format!("`{name}` is not a bandwidth rule (use \"horizon\" or an integer)"),
                });
            }
        }
        if self.options.hp_lambda <= 0.0 {
            return Err(ConfigError::BadValue {
                field: "options.hp_lambda".into(),
                detail: "lambda must be positive".into(),
            });
        }
        if !self.series.contains_key(&self.data.rate_column) {
            return Err(ConfigError::BadValue {
                field: "data.rate_column".into(),
                detail: format!("`{}` is not a configured series", self.data.rate_column),
            });
        }
        if self.options.bootstrap > 0 && self.options.seed.is_none() {
            return Err(ConfigError::MissingSeed);
        }
        if self.options.anticipation && self.data.forecasts.is_none() {
            return Err(ConfigError::MissingField { field: "data.forecasts".into() });
        }
        for w in self.model.window.iter() {
            for (field, value) in [("window.start", &w.start), ("window.end", &w.end)] {
                if value.parse::<crate::data::Period>().is_err() {
                    return Err(ConfigError::BadValue {
                        field: field.into(),
                        detail: format!("`{value}` is not YYYY-Qn"),
                    });
                }
            }
        }
        Ok(())
    }

    /// The demo/default configuration over a panel file.
    pub fn default_for(panel: PathBuf) -> Self {
        let mut series = BTreeMap::new();
        for name in ["cpi", "rgdp", "reer", "unemp", "rr", "almp", "epl"] {
            series.insert(name.to_string(), Transform::LogDiff100);
        }
        series.insert("stir".to_string(), Transform::Level);
        RunConfig {
            data: DataSection { panel, forecasts: None, rate_column: "stir".into() },
            series,
            model: ModelSection::default(),
            inference: InferenceSection::default(),
            options: OptionsSection::default(),
        }
    }
}
