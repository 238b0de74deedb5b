//! Data-generating-process configuration.

use serde::{Deserialize, Serialize};

use crate::projection::ModelForm;

use super::LabError;

/// Error-term specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    /// i.i.d. normal with the given variance.
    Iid { sigma2: f64 },
    /// Moving average of i.i.d. normal innovations.
    Ma { sigma2: f64, theta: Vec<f64> },
    /// Country-specific variances on a linear gradient:
    /// sd_i = sigma·(1 + spread·(i/(N−1) − 1/2)).
    Heteroskedastic { sigma2: f64, spread: f64 },
}

impl NoiseSpec {
    pub fn base_sigma2(&self) -> f64 {
        match self {
            NoiseSpec::Iid { sigma2 }
            | NoiseSpec::Ma { sigma2, .. }
            | NoiseSpec::Heteroskedastic { sigma2, .. } => *sigma2,
        }
    }
}

/// Common-factor block added to the error term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub r: usize,
    /// Standard deviation of the loadings; factors are i.i.d. N(0, 1).
    pub loading_scale: f64,
}

/// Everything that pins down one synthetic panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    pub true_form: ModelForm,
    pub delta1: f64,
    /// Coefficient on the lagged policy change.
    pub delta2: f64,
    /// Interaction coefficient (forms A-E).
    pub delta3: f64,
    /// Model E only: coefficient on policy × rate change.
    pub delta4: f64,
    /// Model E only: coefficient on the triple interaction.
    pub delta5: f64,
    /// Contemporaneous control coefficients; length = number of controls.
    pub beta: Vec<f64>,
    /// Lagged control coefficients; must match `beta` in length.
    pub gamma: Vec<f64>,
    /// Per-country intercepts; length = n_countries.
    pub alpha: Vec<f64>,
    pub n_countries: usize,
    pub n_periods: usize,
    pub noise: NoiseSpec,
    pub factors: Option<FactorSpec>,
    /// AR(1) for the quarterly interest-rate change.
    pub rate_rho: f64,
    pub rate_sigma: f64,
    /// AR(1) for the policy change.
    pub policy_rho: f64,
    pub policy_sigma: f64,
    /// AR(1) for each control.
    pub control_rho: f64,
    pub control_sigma: f64,
    pub seed: u64,
}

impl DgpConfig {
    /// A small well-behaved configuration, meant to be adjusted per
    /// experiment.
    pub fn baseline(true_form: ModelForm, n_countries: usize, n_periods: usize, seed: u64) -> Self {
        DgpConfig {
            true_form,
            delta1: 1.0,
            delta2: 0.3,
            delta3: -0.5,
            delta4: 0.0,
            delta5: 0.0,
            beta: vec![0.5, -0.3],
            gamma: vec![0.2, 0.1],
            alpha: (0..n_countries).map(|i| (i as f64 - n_countries as f64 / 2.0) * 0.1).collect(),
            n_countries,
            n_periods,
            noise: NoiseSpec::Iid { sigma2: 1.0 },
            factors: None,
            rate_rho: 0.4,
            rate_sigma: 0.5,
            policy_rho: 0.0,
            policy_sigma: 1.0,
            control_rho: 0.5,
            control_sigma: 1.0,
            seed,
        }
    }

    pub fn n_controls(&self) -> usize {
        self.beta.len()
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |detail: &str| LabError::InvalidConfig { detail: detail.to_string() };
        if self.n_countries == 0 || self.n_periods < 12 {
            return Err(bad("need at least one country and 12 periods"));
        }
        if self.beta.len() != self.gamma.len() {
            return Err(bad("beta and gamma must have equal length"));
        }
        if self.alpha.len() != self.n_countries {
            return Err(bad("alpha must list one intercept per country"));
        }
        for (name, rho) in
            [("rate", self.rate_rho), ("policy", self.policy_rho), ("control", self.control_rho)]
        {
            if rho.abs() >= 1.0 {
                return Err(LabError::InvalidConfig {
                    detail: format!("{name} AR(1) coefficient {rho} is not stationary"),
                });
            }
        }
        if self.noise.base_sigma2() <= 0.0 {
            return Err(bad("noise variance must be positive"));
        }
        if let NoiseSpec::Heteroskedastic { spread, .. } = self.noise {
            if !(0.0..2.0).contains(&spread) {
                return Err(bad("heteroskedastic spread must lie in [0, 2)"));
            }
        }
        if self.rate_sigma <= 0.0 || self.policy_sigma <= 0.0 || self.control_sigma <= 0.0 {
            return Err(bad("innovation scales must be positive"));
        }
        if let Some(f) = &self.factors {
            if f.r > 0 && f.loading_scale <= 0.0 {
                return Err(bad("factor loading scale must be positive when r > 0"));
            }
        }
        Ok(())
    }
}

/// A whole simulation experiment: the DGP plus run options, as read from
/// the `simulate` subcommand's config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub dgp: DgpConfig,
    #[serde(default)]
    pub run: SimRunSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimRunSection {
    pub replications: usize,
    pub horizons: Vec<usize>,
    pub alpha: f64,
    pub equality_test: bool,
    pub factor_r_max: Option<usize>,
    pub cv1: bool,
    pub truth_draws: usize,
    /// Worker threads; 0 keeps the global default.
    pub threads: usize,
}

impl Default for SimRunSection {
    fn default() -> Self {
        SimRunSection {
            replications: 100,
            horizons: vec![1],
            alpha: 0.1,
            equality_test: false,
            factor_r_max: None,
            cv1: false,
            truth_draws: 10_000,
            threads: 0,
        }
    }
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self, LabError> {
        let config: SimConfig = toml::from_str(text)
            .map_err(|e| LabError::InvalidConfig { detail: e.to_string() })?;
        config.dgp.validate()?;
        if config.run.replications < 2 {
            return Err(LabError::TooFewReplications { got: config.run.replications });
        }
        if config.run.horizons.is_empty()
            || config.run.horizons.iter().any(|&k| !(1..=12).contains(&k))
        {
            return Err(LabError::InvalidConfig {
                detail: "run.horizons must be a non-empty subset of 1..=12".into(),
            });
        }
        Ok(config)
    }
}
