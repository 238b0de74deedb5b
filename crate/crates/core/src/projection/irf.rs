//! Regime-conditional impulse-response points.
//!
//! The marginal effect of a 1% policy increase depends on the form:
//! Baseline is the policy coefficient alone; A–D add one interaction term
//! evaluated at the regime; E combines a sign indicator with the size of
//! the rate change.

use serde::{Deserialize, Serialize};

use super::{HorizonFit, ModelForm, ProjectionError};

/// Where the response is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegimeSpec {
    /// Negative rate change (indicator = 1).
    Loosening,
    /// Non-negative rate change (indicator = 0).
    Tightening,
    /// A specific rate-change value (Models C/D).
    AtValue(f64),
    /// Indicator and value together (Model E).
    Combined { loosening: bool, value: f64 },
}

impl std::fmt::Display for RegimeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegimeSpec::Loosening => write!(f, "loosening"),
            RegimeSpec::Tightening => write!(f, "tightening"),
            RegimeSpec::AtValue(x) => write!(f, "at_value({x})"),
            RegimeSpec::Combined { loosening, value } => {
                write!(f, "combined({}, {value})", if *loosening { "loosening" } else { "tightening" })
            }
        }
    }
}

/// Concrete regime-variable values at an evaluation point. This is the
/// common currency that lets every form evaluate its own marginal effect
/// at the same point, e.g. at an observed (country, period) cell.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RegimeContext {
    pub ind_q: f64,
    pub ind_a: f64,
    pub d_i_q: f64,
    pub d_i_a: f64,
}

/// One point of the impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct IrfPoint {
    pub horizon: usize,
    pub regime: RegimeSpec,
    /// Marginal effect of a 1% policy increase.
    pub value: f64,
    /// Delta-method standard error; `None` when no covariance is attached.
    pub se: Option<f64>,
}

/// Translate a regime descriptor into concrete regime values for `form`.
pub(crate) fn context_for(
    form: ModelForm,
    regime: &RegimeSpec,
) -> Result<RegimeContext, ProjectionError> {
    let mismatch = || ProjectionError::RegimeMismatch {
        form: form.label().to_string(),
        regime: regime.to_string(),
    };
    let mut ctx = RegimeContext::default();
    match (form, regime) {
        (ModelForm::Baseline, _) => {}
        (ModelForm::A | ModelForm::B, RegimeSpec::Loosening) => {
            ctx.ind_q = 1.0;
            ctx.ind_a = 1.0;
        }
        (ModelForm::A | ModelForm::B, RegimeSpec::Tightening) => {}
        (ModelForm::C, RegimeSpec::AtValue(x)) => ctx.d_i_q = *x,
        (ModelForm::D, RegimeSpec::AtValue(x)) => ctx.d_i_a = *x,
        (ModelForm::E, RegimeSpec::Loosening) => ctx.ind_q = 1.0,
        (ModelForm::E, RegimeSpec::Tightening) => {}
        (ModelForm::E, RegimeSpec::Combined { loosening, value }) => {
            ctx.ind_q = if *loosening { 1.0 } else { 0.0 };
            ctx.d_i_q = *value;
        }
        _ => return Err(mismatch()),
    }
    Ok(ctx)
}

/// Marginal effect of the policy at `ctx` plus its sparse gradient over the
/// fit's coefficient vector (column index, weight). Interaction columns
/// pruned at design time contribute zero.
pub fn marginal_effect(fit: &HorizonFit, ctx: &RegimeContext) -> (f64, Vec<(usize, f64)>) {
    let policy = &fit.spec.policy;
    let mut grad: Vec<(usize, f64)> = Vec::new();
    let mut push = |name: String, weight: f64| {
        if let Some(idx) = fit.column_index(&name) {
            grad.push((idx, weight));
        }
    };
    push(policy.clone(), 1.0);
    match fit.spec.form {
        ModelForm::Baseline => {}
        ModelForm::A => push(format!("{policy}:ind_q"), ctx.ind_q),
        ModelForm::B => push(format!("{policy}:ind_a"), ctx.ind_a),
        ModelForm::C => push(format!("{policy}:d_i_q"), ctx.d_i_q),
        ModelForm::D => push(format!("{policy}:d_i_a"), ctx.d_i_a),
        ModelForm::E => {
            push(format!("{policy}:ind_q"), ctx.ind_q);
            push(format!("{policy}:d_i_q"), ctx.d_i_q);
            push(format!("{policy}:d_i_q:ind_q"), ctx.d_i_q * ctx.ind_q);
        }
    }
    let value = grad.iter().map(|&(i, w)| w * fit.coefficients[i]).sum();
    (value, grad)
}

/// Evaluate one impulse-response point, with a delta-method standard error
/// when the fit carries a robust covariance.
pub fn irf_point(fit: &HorizonFit, regime: &RegimeSpec) -> Result<IrfPoint, ProjectionError> {
    let ctx = context_for(fit.spec.form, regime)?;
    let (value, grad) = marginal_effect(fit, &ctx);
    let se = fit.robust_cov.as_ref().map(|cov| {
        let mut var = 0.0;
        for &(i, wi) in &grad {
            for &(j, wj) in &grad {
                var += wi * wj * cov.matrix[(i, j)];
            }
        }
        var.max(0.0).sqrt()
    });
    Ok(IrfPoint { horizon: fit.horizon, regime: *regime, value, se })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::{ModelSpec, ProjectionError};
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};

    /// Hand-built fit with the given coefficient names/values.
    fn synthetic_fit(form: ModelForm, coefs: &[(&str, f64)]) -> HorizonFit {
        let names: Vec<String> = coefs.iter().map(|(n, _)| n.to_string()).collect();
        let values: Vec<f64> = coefs.iter().map(|(_, v)| *v).collect();
        let dim = names.len();
        let mut spec = ModelSpec::new(form, "out", "pol", vec!["c".into()]);
        spec.include_fixed_effects = false;
        HorizonFit {
            spec,
            horizon: 1,
            names,
            coefficients: DVector::from_vec(values),
            residuals: DVector::zeros(4),
            rows: (0..4).map(|i| (0, i)).collect(),
            x: DMatrix::zeros(4, dim),
            xtx_inv: DMatrix::identity(dim, dim),
            sigma2_ols: 1.0,
            t_eff: 4,
            dropped: vec![],
            robust_cov: None,
        }
    }

    #[test]
    fn model_a_loosening_sums_interaction() {
        let fit = synthetic_fit(ModelForm::A, &[("pol", 0.5), ("pol:ind_q", -0.2)]);
        let p = irf_point(&fit, &RegimeSpec::Loosening).unwrap();
        assert_relative_eq!(p.value, 0.3, epsilon = 1e-12);
        let p = irf_point(&fit, &RegimeSpec::Tightening).unwrap();
        assert_relative_eq!(p.value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn model_c_at_first_quartile() {
        // Evaluated at the quarterly first-quartile change of -0.40 p.p.
        let fit = synthetic_fit(ModelForm::C, &[("pol", 0.5), ("pol:d_i_q", 0.1)]);
        let p = irf_point(&fit, &RegimeSpec::AtValue(-0.40)).unwrap();
        assert_relative_eq!(p.value, 0.46, epsilon = 1e-12);
    }

    #[test]
    fn model_e_with_zero_interactions_collapses_to_policy_coefficient() {
        let fit = synthetic_fit(
            ModelForm::E,
            &[("pol", 0.7), ("pol:ind_q", 0.0), ("pol:d_i_q", 0.0), ("pol:d_i_q:ind_q", 0.0)],
        );
        for regime in [
            RegimeSpec::Loosening,
            RegimeSpec::Tightening,
            RegimeSpec::Combined { loosening: true, value: -1.3 },
            RegimeSpec::Combined { loosening: false, value: 0.8 },
        ] {
            let p = irf_point(&fit, &regime).unwrap();
            assert_eq!(p.value, 0.7);
        }
    }

    #[test]
    fn baseline_is_regime_invariant() {
        let fit = synthetic_fit(ModelForm::Baseline, &[("pol", 0.42)]);
        let a = irf_point(&fit, &RegimeSpec::Loosening).unwrap().value;
        let b = irf_point(&fit, &RegimeSpec::AtValue(3.0)).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn regime_mismatch_is_rejected() {
        let fit = synthetic_fit(ModelForm::A, &[("pol", 0.5), ("pol:ind_q", -0.2)]);
        let err = irf_point(&fit, &RegimeSpec::AtValue(1.0)).unwrap_err();
        assert!(matches!(err, ProjectionError::RegimeMismatch { .. }));
        let fit_c = synthetic_fit(ModelForm::C, &[("pol", 0.5), ("pol:d_i_q", 0.1)]);
        assert!(irf_point(&fit_c, &RegimeSpec::Loosening).is_err());
    }
}
