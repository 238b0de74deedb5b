//! Weighted averaging of per-model impulse responses.

use crate::inference::{joint_robust_cov, InferenceError};
use crate::projection::irf::marginal_effect;
use crate::projection::{HorizonFit, IrfPoint, ModelForm, RegimeContext};

use super::{CandidateSet, MallowsError, MallowsWeights};

/// A named evaluation point shared by every model: the regime label that
/// appears in output tables plus concrete regime-variable values.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeScenario {
    pub label: String,
    pub ctx: RegimeContext,
}

impl RegimeScenario {
    /// Loosening: indicators on, rate changes at the lower quartile values.
    pub fn loosening(d_i_q: f64, d_i_a: f64) -> Self {
        RegimeScenario {
            label: "loosening".into(),
            ctx: RegimeContext { ind_q: 1.0, ind_a: 1.0, d_i_q, d_i_a },
        }
    }

    /// Tightening: indicators off, rate changes at the upper quartile values.
    pub fn tightening(d_i_q: f64, d_i_a: f64) -> Self {
        RegimeScenario {
            label: "tightening".into(),
            ctx: RegimeContext { ind_q: 0.0, ind_a: 0.0, d_i_q, d_i_a },
        }
    }
}

/// One averaged impulse-response point with its per-model companions.
#[derive(Debug, Clone)]
pub struct AveragedPoint {
    pub horizon: usize,
    pub regime: String,
    pub value: f64,
    /// Delta-method SE conditional on the weights; `None` when no
    /// covariance was requested.
    pub se: Option<f64>,
    pub per_model: Vec<(ModelForm, f64)>,
    /// Per-model delta-method SEs, aligned with `per_model`.
    pub per_model_se: Option<Vec<f64>>,
}

/// Averaged impulse responses across horizons and regime scenarios.
#[derive(Debug, Clone, Default)]
pub struct AveragedIrf {
    pub points: Vec<AveragedPoint>,
}

/// Convex combination of per-model points that already share a horizon and
/// regime. The companion per-model values are kept alongside.
pub fn combine_points(
    weights: &MallowsWeights,
    points: &[(ModelForm, IrfPoint)],
    regime_label: &str,
) -> Result<AveragedPoint, MallowsError> {
    if points.len() != weights.forms.len() {
        return Err(MallowsError::ModelSetMismatch {
            detail: format!("{} points vs {} weights", points.len(), weights.forms.len()),
        });
    }
    let mut value = 0.0;
    let mut per_model = Vec::with_capacity(points.len());
    for (form, point) in points {
        let w = weights.weight(*form).ok_or_else(|| MallowsError::ModelSetMismatch {
            detail: format!("model {form} has no weight"),
        })?;
        if point.horizon != weights.horizon {
            return Err(MallowsError::ModelSetMismatch {
                detail: format!(
                    "point horizon {} vs weights horizon {}",
                    point.horizon, weights.horizon
                ),
            });
        }
        value += w * point.value;
        per_model.push((*form, point.value));
    }
    Ok(AveragedPoint {
        horizon: weights.horizon,
        regime: regime_label.to_string(),
        value,
        se: None,
        per_model,
        per_model_se: None,
    })
}

/// Averaged point at a scenario with a delta-method SE from the joint
/// coefficient covariance of all candidates (weights held fixed).
pub fn averaged_point_with_se(
    cand: &CandidateSet,
    weights: &MallowsWeights,
    scenario: &RegimeScenario,
    bandwidth: usize,
) -> Result<AveragedPoint, InferenceError> {
    let refs: Vec<&HorizonFit> = cand.fits.iter().collect();
    let joint = joint_robust_cov(&refs, bandwidth)?;
    let mut value = 0.0;
    let mut grad: Vec<(usize, f64)> = Vec::new();
    let mut per_model = Vec::with_capacity(cand.fits.len());
    let mut per_model_se = Vec::with_capacity(cand.fits.len());
    for ((fit, form), &(offset, _)) in
        cand.fits.iter().zip(&cand.forms).zip(joint.blocks.iter())
    {
        let w = weights.weight(*form).unwrap_or(0.0);
        let (me, g) = marginal_effect(fit, &scenario.ctx);
        value += w * me;
        per_model.push((*form, me));
        let mut own_var = 0.0;
        for &(i, wi) in &g {
            for &(j, wj) in &g {
                own_var += wi * wj * joint.matrix[(offset + i, offset + j)];
            }
        }
        per_model_se.push(own_var.max(0.0).sqrt());
        for (idx, coef_w) in g {
            grad.push((offset + idx, w * coef_w));
        }
    }
    let mut var = 0.0;
    for &(i, wi) in &grad {
        for &(j, wj) in &grad {
            var += wi * wj * joint.matrix[(i, j)];
        }
    }
    Ok(AveragedPoint {
        horizon: cand.horizon,
        regime: scenario.label.clone(),
        value,
        se: Some(var.max(0.0).sqrt()),
        per_model,
        per_model_se: Some(per_model_se),
    })
}
