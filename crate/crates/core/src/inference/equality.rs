//! Pointwise tests of the averaged response against the baseline (and
//! against zero), evaluated at every (country, period) cell of the common
//! sample with that cell's own regime values.
//!
//! The variance of the contrast comes from the joint coefficient covariance
//! of all candidates plus the baseline, built from stacked influence
//! functions on the shared sample; averaging weights are treated as fixed.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::RegimeVariables;
use crate::projection::irf::marginal_effect;
use crate::projection::{HorizonFit, RegimeContext};

use super::{joint_robust_cov, InferenceError};

/// Per-(country, period) test results for one horizon.
#[derive(Debug, Clone)]
pub struct PointwiseTest {
    pub horizon: usize,
    /// Evaluation cells, aligned with `statistics` and `p_values`.
    pub rows: Vec<(usize, usize)>,
    pub statistics: Vec<f64>,
    pub p_values: Vec<f64>,
}

fn two_sided_p(z: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).unwrap();
    2.0 * (1.0 - normal.cdf(z.abs()))
}

fn run_pointwise(
    candidates: &[&HorizonFit],
    weights: &[f64],
    baseline: Option<&HorizonFit>,
    regimes: &RegimeVariables,
    bandwidth: usize,
) -> Result<PointwiseTest, InferenceError> {
    assert_eq!(candidates.len(), weights.len(), "one weight per candidate");
    let reference = candidates.first().ok_or(InferenceError::EmptyInput)?;
    let horizon = reference.horizon;
    let rows = reference.rows.clone();

    let mut stacked: Vec<&HorizonFit> = candidates.to_vec();
    if let Some(b) = baseline {
        stacked.push(b);
    }
    let joint = joint_robust_cov(&stacked, bandwidth)?;

    let mut statistics = Vec::with_capacity(rows.len());
    let mut p_values = Vec::with_capacity(rows.len());
    for &(ci, pi) in &rows {
        let cell = regimes.cell(ci, pi);
        let (Some(ind_q), Some(ind_a), Some(d_i_q), Some(d_i_a)) =
            (cell.ind_q, cell.ind_a, cell.d_i_q, cell.d_i_a)
        else {
            return Err(InferenceError::MissingRegimeValue {
                country_index: ci,
                period_index: pi,
            });
        };
        let ctx = RegimeContext { ind_q, ind_a, d_i_q, d_i_a };

        // Contrast value and stacked gradient.
        let mut value = 0.0;
        let mut grad: Vec<(usize, f64)> = Vec::new();
        for ((fit, &w), &(offset, _)) in
            candidates.iter().zip(weights).zip(joint.blocks.iter())
        {
            let (me, g) = marginal_effect(fit, &ctx);
            value += w * me;
            for (idx, coef_w) in g {
                grad.push((offset + idx, w * coef_w));
            }
        }
        if let Some(b) = baseline {
            let (offset, _) = joint.blocks[candidates.len()];
            let policy_idx = b
                .column_index(&b.spec.policy)
                .expect("baseline keeps its policy column");
            value -= b.coefficients[policy_idx];
            grad.push((offset + policy_idx, -1.0));
        }

        let mut var = 0.0;
        for &(i, wi) in &grad {
            for &(j, wj) in &grad {
                var += wi * wj * joint.matrix[(i, j)];
            }
        }
        let se = var.max(0.0).sqrt();
        let z = if se > 0.0 {
            value / se
        } else if value == 0.0 {
            0.0
        } else {
            f64::INFINITY * value.signum()
        };
        statistics.push(z);
        p_values.push(two_sided_p(z));
    }
    Ok(PointwiseTest { horizon, rows, statistics, p_values })
}

/// Two-sided test of H0: averaged response − baseline response = 0 at each
/// (country, period) cell.
pub fn equality_test(
    candidates: &[&HorizonFit],
    weights: &[f64],
    baseline: &HorizonFit,
    regimes: &RegimeVariables,
    bandwidth: usize,
) -> Result<PointwiseTest, InferenceError> {
    run_pointwise(candidates, weights, Some(baseline), regimes, bandwidth)
}

/// Two-sided test of H0: averaged response = 0 at each cell.
pub fn zero_test(
    candidates: &[&HorizonFit],
    weights: &[f64],
    regimes: &RegimeVariables,
    bandwidth: usize,
) -> Result<PointwiseTest, InferenceError> {
    run_pointwise(candidates, weights, None, regimes, bandwidth)
}
