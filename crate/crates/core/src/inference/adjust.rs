//! Multiple-testing adjustments and whole-path verdicts.

use serde::{Deserialize, Serialize};

use super::InferenceError;

/// Supported p-value adjustment methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjustMethod {
    /// min(1, m·p), controls FWER under any dependence.
    Bonferroni,
    /// Step-down Bonferroni, uniformly more powerful.
    Holm,
    /// Step-up FDR control valid under arbitrary dependence, with the
    /// harmonic factor c(m) = Σ_{j≤m} 1/j.
    BenjaminiYekutieli,
}

impl AdjustMethod {
    pub const ALL: [AdjustMethod; 3] =
        [AdjustMethod::Bonferroni, AdjustMethod::Holm, AdjustMethod::BenjaminiYekutieli];

    pub fn label(&self) -> &'static str {
        match self {
            AdjustMethod::Bonferroni => "bonferroni",
            AdjustMethod::Holm => "holm",
            AdjustMethod::BenjaminiYekutieli => "benjamini_yekutieli",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "bonferroni" => Some(AdjustMethod::Bonferroni),
            "holm" => Some(AdjustMethod::Holm),
            "benjamini_yekutieli" | "by" => Some(AdjustMethod::BenjaminiYekutieli),
            _ => None,
        }
    }
}

fn check_pvalues(pvals: &[f64]) -> Result<(), InferenceError> {
    for &p in pvals {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(InferenceError::OutOfRangeP { value: p });
        }
    }
    Ok(())
}

/// Adjusted p-values in the original order.
pub fn adjust_pvalues(pvals: &[f64], method: AdjustMethod) -> Result<Vec<f64>, InferenceError> {
    check_pvalues(pvals)?;
    let m = pvals.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mf = m as f64;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].partial_cmp(&pvals[b]).unwrap());
    let mut adjusted = vec![0.0; m];
    match method {
        AdjustMethod::Bonferroni => {
            for i in 0..m {
                adjusted[i] = (mf * pvals[i]).min(1.0);
            }
        }
        AdjustMethod::Holm => {
            // Step-down: running maximum over (m-j)·p_(j).
            let mut running = 0.0f64;
            for (j, &idx) in order.iter().enumerate() {
                let val = ((mf - j as f64) * pvals[idx]).min(1.0);
                running = running.max(val);
                adjusted[idx] = running;
            }
        }
        AdjustMethod::BenjaminiYekutieli => {
            let c: f64 = (1..=m).map(|j| 1.0 / j as f64).sum();
            // Step-up: running minimum from the largest p downwards.
            let mut running = 1.0f64;
            for (j, &idx) in order.iter().enumerate().rev() {
                let val = (c * mf * pvals[idx] / (j as f64 + 1.0)).min(1.0);
                running = running.min(val);
                adjusted[idx] = running;
            }
        }
    }
    Ok(adjusted)
}

/// Fraction of p-values strictly above `alpha` (the accepted share).
pub fn acceptance_proportion(pvals: &[f64], alpha: f64) -> Result<f64, InferenceError> {
    if pvals.is_empty() {
        return Err(InferenceError::EmptyInput);
    }
    check_pvalues(pvals)?;
    let accepted = pvals.iter().filter(|&&p| p > alpha).count();
    Ok(accepted as f64 / pvals.len() as f64)
}

/// Whole-path verdict of the equality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IrfVerdict {
    Different,
    NotDifferent,
}

impl IrfVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            IrfVerdict::Different => "different",
            IrfVerdict::NotDifferent => "not_different",
        }
    }
}

/// Verdict plus the rejection counts it was based on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictDetail {
    pub verdict: IrfVerdict,
    pub rejections: usize,
    pub horizons: usize,
    /// At least one adjusted rejection anywhere on the path.
    pub any_rejection: bool,
}

/// Majority rule over the adjusted per-horizon p-values: the response path
/// is `Different` only when rejections exceed half the horizons (strictly;
/// 6 of 12 is not a majority).
pub fn irf_verdict(adjusted: &[f64], alpha: f64) -> VerdictDetail {
    let rejections = adjusted.iter().filter(|&&p| p <= alpha).count();
    let horizons = adjusted.len();
    VerdictDetail {
        verdict: if 2 * rejections > horizons {
            IrfVerdict::Different
        } else {
            IrfVerdict::NotDifferent
        },
        rejections,
        horizons,
        any_rejection: rejections > 0,
    }
}
