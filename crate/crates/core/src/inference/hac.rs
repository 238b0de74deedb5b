//! Panel Newey–West covariance: Bartlett-kernel HAC within each country up
//! to a lag bandwidth, summed across countries, wrapped in the usual
//! sandwich. With bandwidth 0 this collapses to the heteroskedasticity-
//! robust (White) estimator. Local-projection residuals at horizon k are a
//! moving average of order k of the forecast errors, so the default
//! bandwidth equals the horizon.

use nalgebra::DMatrix;

use crate::projection::HorizonFit;

use super::InferenceError;

/// Named robust covariance of one fit's coefficients.
#[derive(Debug, Clone)]
pub struct RobustCov {
    pub names: Vec<String>,
    pub matrix: DMatrix<f64>,
    pub bandwidth: usize,
}

impl RobustCov {
    pub fn se(&self, name: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.matrix[(i, i)].max(0.0).sqrt())
    }
}

/// Joint covariance of several fits' coefficients stacked block-wise, from
/// stacked per-observation influence functions on a shared sample.
#[derive(Debug, Clone)]
pub struct JointCovariance {
    /// (offset, dim) of each fit's block in `matrix`.
    pub blocks: Vec<(usize, usize)>,
    pub matrix: DMatrix<f64>,
    pub bandwidth: usize,
}

/// Bartlett-weighted sum of within-country score autocovariances.
///
/// Lags are measured in actual quarters between rows of the same country,
/// so horizon-induced gaps in the retained sample do not shift the kernel.
fn hac_meat(scores: &DMatrix<f64>, rows: &[(usize, usize)], bandwidth: usize) -> DMatrix<f64> {
    let dim = scores.ncols();
    let mut meat = DMatrix::<f64>::zeros(dim, dim);
    // Lag 0: plain outer-product sum.
    meat.gemm_tr(1.0, scores, scores, 0.0);
    if bandwidth == 0 {
        return meat;
    }
    // Group row indices by country, keyed by period index.
    let mut by_country: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for (r, &(ci, pi)) in rows.iter().enumerate() {
        match by_country.last_mut() {
            Some((c, v)) if *c == ci => v.push((pi, r)),
            _ => by_country.push((ci, vec![(pi, r)])),
        }
    }
    for (_, cells) in &by_country {
        for lag in 1..=bandwidth {
            let w = 1.0 - lag as f64 / (bandwidth as f64 + 1.0);
            for window_start in 0..cells.len() {
                let (pi, r) = cells[window_start];
                // Partner row exactly `lag` quarters earlier.
                let target = pi as i64 - lag as i64;
                if target < 0 {
                    continue;
                }
                if let Ok(j) = cells.binary_search_by_key(&(target as usize), |&(p, _)| p) {
                    let (_, r_prev) = cells[j];
                    let s_t = scores.row(r);
                    let s_p = scores.row(r_prev);
                    for a in 0..dim {
                        for b in 0..dim {
                            let term = s_t[a] * s_p[b];
                            meat[(a, b)] += w * term;
                            meat[(b, a)] += w * term;
                        }
                    }
                }
            }
        }
    }
    meat
}

/// Floor negative eigenvalues at zero, re-symmetrizing first.
fn psd_floor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let mut vals = eig.eigenvalues.clone();
    let mut floored = false;
    for v in vals.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
            floored = true;
        }
    }
    if !floored {
        return sym;
    }
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
}

fn check_bandwidth(rows: &[(usize, usize)], bandwidth: usize) -> Result<(), InferenceError> {
    if bandwidth == 0 {
        return Ok(());
    }
    let mut max_len = 0usize;
    let mut current = 0usize;
    let mut last_country = usize::MAX;
    for &(ci, _) in rows {
        if ci == last_country {
            current += 1;
        } else {
            current = 1;
            last_country = ci;
        }
        max_len = max_len.max(current);
    }
    if bandwidth >= max_len {
        return Err(InferenceError::BandwidthExceedsSample { bandwidth, max_len });
    }
    Ok(())
}

/// Panel Newey–West covariance of one fit.
pub fn robust_cov(fit: &HorizonFit, bandwidth: usize) -> Result<RobustCov, InferenceError> {
    check_bandwidth(&fit.rows, bandwidth)?;
    let dim = fit.dim();
    let mut scores = DMatrix::<f64>::zeros(fit.t_eff, dim);
    for r in 0..fit.t_eff {
        let u = fit.residuals[r];
        for c in 0..dim {
            scores[(r, c)] = fit.x[(r, c)] * u;
        }
    }
    let meat = hac_meat(&scores, &fit.rows, bandwidth);
    let v = &fit.xtx_inv * meat * &fit.xtx_inv;
    Ok(RobustCov { names: fit.names.clone(), matrix: psd_floor(&v), bandwidth })
}

/// Attach a robust covariance to a fit (bandwidth defaults to the horizon).
pub fn with_robust_cov(
    mut fit: HorizonFit,
    bandwidth: Option<usize>,
) -> Result<HorizonFit, InferenceError> {
    let bw = bandwidth.unwrap_or(fit.horizon);
    let cov = robust_cov(&fit, bw)?;
    fit.robust_cov = Some(cov);
    Ok(fit)
}

/// Joint covariance across several fits sharing one sample.
pub fn joint_robust_cov(
    fits: &[&HorizonFit],
    bandwidth: usize,
) -> Result<JointCovariance, InferenceError> {
    let first = fits.first().ok_or(InferenceError::EmptyInput)?;
    for f in fits {
        if f.rows != first.rows {
            return Err(InferenceError::RowMismatch {
                detail: format!(
                    "fit `{}` has {} rows, first fit has {}",
                    f.spec.form,
                    f.rows.len(),
                    first.rows.len()
                ),
            });
        }
    }
    check_bandwidth(&first.rows, bandwidth)?;
    let total: usize = fits.iter().map(|f| f.dim()).sum();
    let n = first.t_eff;
    let mut scores = DMatrix::<f64>::zeros(n, total);
    let mut blocks = Vec::with_capacity(fits.len());
    let mut offset = 0;
    for f in fits {
        blocks.push((offset, f.dim()));
        for r in 0..n {
            let u = f.residuals[r];
            for c in 0..f.dim() {
                scores[(r, offset + c)] = f.x[(r, c)] * u;
            }
        }
        offset += f.dim();
    }
    let meat = hac_meat(&scores, &first.rows, bandwidth);
    // Sandwich with block-diagonal (X'X)^{-1}.
    let mut bread = DMatrix::<f64>::zeros(total, total);
    for (f, &(off, dim)) in fits.iter().zip(&blocks) {
        bread.view_mut((off, off), (dim, dim)).copy_from(&f.xtx_inv);
    }
    let v = &bread * meat * &bread;
    Ok(JointCovariance { blocks, matrix: psd_floor(&v), bandwidth })
}
