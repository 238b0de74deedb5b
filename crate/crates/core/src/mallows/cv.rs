//! Leave-one-out cross-validation weighting, the robustness alternative to
//! the Mallows penalty.

use nalgebra::DMatrix;

use crate::projection::HorizonFit;

use super::{solve_weights_qp, CandidateSet, MallowsError, MallowsWeights};

/// Exact leave-one-out residuals via the hat-matrix identity
/// ũ_t = û_t / (1 − h_tt). Rows with leverage numerically 1 are an error.
pub fn loo_residuals(fit: &HorizonFit) -> Result<Vec<f64>, MallowsError> {
    let leverages = fit.leverages();
    let mut out = Vec::with_capacity(fit.t_eff);
    for (row, (&u, &h)) in fit.residuals.iter().zip(&leverages).enumerate() {
        if h >= 1.0 - 1e-10 {
            return Err(MallowsError::LeverageOne { row });
        }
        out.push(u / (1.0 - h));
    }
    Ok(out)
}

/// CV1(w) = (1/T)·Σ_t (Σ_m w_m ũ_t(m))².
pub fn cv1_criterion(w: &[f64], loo: &DMatrix<f64>) -> Result<f64, MallowsError> {
    if w.len() != loo.ncols() {
        return Err(MallowsError::DimensionMismatch { got: w.len(), want: loo.ncols() });
    }
    let t = loo.nrows() as f64;
    let mut acc = 0.0;
    for r in 0..loo.nrows() {
        let mut combined = 0.0;
        for (j, &wj) in w.iter().enumerate() {
            combined += wj * loo[(r, j)];
        }
        acc += combined * combined;
    }
    Ok(acc / t)
}

/// Minimize CV1 over the simplex; same solver as the Mallows criterion
/// with a zero penalty vector.
pub fn solve_cv1_weights(cand: &CandidateSet) -> Result<MallowsWeights, MallowsError> {
    if cand.is_empty() {
        return Err(MallowsError::EmptyCandidateSet);
    }
    let t = cand.t_eff();
    let mut loo = DMatrix::<f64>::zeros(t, cand.len());
    for (m, fit) in cand.fits.iter().enumerate() {
        let u = loo_residuals(fit)?;
        for r in 0..t {
            loo.column_mut(m)[r] = u[r];
        }
    }
    let a = loo.tr_mul(&loo) / t as f64;
    let b = vec![0.0; cand.len()];
    let (weights, _, solver, singular_supports) = solve_weights_qp(&a, &b, &cand.dims)?;
    let criterion_value = cv1_criterion(&weights, &loo)?;
    let active_set = cand
        .forms
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(f, _)| *f)
        .collect();
    Ok(MallowsWeights {
        horizon: cand.horizon,
        forms: cand.forms.clone(),
        weights,
        criterion_value,
        active_set,
        solver,
        singular_supports,
        sigma2_degenerate: cand.sigma2_degenerate,
    })
}
