//! Least-squares fitting of per-horizon designs.

use nalgebra::{DMatrix, DVector};

use crate::data::{PanelDataset, PeriodRange, RegimeVariables};
use crate::inference::RobustCov;
use crate::linalg::least_squares;

use super::{build_design, DesignMatrix, ModelSpec, ProjectionError};

/// Least-squares output for one (outcome, policy, model, horizon).
#[derive(Debug, Clone)]
pub struct HorizonFit {
    pub spec: ModelSpec,
    pub horizon: usize,
    /// Retained column names, aligned with `coefficients` and `x` columns.
    pub names: Vec<String>,
    pub coefficients: DVector<f64>,
    /// Residuals aligned with `rows`.
    pub residuals: DVector<f64>,
    pub rows: Vec<(usize, usize)>,
    /// Retained design matrix (needed for HAC scores and leverages).
    pub x: DMatrix<f64>,
    pub xtx_inv: DMatrix<f64>,
    /// SSR / (T_eff − dim).
    pub sigma2_ols: f64,
    pub t_eff: usize,
    pub dropped: Vec<String>,
    /// Panel Newey–West covariance, attached by the inference stage.
    pub robust_cov: Option<RobustCov>,
}

impl HorizonFit {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Coefficient by column name; `None` when the column was pruned.
    pub fn coef(&self, name: &str) -> Option<f64> {
        self.column_index(name).map(|i| self.coefficients[i])
    }

    pub fn ssr(&self) -> f64 {
        self.residuals.norm_squared()
    }

    /// Hat-matrix diagonal h_tt = x_t' (X'X)^{-1} x_t per row.
    pub fn leverages(&self) -> Vec<f64> {
        let n = self.t_eff;
        let mut h = Vec::with_capacity(n);
        for r in 0..n {
            let xr = self.x.row(r).transpose();
            h.push((xr.transpose() * &self.xtx_inv * &xr)[(0, 0)]);
        }
        h
    }
}

/// Solve the least-squares problem of a built design.
pub fn fit_horizon(design: DesignMatrix) -> Result<HorizonFit, ProjectionError> {
    let dim = design.dim();
    let t_eff = design.t_eff();
    if t_eff <= dim {
        return Err(ProjectionError::InsufficientObservations { t_eff, dim });
    }
    let ls = least_squares(&design.x, &design.y).ok_or_else(|| {
        ProjectionError::RankDeficientAfterPruning {
            detail: format!("horizon {} design with {} columns", design.horizon, dim),
        }
    })?;
    let sigma2_ols = ls.ssr / (t_eff - dim) as f64;
    Ok(HorizonFit {
        spec: design.spec,
        horizon: design.horizon,
        names: design.names,
        coefficients: ls.beta,
        residuals: ls.residuals,
        rows: design.rows,
        x: design.x,
        xtx_inv: ls.xtx_inv,
        sigma2_ols,
        t_eff,
        dropped: design.dropped,
        robust_cov: None,
    })
}

/// Per-horizon fits for one model over a horizon set.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub fits: Vec<HorizonFit>,
    /// Horizons whose design was empty or too small, reported rather than
    /// silently skipped.
    pub failures: Vec<HorizonOutcome>,
}

#[derive(Debug, Clone)]
pub struct HorizonOutcome {
    pub horizon: usize,
    pub error: ProjectionError,
}

/// Fit one model at every requested horizon inside an optional window.
pub fn fit_projection(
    panel: &PanelDataset,
    regimes: &RegimeVariables,
    spec: &ModelSpec,
    horizons: &[usize],
    window: Option<&PeriodRange>,
) -> Result<ProjectionResult, ProjectionError> {
    let mut fits = Vec::new();
    let mut failures = Vec::new();
    for &k in horizons {
        match build_design(panel, regimes, spec, k, window).and_then(fit_horizon) {
            Ok(fit) => fits.push(fit),
            Err(
                e @ (ProjectionError::EmptyDesign { .. }
                | ProjectionError::InsufficientObservations { .. }),
            ) => failures.push(HorizonOutcome { horizon: k, error: e }),
            Err(other) => return Err(other),
        }
    }
    Ok(ProjectionResult { fits, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve_dense;
    use crate::projection::design::tests::{base_spec, test_panel};
    use crate::projection::ModelForm;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn exact_relation_recovers_unit_coefficient() {
        // y = x with a single regressor: coefficient 1, zero residuals.
        let x = DMatrix::from_fn(20, 1, |i, _| (i as f64 + 1.0) * 0.5);
        let y = DVector::from_fn(20, |i, _| (i as f64 + 1.0) * 0.5);
        let design = DesignMatrix {
            spec: base_spec(),
            horizon: 1,
            rows: (0..20).map(|i| (0usize, i)).collect(),
            y,
            x,
            names: vec!["pol".into()],
            dropped: vec![],
        };
        let fit = fit_horizon(design).unwrap();
        assert_relative_eq!(fit.coef("pol").unwrap(), 1.0, epsilon = 1e-12);
        assert!(fit.residuals.amax() < 1e-12);
    }

    #[test]
    fn coefficients_match_normal_equations_oracle() {
        let (panel, regimes) = test_panel(5, 60);
        let design = build_design(&panel, &regimes, &base_spec(), 1, None).unwrap();
        let xtx = design.x.tr_mul(&design.x);
        let xty = design.x.tr_mul(&design.y);
        let oracle = solve_dense(&xtx, &xty).unwrap();
        let fit = fit_horizon(design).unwrap();
        assert_relative_eq!(fit.coefficients, oracle, epsilon = 1e-8);
    }

    #[test]
    fn duplicated_column_is_pruned_and_fit_unchanged() {
        let (panel, regimes) = test_panel(4, 50);
        // Register the policy twice as a control: exact duplicate column.
        let mut spec = base_spec();
        spec.controls.push("pol".into());
        let design = build_design(&panel, &regimes, &spec, 1, None).unwrap();
        assert!(!design.dropped.is_empty());
        let fit = fit_horizon(design).unwrap();
        let plain = fit_horizon(build_design(&panel, &regimes, &base_spec(), 1, None).unwrap())
            .unwrap();
        // Same fitted values as the clean design.
        let fitted_a = &fit.x * &fit.coefficients;
        let fitted_b = &plain.x * &plain.coefficients;
        assert_relative_eq!(fitted_a, fitted_b, epsilon = 1e-8);
    }

    #[test]
    fn residuals_orthogonal_to_design() {
        let (panel, regimes) = test_panel(6, 48);
        for form in [ModelForm::Baseline, ModelForm::A, ModelForm::E] {
            let fit = fit_horizon(
                build_design(&panel, &regimes, &base_spec().with_form(form), 2, None).unwrap(),
            )
            .unwrap();
            // Standardize columns before checking max |X'u|/T.
            for c in 0..fit.x.ncols() {
                let col = fit.x.column(c);
                let sd = (col.norm_squared() / fit.t_eff as f64).sqrt().max(1e-12);
                let dot: f64 = col.dot(&fit.residuals);
                assert!((dot / sd / fit.t_eff as f64).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn projection_reports_undersized_horizons() {
        let (panel, regimes) = test_panel(2, 16);
        let horizons: Vec<usize> = (1..=12).collect();
        let res = fit_projection(&panel, &regimes, &base_spec(), &horizons, None).unwrap();
        assert_eq!(res.fits.len() + res.failures.len(), 12);
        assert!(!res.failures.is_empty());
    }

    #[test]
    fn twelve_horizons_fit_on_long_panel() {
        let (panel, regimes) = test_panel(5, 80);
        let horizons: Vec<usize> = (1..=12).collect();
        let res = fit_projection(&panel, &regimes, &base_spec(), &horizons, None).unwrap();
        assert_eq!(res.fits.len(), 12);
        assert!(res.failures.is_empty());
    }
}
