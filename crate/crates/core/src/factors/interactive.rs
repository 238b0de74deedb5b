//! Alternating least squares / principal components for models with a
//! multi-factor error structure.
//!
//! Given a factor count r, the estimator alternates (a) least squares of
//! the defactored outcome on the regressors given (F, Λ) and (b) principal
//! components of the N×T residual panel given the coefficients, until the
//! relative SSR change falls below 1e-9 or 500 iterations. Each half-step
//! is an exact minimization, so the SSR path never increases. Five random
//! factor initializations plus a PCA-of-OLS-residuals start guard against
//! bad local minima; the best SSR wins, ties to the earlier start.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{least_squares, prune_columns, PRUNE_TOL};
use crate::projection::{DesignMatrix, HorizonFit};

use super::FactorError;

const MAX_ITERATIONS: usize = 500;
const SSR_REL_TOL: f64 = 1e-9;
const RANDOM_STARTS: usize = 5;

/// Interactive-fixed-effects estimate for one (model, horizon).
#[derive(Debug, Clone)]
pub struct FactorFit {
    /// Coefficients on the balanced sample; `fit.residuals` are the
    /// defactored residuals y − Xβ − (ΛF')_{it}.
    pub fit: HorizonFit,
    /// T×r common factors, normalized so F'F/T = I_r.
    pub factors: DMatrix<f64>,
    /// N×r loadings; Λ'Λ is diagonal under the same normalization.
    pub loadings: DMatrix<f64>,
    pub r: usize,
    /// SSR after each full alternation of the winning start.
    pub ssr_path: Vec<f64>,
    pub converged: bool,
    /// Cells excluded to balance the residual panel.
    pub dropped_cells: Vec<(usize, usize)>,
    /// Country indices backing the loading rows.
    pub grid_countries: Vec<usize>,
    /// Period indices backing the factor rows.
    pub grid_periods: Vec<usize>,
}

impl FactorFit {
    pub fn ssr(&self) -> f64 {
        *self.ssr_path.last().expect("non-empty path")
    }

    pub fn iterations(&self) -> usize {
        self.ssr_path.len()
    }
}

/// The balanced (complete-rectangle) restriction of a design's row set.
pub(crate) struct BalancedGrid {
    pub countries: Vec<usize>,
    pub periods: Vec<usize>,
    /// Row indices into the design, country-major then period order.
    pub design_rows: Vec<usize>,
    pub dropped_cells: Vec<(usize, usize)>,
}

pub(crate) fn balance_rows(rows: &[(usize, usize)]) -> Result<BalancedGrid, FactorError> {
    let mut countries: Vec<usize> = rows.iter().map(|&(ci, _)| ci).collect();
    countries.sort_unstable();
    countries.dedup();
    // Periods present for every country.
    let mut periods: Vec<usize> = rows
        .iter()
        .filter(|&&(ci, _)| ci == countries[0])
        .map(|&(_, pi)| pi)
        .collect();
    for &c in &countries[1..] {
        let have: Vec<usize> =
            rows.iter().filter(|&&(ci, _)| ci == c).map(|&(_, pi)| pi).collect();
        periods.retain(|p| have.binary_search(p).is_ok());
    }
    periods.sort_unstable();
    if periods.is_empty() {
        return Err(FactorError::Unbalanced {
            detail: "no period is observed for every country".into(),
        });
    }
    let mut index = std::collections::HashMap::new();
    for (r, &cell) in rows.iter().enumerate() {
        index.insert(cell, r);
    }
    let mut design_rows = Vec::with_capacity(countries.len() * periods.len());
    for &c in &countries {
        for &p in &periods {
            design_rows.push(*index.get(&(c, p)).expect("balanced cell exists"));
        }
    }
    let kept: std::collections::HashSet<(usize, usize)> = countries
        .iter()
        .flat_map(|&c| periods.iter().map(move |&p| (c, p)))
        .collect();
    let dropped_cells: Vec<(usize, usize)> =
        rows.iter().copied().filter(|cell| !kept.contains(cell)).collect();
    Ok(BalancedGrid { countries, periods, design_rows, dropped_cells })
}

/// Top-r principal components of the N×T panel W: returns (loadings Λ,
/// factors F, SSR of the rank-r residual), normalized so F'F/T = I_r.
fn principal_components(w: &DMatrix<f64>, r: usize) -> (DMatrix<f64>, DMatrix<f64>, f64) {
    let n = w.nrows();
    let t = w.ncols();
    let total = w.norm_squared();
    if r == 0 {
        return (DMatrix::zeros(n, 0), DMatrix::zeros(t, 0), total);
    }
    let small_is_n = n <= t;
    let s = if small_is_n { w * w.transpose() } else { w.transpose() * w };
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut lambda = DMatrix::<f64>::zeros(n, r);
    let mut factors = DMatrix::<f64>::zeros(t, r);
    let mut captured = 0.0;
    let tf = t as f64;
    for j in 0..r.min(order.len()) {
        let mu = eig.eigenvalues[order[j]].max(0.0);
        let mut v = eig.eigenvectors.column(order[j]).into_owned();
        // Deterministic sign: largest-magnitude entry positive.
        let mut arg = 0;
        for i in 0..v.len() {
            if v[i].abs() > v[arg].abs() {
                arg = i;
            }
        }
        if v[arg] < 0.0 {
            v = -v;
        }
        if mu <= 1e-300 {
            continue; // rank exhausted; leave zero columns
        }
        captured += mu;
        let sigma = mu.sqrt();
        if small_is_n {
            // v is a left singular vector (length N).
            lambda.column_mut(j).copy_from(&(&v * (sigma / tf.sqrt())));
            factors.column_mut(j).copy_from(&(w.transpose() * &v * (tf.sqrt() / sigma)));
        } else {
            // v is a right singular vector (length T).
            factors.column_mut(j).copy_from(&(&v * tf.sqrt()));
            lambda.column_mut(j).copy_from(&(w * &v / tf.sqrt()));
        }
    }
    (lambda, factors, (total - captured).max(0.0))
}

struct StartResult {
    beta: DVector<f64>,
    lambda: DMatrix<f64>,
    factors: DMatrix<f64>,
    ssr_path: Vec<f64>,
    converged: bool,
}

fn run_alternation(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    xtx_inv: &DMatrix<f64>,
    n: usize,
    t: usize,
    r: usize,
    init: (DMatrix<f64>, DMatrix<f64>),
) -> StartResult {
    let (mut lambda, mut factors) = init;
    let mut beta = DVector::<f64>::zeros(x.ncols());
    let mut ssr_path = Vec::new();
    let mut converged = false;
    let mut prev = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        // (a) least squares on the defactored outcome.
        let mut defactored = y.clone();
        for i in 0..n {
            for s in 0..t {
                let mut fac = 0.0;
                for j in 0..r {
                    fac += lambda[(i, j)] * factors[(s, j)];
                }
                defactored[i * t + s] -= fac;
            }
        }
        beta = xtx_inv * (x.tr_mul(&defactored));
        // (b) principal components of the residual panel.
        let resid = y - x * &beta;
        let mut w = DMatrix::<f64>::zeros(n, t);
        for i in 0..n {
            for s in 0..t {
                w[(i, s)] = resid[i * t + s];
            }
        }
        let (l, f, ssr) = principal_components(&w, r);
        lambda = l;
        factors = f;
        debug_assert!(
            ssr <= prev * (1.0 + 1e-9) + 1e-9,
            "alternation SSR increased: {prev} -> {ssr}"
        );
        ssr_path.push(ssr);
        // Relative SSR change, with an absolute floor so exact-fit panels
        // (SSR at rounding level) terminate too.
        if ssr <= 1e-18 || (prev.is_finite() && (prev - ssr).abs() <= SSR_REL_TOL * prev) {
            converged = true;
            break;
        }
        prev = ssr;
    }
    StartResult { beta, lambda, factors, ssr_path, converged }
}

/// Estimate the interactive-fixed-effects model on a design's rows.
///
/// The residual panel must be balanced; rows outside the largest balanced
/// rectangle are excluded and reported in `dropped_cells`. With r = 0 the
/// estimate is the plain least-squares fit on the balanced rows.
pub fn estimate_interactive(design: &DesignMatrix, r: usize) -> Result<FactorFit, FactorError> {
    let grid = balance_rows(&design.rows)?;
    let n = grid.countries.len();
    let t = grid.periods.len();
    if r > 0 && (r >= n || r >= t) {
        return Err(FactorError::Degenerate {
            detail: format!("r = {r} with balanced panel {n} x {t}"),
        });
    }

    // Rebuild the regression on the balanced rows; re-prune because the
    // restriction can introduce new collinearity (for instance a dummy for
    // a country that lost all its rows).
    let x_full = design.x.select_rows(grid.design_rows.iter());
    let y = DVector::<f64>::from_fn(grid.design_rows.len(), |i, _| design.y[grid.design_rows[i]]);
    let (retained, dropped_idx) = prune_columns(&x_full, PRUNE_TOL);
    let x = x_full.select_columns(&retained);
    let names: Vec<String> = retained.iter().map(|&c| design.names[c].clone()).collect();
    let mut dropped = design.dropped.clone();
    dropped.extend(dropped_idx.iter().map(|&c| design.names[c].clone()));
    let rows: Vec<(usize, usize)> =
        grid.design_rows.iter().map(|&ri| design.rows[ri]).collect();

    let base = least_squares(&x, &y).ok_or_else(|| FactorError::Degenerate {
        detail: "balanced design is rank deficient after pruning".into(),
    })?;

    let make_fit = |beta: DVector<f64>, residuals: DVector<f64>, df_used: usize| {
        let denom = rows.len().saturating_sub(df_used);
        let sigma2_ols = if denom > 0 {
            residuals.norm_squared() / denom as f64
        } else {
            f64::NAN
        };
        HorizonFit {
            spec: design.spec.clone(),
            horizon: design.horizon,
            names: names.clone(),
            coefficients: beta,
            residuals,
            rows: rows.clone(),
            x: x.clone(),
            xtx_inv: base.xtx_inv.clone(),
            sigma2_ols,
            t_eff: rows.len(),
            dropped: dropped.clone(),
            robust_cov: None,
        }
    };

    if r == 0 {
        let ssr = base.ssr;
        let fit = make_fit(base.beta.clone(), base.residuals.clone(), x.ncols());
        return Ok(FactorFit {
            fit,
            factors: DMatrix::zeros(t, 0),
            loadings: DMatrix::zeros(n, 0),
            r: 0,
            ssr_path: vec![ssr],
            converged: true,
            dropped_cells: grid.dropped_cells,
            grid_countries: grid.countries,
            grid_periods: grid.periods,
        });
    }

    // Multi-start: PCA of the OLS residual panel, then random orthonormal
    // factor starts with fixed per-start seeds.
    let mut best: Option<(usize, StartResult)> = None;
    for start in 0..=RANDOM_STARTS {
        let init = if start == 0 {
            let mut w = DMatrix::<f64>::zeros(n, t);
            for i in 0..n {
                for s in 0..t {
                    w[(i, s)] = base.residuals[i * t + s];
                }
            }
            let (l, f, _) = principal_components(&w, r);
            (l, f)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0xFAC7_0000 + start as u64);
            let raw = DMatrix::<f64>::from_fn(t, r, |_, _| StandardNormal.sample(&mut rng));
            let qr = raw.qr();
            let q = qr.q();
            let f = &q * (t as f64).sqrt();
            // Loadings implied by the OLS residual panel.
            let mut w = DMatrix::<f64>::zeros(n, t);
            for i in 0..n {
                for s in 0..t {
                    w[(i, s)] = base.residuals[i * t + s];
                }
            }
            let l = &w * &f / t as f64;
            (l, f)
        };
        let result = run_alternation(&x, &y, &base.xtx_inv, n, t, r, init);
        let better = match &best {
            None => true,
            Some((_, b)) => {
                result.ssr_path.last().unwrap() < b.ssr_path.last().unwrap()
            }
        };
        if better {
            best = Some((start, result));
        }
    }
    let (_, winner) = best.expect("at least one start");

    // Defactored residuals of the winning iterate.
    let resid = {
        let mut out = &y - &x * &winner.beta;
        for i in 0..n {
            for s in 0..t {
                let mut fac = 0.0;
                for j in 0..r {
                    fac += winner.lambda[(i, j)] * winner.factors[(s, j)];
                }
                out[i * t + s] -= fac;
            }
        }
        out
    };
    let converged = winner.converged;
    let ssr_path = winner.ssr_path.clone();
    let fit = make_fit(winner.beta, resid, x.ncols() + r);
    Ok(FactorFit {
        fit,
        factors: winner.factors,
        loadings: winner.lambda,
        r,
        ssr_path,
        converged,
        dropped_cells: grid.dropped_cells,
        grid_countries: grid.countries,
        grid_periods: grid.periods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::{build_design, fit_horizon, ModelForm, ModelSpec};
    use approx::assert_relative_eq;
    use rand::Rng;

    /// Balanced synthetic panel design with an optional planted factor
    /// structure in the outcome.
    fn synthetic_design(
        n: usize,
        t: usize,
        r_true: usize,
        loading_scale: f64,
        noise: f64,
        seed: u64,
    ) -> (DesignMatrix, Vec<f64>) {
        use crate::data::{build_regimes, Column, PanelDataset, Period, Transform};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p0 = Period::new(1990, 1);
        let np = t + 3;
        let periods: Vec<Period> = (0..np as i64).map(|k| p0.offset(k)).collect();
        let countries: Vec<String> = (0..n).map(|c| format!("C{c:02}")).collect();
        let mut pol = vec![None; n * np];
        let mut ctrl = vec![None; n * np];
        let mut out = vec![None; n * np];
        let mut stir = vec![None; n * np];
        let beta_pol = 1.5;
        let beta_ctrl = -0.75;
        let factors: Vec<Vec<f64>> = (0..r_true)
            .map(|_| (0..np).map(|_| rng.random_range(-1.0f64..1.0) * 1.732).collect())
            .collect();
        let loadings: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..r_true).map(|_| rng.random_range(-1.0f64..1.0) * loading_scale).collect())
            .collect();
        for ci in 0..n {
            for pi in 0..np {
                let p: f64 = rng.random_range(-1.0..1.0);
                let c: f64 = rng.random_range(-1.0..1.0);
                pol[ci * np + pi] = Some(p);
                ctrl[ci * np + pi] = Some(c);
                stir[ci * np + pi] = Some(3.0 + ((ci * 5 + pi) as f64 * 0.77).sin());
            }
        }
        for ci in 0..n {
            for pi in 0..np - 1 {
                let p = pol[ci * np + pi].unwrap();
                let c = ctrl[ci * np + pi].unwrap();
                let mut fac = 0.0;
                for j in 0..r_true {
                    fac += loadings[ci][j] * factors[j][pi + 1];
                }
                let e: f64 = rng.random_range(-1.0f64..1.0) * noise;
                out[ci * np + pi + 1] = Some(beta_pol * p + beta_ctrl * c + fac + e);
            }
        }
        let panel = PanelDataset::new(
            countries,
            periods,
            vec![
                Column { name: "out".into(), transform: Transform::Level, values: out },
                Column { name: "pol".into(), transform: Transform::Level, values: pol },
                Column { name: "ctrl".into(), transform: Transform::Level, values: ctrl },
                Column { name: "stir".into(), transform: Transform::Level, values: stir },
            ],
        )
        .unwrap();
        let regimes = build_regimes(&panel, "stir").unwrap();
        let mut spec = ModelSpec::new(ModelForm::Baseline, "out", "pol", vec!["ctrl".into()]);
        spec.include_fixed_effects = false;
        let design = build_design(&panel, &regimes, &spec, 1, None).unwrap();
        (design, vec![beta_pol, beta_ctrl])
    }

    #[test]
    fn r_zero_equals_plain_fit_exactly() {
        let (design, _) = synthetic_design(6, 40, 0, 0.0, 0.5, 11);
        let plain = fit_horizon(design.clone()).unwrap();
        let factor = estimate_interactive(&design, 0).unwrap();
        // Balanced grid keeps every row here, so the fits must agree bit
        // for bit.
        assert_eq!(factor.fit.t_eff, plain.t_eff);
        assert_eq!(factor.fit.coefficients, plain.coefficients);
        assert_eq!(factor.fit.residuals, plain.residuals);
    }

    #[test]
    fn noiseless_factor_structure_is_reproduced_exactly() {
        let (design, _) = synthetic_design(8, 50, 2, 1.5, 0.0, 23);
        let fit = estimate_interactive(&design, 2).unwrap();
        assert!(fit.converged);
        assert!(fit.ssr() < 1e-16, "ssr {}", fit.ssr());
    }

    #[test]
    fn recovers_coefficients_with_strong_factors() {
        let (design, truth) = synthetic_design(10, 80, 2, 2.0, 0.3, 37);
        let fit = estimate_interactive(&design, 2).unwrap();
        let b_pol = fit.fit.coef("pol").unwrap();
        let b_ctrl = fit.fit.coef("ctrl").unwrap();
        assert!((b_pol - truth[0]).abs() < 0.05, "pol {b_pol}");
        assert!((b_ctrl - truth[1]).abs() < 0.05, "ctrl {b_ctrl}");
    }

    #[test]
    fn ssr_path_is_monotone_and_normalization_holds() {
        let (design, _) = synthetic_design(7, 60, 2, 1.0, 0.8, 91);
        let fit = estimate_interactive(&design, 3).unwrap();
        for w in fit.ssr_path.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-9, "path not monotone: {w:?}");
        }
        let t = fit.factors.nrows() as f64;
        let gram = fit.factors.tr_mul(&fit.factors) / t;
        for i in 0..fit.r {
            for j in 0..fit.r {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(gram[(i, j)], want, epsilon = 1e-8);
            }
        }
        let ll = fit.loadings.tr_mul(&fit.loadings);
        for i in 0..fit.r {
            for j in 0..fit.r {
                if i != j {
                    assert!(ll[(i, j)].abs() < 1e-8, "loadings not orthogonal");
                }
            }
        }
    }

    #[test]
    fn factor_space_is_stable_across_reruns() {
        let (design, _) = synthetic_design(9, 70, 2, 2.0, 0.4, 53);
        let a = estimate_interactive(&design, 2).unwrap();
        let b = estimate_interactive(&design, 2).unwrap();
        // Projector FF'/T must match between runs that land on the same SSR.
        let t = a.factors.nrows() as f64;
        let pa = &a.factors * a.factors.transpose() / t;
        let pb = &b.factors * b.factors.transpose() / t;
        assert_relative_eq!(pa, pb, epsilon = 1e-8);
    }

    #[test]
    fn unbalanced_rows_are_dropped_and_reported() {
        // Take a clean design and remove one country's early outcome cells.
        let (design, _) = synthetic_design(5, 30, 0, 0.0, 0.5, 7);
        let mut rows = design.rows.clone();
        let removed: Vec<(usize, usize)> =
            rows.iter().copied().filter(|&(ci, pi)| ci == 2 && pi < 8).collect();
        rows.retain(|&(ci, pi)| !(ci == 2 && pi < 8));
        let mut d = design.clone();
        let keep_idx: Vec<usize> = design
            .rows
            .iter()
            .enumerate()
            .filter(|(_, cell)| !removed.contains(cell))
            .map(|(i, _)| i)
            .collect();
        d.x = design.x.select_rows(keep_idx.iter());
        d.y = DVector::from_fn(keep_idx.len(), |i, _| design.y[keep_idx[i]]);
        d.rows = rows;
        let fit = estimate_interactive(&d, 1).unwrap();
        // Dropped cells are exactly the other countries' rows at the
        // periods country 2 lost.
        assert!(!fit.dropped_cells.is_empty());
        for &(_, pi) in &fit.dropped_cells {
            assert!(fit.grid_periods.binary_search(&pi).is_err());
        }
    }
}
