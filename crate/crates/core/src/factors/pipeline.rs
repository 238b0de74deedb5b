//! Mallows averaging on defactored fits.

use crate::data::{PanelDataset, PeriodRange, RegimeVariables};
use crate::mallows::{
    averaged_point_with_se, solve_weights, AveragedPoint, CandidateSet, MallowsWeights,
    RegimeScenario,
};
use crate::projection::{build_design_on_rows, common_rows, ModelForm, ModelSpec};
use crate::Result;

use super::interactive::balance_rows;

/// Per-(horizon, model) factor diagnostics, the content of `factors.csv`.
#[derive(Debug, Clone)]
pub struct FactorDiagnostics {
    pub horizon: usize,
    pub model: ModelForm,
    pub r: usize,
    pub ssr: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Weights and averaged points for one horizon under the factor pipeline.
#[derive(Debug, Clone)]
pub struct FactorHorizonResult {
    pub weights: MallowsWeights,
    pub points: Vec<AveragedPoint>,
    pub diagnostics: Vec<FactorDiagnostics>,
    /// Factor count chosen per candidate, in candidate order.
    pub selected_r: Vec<usize>,
}

/// Factor-aware averaging for one horizon: per-candidate interactive
/// estimation with integrated factor-count selection, Mallows weights on
/// the defactored residuals with dims augmented by the factor counts, and
/// averaged responses at the given scenarios.
///
/// All candidates share one balanced sample (the largest complete
/// country × period rectangle inside the common complete-case rows), so
/// the residual comparison stays like-for-like.
pub fn averaged_irf_with_factors(
    panel: &PanelDataset,
    regimes: &RegimeVariables,
    base: &ModelSpec,
    k: usize,
    r_max: usize,
    scenarios: &[RegimeScenario],
    bandwidth: usize,
    window: Option<&PeriodRange>,
) -> Result<FactorHorizonResult> {
    let rows = common_rows(panel, regimes, base, k, window)?;
    let grid = balance_rows(&rows)?;
    let balanced_rows: Vec<(usize, usize)> =
        grid.design_rows.iter().map(|&ri| rows[ri]).collect();

    let mut fits = Vec::with_capacity(ModelForm::CANDIDATES.len());
    let mut extra_dims = Vec::with_capacity(ModelForm::CANDIDATES.len());
    let mut diagnostics = Vec::with_capacity(ModelForm::CANDIDATES.len());
    for form in ModelForm::CANDIDATES {
        let spec = base.with_form(form);
        let design = build_design_on_rows(panel, regimes, &spec, k, balanced_rows.clone())?;
        let selection = super::select_factor_number(&design, r_max)?;
        diagnostics.push(FactorDiagnostics {
            horizon: k,
            model: form,
            r: selection.r,
            ssr: selection.best.ssr(),
            iterations: selection.best.iterations(),
            converged: selection.best.converged,
        });
        extra_dims.push(selection.r);
        fits.push((form, selection.best.fit));
    }
    let selected_r = extra_dims.clone();
    let cand = CandidateSet::from_fits(fits, Some(&extra_dims))?;
    let weights = solve_weights(&cand)?;
    let mut points = Vec::with_capacity(scenarios.len());
    for scenario in scenarios {
        points.push(averaged_point_with_se(&cand, &weights, scenario, bandwidth)?);
    }
    Ok(FactorHorizonResult { weights, points, diagnostics, selected_r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_regimes, Column, PanelDataset, Period, Transform};
    use crate::projection::candidate_designs;
    use crate::projection::fit_horizon;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn factorless_panel(n: usize, np: usize, seed: u64) -> (PanelDataset, RegimeVariables) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p0 = Period::new(1990, 1);
        let periods: Vec<Period> = (0..np as i64).map(|k| p0.offset(k)).collect();
        let countries: Vec<String> = (0..n).map(|c| format!("C{c:02}")).collect();
        let mut pol = vec![None; n * np];
        let mut ctrl = vec![None; n * np];
        let mut out = vec![None; n * np];
        let mut stir = vec![None; n * np];
        for ci in 0..n {
            for pi in 0..np {
                pol[ci * np + pi] = Some(rng.random_range(-1.0..1.0));
                ctrl[ci * np + pi] = Some(rng.random_range(-1.0..1.0));
                stir[ci * np + pi] = Some(3.0 + rng.random_range(-0.5..0.5));
            }
        }
        for ci in 0..n {
            for pi in 0..np - 1 {
                let e: f64 = rng.random_range(-0.6..0.6);
                out[ci * np + pi + 1] = Some(
                    1.2 * pol[ci * np + pi].unwrap() - 0.4 * ctrl[ci * np + pi].unwrap() + e,
                );
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
        (panel, regimes)
    }

    #[test]
    fn zero_factors_reduce_to_factor_free_pipeline() {
        let (panel, regimes) = factorless_panel(6, 50, 3);
        let base = ModelSpec::new(ModelForm::Baseline, "out", "pol", vec!["ctrl".into()]);
        let out = averaged_irf_with_factors(
            &panel,
            &regimes,
            &base,
            1,
            0,
            &[RegimeScenario::loosening(-0.4, -1.0)],
            1,
            None,
        )
        .unwrap();
        assert!(out.selected_r.iter().all(|&r| r == 0));

        // Factor-free route on the same (already balanced) sample.
        let designs = candidate_designs(&panel, &regimes, &base, 1, None).unwrap();
        let fits: Vec<(ModelForm, _)> = designs
            .candidates
            .into_iter()
            .map(|(f, d)| (f, fit_horizon(d).unwrap()))
            .collect();
        let cand = CandidateSet::from_fits(fits, None).unwrap();
        let plain = solve_weights(&cand).unwrap();
        for (a, b) in out.weights.weights.iter().zip(&plain.weights) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(out.weights.criterion_value, plain.criterion_value);
    }
}
