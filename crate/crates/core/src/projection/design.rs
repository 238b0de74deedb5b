//! Per-horizon design matrix assembly with deterministic column order and
//! rank-revealing pruning.

use nalgebra::{DMatrix, DVector};

use crate::data::{PanelDataset, PeriodRange, RegimeVariables};
use crate::linalg::{prune_columns, PRUNE_TOL};

use super::{ModelForm, ModelSpec, ProjectionError};

/// A fully assembled regression problem for one (model, horizon).
///
/// Column order is deterministic: country dummies (or intercept), controls
/// at t, controls at t-1, ..., extra controls, policy at t, policy lags,
/// then the form's interaction columns. `names` and `x` reflect the matrix
/// after pruning; pruned column names are listed in `dropped`.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub spec: ModelSpec,
    pub horizon: usize,
    /// (country index, base period index) per row.
    pub rows: Vec<(usize, usize)>,
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub names: Vec<String>,
    pub dropped: Vec<String>,
}

impl DesignMatrix {
    /// Column count after pruning.
    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn t_eff(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Baseline and candidate designs sharing one common row set, so residual
/// comparisons across models are like-for-like.
#[derive(Debug, Clone)]
pub struct CandidateDesigns {
    pub baseline: DesignMatrix,
    pub candidates: Vec<(ModelForm, DesignMatrix)>,
}

/// One requested regressor: where its value comes from for a row (ci, pi).
#[derive(Debug, Clone)]
enum ColumnSource {
    Intercept,
    Dummy(usize),
    Panel { col: usize, lag: usize },
    /// Product of the contemporaneous policy value and regime variables.
    Interaction { policy_col: usize, regime: Vec<RegimeVar> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RegimeVar {
    DiQ,
    DiA,
    IndQ,
    IndA,
}

impl RegimeVar {
    fn value(self, regimes: &RegimeVariables, ci: usize, pi: usize) -> Option<f64> {
        let cell = regimes.cell(ci, pi);
        match self {
            RegimeVar::DiQ => cell.d_i_q,
            RegimeVar::DiA => cell.d_i_a,
            RegimeVar::IndQ => cell.ind_q,
            RegimeVar::IndA => cell.ind_a,
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            RegimeVar::DiQ => "d_i_q",
            RegimeVar::DiA => "d_i_a",
            RegimeVar::IndQ => "ind_q",
            RegimeVar::IndA => "ind_a",
        }
    }
}

fn interaction_vars(form: ModelForm) -> Vec<Vec<RegimeVar>> {
    match form {
        ModelForm::Baseline => vec![],
        ModelForm::A => vec![vec![RegimeVar::IndQ]],
        ModelForm::B => vec![vec![RegimeVar::IndA]],
        ModelForm::C => vec![vec![RegimeVar::DiQ]],
        ModelForm::D => vec![vec![RegimeVar::DiA]],
        ModelForm::E => vec![
            vec![RegimeVar::IndQ],
            vec![RegimeVar::DiQ],
            vec![RegimeVar::DiQ, RegimeVar::IndQ],
        ],
    }
}

/// Non-dummy column plan (name, source) in deterministic order.
fn column_plan(
    panel: &PanelDataset,
    spec: &ModelSpec,
) -> Result<Vec<(String, ColumnSource)>, ProjectionError> {
    let lookup = |name: &str| -> Result<usize, ProjectionError> {
        panel
            .column_index(name)
            .ok_or_else(|| ProjectionError::MissingVariable { column: name.to_string() })
    };
    let mut plan = Vec::new();
    for lag in 0..spec.control_lags.max(1) {
        for c in &spec.controls {
            let col = lookup(c)?;
            let name = if lag == 0 { c.clone() } else { format!("{c}.l{lag}") };
            plan.push((name, ColumnSource::Panel { col, lag }));
        }
    }
    for c in &spec.extra_controls {
        let col = lookup(c)?;
        plan.push((c.clone(), ColumnSource::Panel { col, lag: 0 }));
    }
    let policy_col = lookup(&spec.policy)?;
    for lag in 0..=spec.policy_lags {
        let name = if lag == 0 { spec.policy.clone() } else { format!("{}.l{lag}", spec.policy) };
        plan.push((name, ColumnSource::Panel { col: policy_col, lag }));
    }
    for vars in interaction_vars(spec.form) {
        let name = std::iter::once(spec.policy.as_str())
            .chain(vars.iter().map(|v| v.suffix()))
            .collect::<Vec<_>>()
            .join(":");
        plan.push((name, ColumnSource::Interaction { policy_col, regime: vars }));
    }
    Ok(plan)
}

fn source_value(
    panel: &PanelDataset,
    regimes: &RegimeVariables,
    source: &ColumnSource,
    ci: usize,
    pi: usize,
) -> Option<f64> {
    match source {
        ColumnSource::Intercept => Some(1.0),
        ColumnSource::Dummy(c) => Some(if *c == ci { 1.0 } else { 0.0 }),
        ColumnSource::Panel { col, lag } => {
            if pi < *lag {
                None
            } else {
                panel.value(ci, pi - lag, *col)
            }
        }
        ColumnSource::Interaction { policy_col, regime } => {
            let mut v = panel.value(ci, pi, *policy_col)?;
            for r in regime {
                v *= r.value(regimes, ci, pi)?;
            }
            Some(v)
        }
    }
}

/// Regime variables needed by `form` at the base period.
fn regime_requirements(form: ModelForm) -> Vec<RegimeVar> {
    let mut vars: Vec<RegimeVar> = interaction_vars(form).into_iter().flatten().collect();
    vars.dedup();
    vars
}

fn check_horizon(k: usize) -> Result<(), ProjectionError> {
    if (1..=12).contains(&k) {
        Ok(())
    } else {
        Err(ProjectionError::BadHorizon { k })
    }
}

/// Rows with complete data for `spec` at horizon `k`.
fn complete_rows(
    panel: &PanelDataset,
    regimes: &RegimeVariables,
    spec: &ModelSpec,
    regime_vars: &[RegimeVar],
    k: usize,
    window: Option<&PeriodRange>,
) -> Result<Vec<(usize, usize)>, ProjectionError> {
    let plan = column_plan(panel, spec)?;
    let outcome_col = panel
        .column_index(&spec.outcome)
        .ok_or_else(|| ProjectionError::MissingVariable { column: spec.outcome.clone() })?;
    let t = panel.n_periods();
    let mut rows = Vec::new();
    for ci in 0..panel.n_countries() {
        for pi in 0..t {
            if let Some(w) = window {
                if !w.contains(panel.periods()[pi]) {
                    continue;
                }
            }
            if pi + k >= t {
                continue;
            }
            if panel.value(ci, pi + k, outcome_col).is_none() {
                continue;
            }
            let complete = plan
                .iter()
                .all(|(_, src)| source_value(panel, regimes, src, ci, pi).is_some())
                && regime_vars.iter().all(|r| r.value(regimes, ci, pi).is_some());
            if complete {
                rows.push((ci, pi));
            }
        }
    }
    Ok(rows)
}

/// Rows complete for the union of all six forms' regressors, so every
/// candidate and the baseline share an identical sample at horizon `k`.
pub fn common_rows(
    panel: &PanelDataset,
    regimes: &RegimeVariables,
    base: &ModelSpec,
    k: usize,
    window: Option<&PeriodRange>,
) -> Result<Vec<(usize, usize)>, ProjectionError> {
    check_horizon(k)?;
    let all_vars = vec![RegimeVar::DiQ, RegimeVar::DiA, RegimeVar::IndQ, RegimeVar::IndA];
    complete_rows(panel, regimes, base, &all_vars, k, window)
}

/// Assemble the design for `spec` on an explicit row set.
pub fn build_design_on_rows(
    panel: &PanelDataset,
    regimes: &RegimeVariables,
    spec: &ModelSpec,
    k: usize,
    rows: Vec<(usize, usize)>,
) -> Result<DesignMatrix, ProjectionError> {
    check_horizon(k)?;
    if rows.is_empty() {
        return Err(ProjectionError::EmptyDesign { k });
    }
    let plan = column_plan(panel, spec)?;
    let outcome_col = panel
        .column_index(&spec.outcome)
        .ok_or_else(|| ProjectionError::MissingVariable { column: spec.outcome.clone() })?;

    // Dummies only for countries actually present in the sample.
    let mut fe_cols: Vec<(String, ColumnSource)> = Vec::new();
    if spec.include_fixed_effects {
        let mut seen: Vec<usize> = rows.iter().map(|&(ci, _)| ci).collect();
        seen.sort_unstable();
        seen.dedup();
        for ci in seen {
            fe_cols.push((format!("fe::{}", panel.countries()[ci]), ColumnSource::Dummy(ci)));
        }
    } else {
        fe_cols.push(("const".to_string(), ColumnSource::Intercept));
    }
    let full_plan: Vec<(String, ColumnSource)> = fe_cols.into_iter().chain(plan).collect();

    let n = rows.len();
    let mut x = DMatrix::<f64>::zeros(n, full_plan.len());
    let mut y = DVector::<f64>::zeros(n);
    for (r, &(ci, pi)) in rows.iter().enumerate() {
        y[r] = panel.value(ci, pi + k, outcome_col).expect("rows pre-checked");
        for (c, (_, src)) in full_plan.iter().enumerate() {
            x[(r, c)] = source_value(panel, regimes, src, ci, pi).expect("rows pre-checked");
        }
    }

    // A policy series with no variation on the sample identifies nothing.
    let policy_idx = full_plan
        .iter()
        .position(|(name, _)| *name == spec.policy)
        .expect("policy column in plan");
    let p0 = x[(0, policy_idx)];
    if (0..n).all(|r| x[(r, policy_idx)] == p0) {
        return Err(ProjectionError::AllPolicyVarianceZero { column: spec.policy.clone() });
    }

    let (retained, dropped_idx) = prune_columns(&x, PRUNE_TOL);
    let names: Vec<String> = retained.iter().map(|&c| full_plan[c].0.clone()).collect();
    let dropped: Vec<String> = dropped_idx.iter().map(|&c| full_plan[c].0.clone()).collect();
    let x = x.select_columns(&retained);
    Ok(DesignMatrix { spec: spec.clone(), horizon: k, rows, y, x, names, dropped })
}

/// Build the design for one model at horizon `k` on its own complete-case
/// sample.
pub fn build_design(
    panel: &PanelDataset,
    regimes: &RegimeVariables,
    spec: &ModelSpec,
    k: usize,
    window: Option<&PeriodRange>,
) -> Result<DesignMatrix, ProjectionError> {
    check_horizon(k)?;
    let rows = complete_rows(panel, regimes, spec, &regime_requirements(spec.form), k, window)?;
    build_design_on_rows(panel, regimes, spec, k, rows)
}

/// Build the baseline and all five candidates on the shared common sample.
pub fn candidate_designs(
    panel: &PanelDataset,
    regimes: &RegimeVariables,
    base: &ModelSpec,
    k: usize,
    window: Option<&PeriodRange>,
) -> Result<CandidateDesigns, ProjectionError> {
    let rows = common_rows(panel, regimes, base, k, window)?;
    if rows.is_empty() {
        return Err(ProjectionError::EmptyDesign { k });
    }
    let baseline = build_design_on_rows(
        panel,
        regimes,
        &base.with_form(ModelForm::Baseline),
        k,
        rows.clone(),
    )?;
    let mut candidates = Vec::with_capacity(ModelForm::CANDIDATES.len());
    for form in ModelForm::CANDIDATES {
        let d = build_design_on_rows(panel, regimes, &base.with_form(form), k, rows.clone())?;
        candidates.push((form, d));
    }
    Ok(CandidateDesigns { baseline, candidates })
}
