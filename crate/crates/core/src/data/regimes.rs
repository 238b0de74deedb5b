//! Interest-rate regime variables: quarterly and annual changes with
//! strict negative-change indicators.

use super::{Column, DataError, PanelDataset, Transform};

/// Panel-column names under which the regime variables are attached.
pub const REGIME_COLUMNS: [&str; 4] = ["d_i_q", "d_i_a", "ind_q", "ind_a"];

/// Regime variables on the same country-major cell layout as the panel.
///
/// Indicators are 1.0 exactly when the corresponding change is strictly
/// negative, 0.0 otherwise, and missing wherever the change is missing.
#[derive(Debug, Clone)]
pub struct RegimeVariables {
    /// Quarterly change Δi_t = i_t − i_{t-1} (p.p.).
    pub d_i_q: Vec<Option<f64>>,
    /// Annual change i_t − i_{t-4} (p.p.); first 4 quarters per country missing.
    pub d_i_a: Vec<Option<f64>>,
    /// 1 when the quarterly change is strictly negative.
    pub ind_q: Vec<Option<f64>>,
    /// 1 when the annual change is strictly negative.
    pub ind_a: Vec<Option<f64>>,
    n_periods: usize,
}

impl RegimeVariables {
    pub fn n_periods(&self) -> usize {
        self.n_periods
    }

    pub fn cell(&self, ci: usize, pi: usize) -> RegimeCell {
        let idx = ci * self.n_periods + pi;
        RegimeCell {
            d_i_q: self.d_i_q[idx],
            d_i_a: self.d_i_a[idx],
            ind_q: self.ind_q[idx],
            ind_a: self.ind_a[idx],
        }
    }

    /// Regime grids for a resampled country list (bootstrap support).
    pub fn resample(&self, picks: &[usize]) -> RegimeVariables {
        let t = self.n_periods;
        let take = |grid: &Vec<Option<f64>>| -> Vec<Option<f64>> {
            let mut out = Vec::with_capacity(picks.len() * t);
            for &src in picks {
                out.extend_from_slice(&grid[src * t..(src + 1) * t]);
            }
            out
        };
        RegimeVariables {
            d_i_q: take(&self.d_i_q),
            d_i_a: take(&self.d_i_a),
            ind_q: take(&self.ind_q),
            ind_a: take(&self.ind_a),
            n_periods: t,
        }
    }
}

/// Regime values at one (country, period) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeCell {
    pub d_i_q: Option<f64>,
    pub d_i_a: Option<f64>,
    pub ind_q: Option<f64>,
    pub ind_a: Option<f64>,
}

/// Derive regime variables from an interest-rate level column (p.p.).
pub fn build_regimes(panel: &PanelDataset, rate_column: &str) -> Result<RegimeVariables, DataError> {
    let col = panel
        .column_index(rate_column)
        .ok_or_else(|| DataError::MissingRateColumn { column: rate_column.to_string() })?;
    let t = panel.n_periods();
    let cells = panel.n_countries() * t;
    let mut out = RegimeVariables {
        d_i_q: vec![None; cells],
        d_i_a: vec![None; cells],
        ind_q: vec![None; cells],
        ind_a: vec![None; cells],
        n_periods: t,
    };
    for ci in 0..panel.n_countries() {
        let series = panel.country_series(ci, col);
        for pi in 0..t {
            let idx = ci * t + pi;
            if pi >= 1 {
                if let (Some(prev), Some(cur)) = (series[pi - 1], series[pi]) {
                    let d = cur - prev;
                    out.d_i_q[idx] = Some(d);
                    out.ind_q[idx] = Some(if d < 0.0 { 1.0 } else { 0.0 });
                }
            }
            if pi >= 4 {
                if let (Some(prev), Some(cur)) = (series[pi - 4], series[pi]) {
                    let d = cur - prev;
                    out.d_i_a[idx] = Some(d);
                    out.ind_a[idx] = Some(if d < 0.0 { 1.0 } else { 0.0 });
                }
            }
        }
    }
    Ok(out)
}

/// Attach the four regime variables as panel columns (see [`REGIME_COLUMNS`]).
pub fn attach_regime_columns(
    panel: &PanelDataset,
    regimes: &RegimeVariables,
) -> Result<PanelDataset, DataError> {
    let mut out = panel.clone();
    for (name, values) in REGIME_COLUMNS.iter().zip([
        regimes.d_i_q.clone(),
        regimes.d_i_a.clone(),
        regimes.ind_q.clone(),
        regimes.ind_a.clone(),
    ]) {
        out = out.with_column(Column {
            name: (*name).to_string(),
            transform: Transform::Level,
            values,
        })?;
    }
    Ok(out)
}
