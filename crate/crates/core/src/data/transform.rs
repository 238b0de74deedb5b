//! Series transforms: 100·log quarterly changes and first differences.

use super::{Column, DataError, PanelDataset, Transform};

/// 100·ln(x_t / x_{t-1}) with the first observation (and any cell whose
/// predecessor is missing) left missing. Levels must be strictly positive.
pub fn log_diff_100(series: &[Option<f64>]) -> Result<Vec<Option<f64>>, DataError> {
    for (i, v) in series.iter().enumerate() {
        if let Some(x) = v {
            if *x <= 0.0 {
                return Err(DataError::NonPositiveLevel { at: format!("index {i}"), value: *x });
            }
        }
    }
    let mut out = vec![None; series.len()];
    for t in 1..series.len() {
        if let (Some(prev), Some(cur)) = (series[t - 1], series[t]) {
            out[t] = Some(100.0 * (cur / prev).ln());
        }
    }
    Ok(out)
}

/// First difference x_t − x_{t-1}, first observation missing.
pub fn diff_series(series: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut out = vec![None; series.len()];
    for t in 1..series.len() {
        if let (Some(prev), Some(cur)) = (series[t - 1], series[t]) {
            out[t] = Some(cur - prev);
        }
    }
    out
}

/// Apply each column's transform tag per country, producing the estimation
/// panel. Tags are kept on the output columns as provenance.
pub fn apply_transforms(panel: &PanelDataset) -> Result<PanelDataset, DataError> {
    let t = panel.n_periods();
    let mut columns = Vec::with_capacity(panel.columns().len());
    for (k, col) in panel.columns().iter().enumerate() {
        let mut values = vec![None; panel.n_countries() * t];
        for ci in 0..panel.n_countries() {
            let series = panel.country_series(ci, k);
            let transformed = match col.transform {
                Transform::Level => series.to_vec(),
                Transform::LogDiff100 => log_diff_100(series).map_err(|e| match e {
                    DataError::NonPositiveLevel { at, value } => DataError::NonPositiveLevel {
                        at: format!(
                            "column `{}`, country {}, {at}",
                            col.name,
                            panel.countries()[ci]
                        ),
                        value,
                    },
                    other => other,
                })?,
                Transform::Diff => diff_series(series),
            };
            values[ci * t..(ci + 1) * t].copy_from_slice(&transformed);
        }
        columns.push(Column { name: col.name.clone(), transform: col.transform, values });
    }
    let mut out = PanelDataset::new(panel.countries().to_vec(), panel.periods().to_vec(), columns)?;
    out.set_transformed(true);
    Ok(out)
}
