//! Hodrick–Prescott trend/cycle decomposition.
//!
//! The trend solves (I + λ D'D) τ = y exactly, where D is the second
//! difference operator; the system is pentadiagonal, symmetric positive
//! definite, and solved by banded Cholesky. No endpoint tapering.

use super::{Column, DataError, PanelDataset, Transform};

/// Name of the column added by [`add_output_gap`].
pub const OUTPUT_GAP_COLUMN: &str = "output_gap";

/// Decompose a complete series into (trend, cycle) with smoothing `lambda`.
pub fn hp_filter(series: &[f64], lambda: f64) -> Result<(Vec<f64>, Vec<f64>), DataError> {
    let n = series.len();
    if n < 4 {
        return Err(DataError::SeriesTooShort { len: n, min: 4 });
    }
    if !(lambda > 0.0) {
        return Err(DataError::InvalidLambda { lambda });
    }

    // Bands of A = I + λ D'D (main, first and second sub-diagonal).
    let mut main = vec![1.0 + 6.0 * lambda; n];
    main[0] = 1.0 + lambda;
    main[n - 1] = 1.0 + lambda;
    main[1] = 1.0 + 5.0 * lambda;
    main[n - 2] = 1.0 + 5.0 * lambda;
    let mut sub1 = vec![-4.0 * lambda; n - 1];
    sub1[0] = -2.0 * lambda;
    sub1[n - 2] = -2.0 * lambda;
    let sub2 = vec![lambda; n - 2];

    // Banded Cholesky A = L L' with bandwidth 2.
    let mut l0 = vec![0.0; n];
    let mut l1 = vec![0.0; n.saturating_sub(1)];
    let mut l2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n {
        let li2 = if i >= 2 { sub2[i - 2] / l0[i - 2] } else { 0.0 };
        if i >= 2 {
            l2[i - 2] = li2;
        }
        let li1 = if i >= 1 {
            let mut v = sub1[i - 1];
            if i >= 2 {
                v -= li2 * l1[i - 2];
            }
            v / l0[i - 1]
        } else {
            0.0
        };
        if i >= 1 {
            l1[i - 1] = li1;
        }
        let d = main[i] - li1 * li1 - li2 * li2;
        debug_assert!(d > 0.0, "HP system lost positive definiteness");
        l0[i] = d.sqrt();
    }

    // Forward then backward substitution.
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut v = series[i];
        if i >= 1 {
            v -= l1[i - 1] * z[i - 1];
        }
        if i >= 2 {
            v -= l2[i - 2] * z[i - 2];
        }
        z[i] = v / l0[i];
    }
    let mut trend = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = z[i];
        if i + 1 < n {
            v -= l1[i] * trend[i + 1];
        }
        if i + 2 < n {
            v -= l2[i] * trend[i + 2];
        }
        trend[i] = v / l0[i];
    }
    let cycle = series.iter().zip(&trend).map(|(y, t)| y - t).collect();
    Ok((trend, cycle))
}

/// Run the HP filter on one panel column per country.
///
/// Leading/trailing missing cells are allowed and stay missing; an interior
/// gap is an error. Returns (trend, cycle) on the panel cell layout.
pub fn hp_filter_column(
    panel: &PanelDataset,
    column: &str,
    lambda: f64,
) -> Result<(Vec<Option<f64>>, Vec<Option<f64>>), DataError> {
    let col = panel
        .column_index(column)
        .ok_or_else(|| DataError::MissingColumn { column: column.to_string() })?;
    let t = panel.n_periods();
    let mut trend = vec![None; panel.n_countries() * t];
    let mut cycle = vec![None; panel.n_countries() * t];
    for ci in 0..panel.n_countries() {
        let series = panel.country_series(ci, col);
        let first = series.iter().position(|v| v.is_some());
        let last = series.iter().rposition(|v| v.is_some());
        let (Some(first), Some(last)) = (first, last) else {
            continue; // country has no data in this column
        };
        let mut core = Vec::with_capacity(last - first + 1);
        for pi in first..=last {
            match series[pi] {
                Some(v) => core.push(v),
                None => {
                    return Err(DataError::InteriorMissing {
                        at: format!(
                            "column `{column}`, country {}, {}",
                            panel.countries()[ci],
                            panel.periods()[pi]
                        ),
                    })
                }
            }
        }
        let (tr, cy) = hp_filter(&core, lambda)?;
        for (k, pi) in (first..=last).enumerate() {
            trend[ci * t + pi] = Some(tr[k]);
            cycle[ci * t + pi] = Some(cy[k]);
        }
    }
    Ok((trend, cycle))
}

/// Attach the HP cyclical component of 100·ln(level) of `level_column` as
/// the `output_gap` panel column.
pub fn add_output_gap(
    panel: &PanelDataset,
    level_column: &str,
    lambda: f64,
) -> Result<PanelDataset, DataError> {
    let col = panel
        .column_index(level_column)
        .ok_or_else(|| DataError::MissingColumn { column: level_column.to_string() })?;
    let t = panel.n_periods();
    let mut logged = vec![None; panel.n_countries() * t];
    for ci in 0..panel.n_countries() {
        for pi in 0..t {
            if let Some(v) = panel.value(ci, pi, col) {
                if v <= 0.0 {
                    return Err(DataError::NonPositiveLevel {
                        at: format!(
                            "column `{level_column}`, country {}, {}",
                            panel.countries()[ci],
                            panel.periods()[pi]
                        ),
                        value: v,
                    });
                }
                logged[ci * t + pi] = Some(100.0 * v.ln());
            }
        }
    }
    let scratch = panel.with_column(Column {
        name: "__log_level".into(),
        transform: Transform::Level,
        values: logged,
    })?;
    let (_, cycle) = hp_filter_column(&scratch, "__log_level", lambda)?;
    panel.with_column(Column {
        name: OUTPUT_GAP_COLUMN.into(),
        transform: Transform::Level,
        values: cycle,
    })
}
