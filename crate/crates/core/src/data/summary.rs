//! Per-country summary statistics of the transformed panel.

use super::PanelDataset;

/// Mean and unbiased standard deviation of one (country, column) pair;
/// `None` when there are too few non-missing cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub country: String,
    pub column: String,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub n: usize,
}

/// Compute per-country mean/sd for every column, skipping missing cells.
/// Rows come out sorted by (country, column order as stored).
pub fn summary_stats(panel: &PanelDataset) -> Vec<SummaryRow> {
    let mut out = Vec::with_capacity(panel.n_countries() * panel.columns().len());
    for (ci, country) in panel.countries().iter().enumerate() {
        for (k, col) in panel.columns().iter().enumerate() {
            let vals: Vec<f64> = panel.country_series(ci, k).iter().flatten().copied().collect();
            let n = vals.len();
            let mean = if n > 0 { Some(vals.iter().sum::<f64>() / n as f64) } else { None };
            let sd = if n > 1 {
                let m = mean.unwrap();
                Some((vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt())
            } else {
                None
            };
            out.push(SummaryRow { country: country.clone(), column: col.name.clone(), mean, sd, n });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{apply_transforms, Column, Period, Transform};
    use approx::assert_relative_eq;

    fn panel_from(values: Vec<Option<f64>>, transform: Transform) -> PanelDataset {
        let p0 = Period::new(2000, 1);
        let periods: Vec<Period> = (0..values.len() as i64).map(|k| p0.offset(k)).collect();
        PanelDataset::new(
            vec!["AT".into()],
            periods,
            vec![Column { name: "x".into(), transform, values }],
        )
        .unwrap()
    }

    #[test]
    fn constant_transformed_series_has_zero_sd() {
        let panel = panel_from(vec![Some(5.0); 6], Transform::Level);
        let rows = summary_stats(&panel);
        assert_relative_eq!(rows[0].sd.unwrap(), 0.0);
        assert_eq!(rows[0].n, 6);
    }

    #[test]
    fn log_diff_levels_mean() {
        // Growth of [100, 102, 101]: {100 ln 1.02, 100 ln(101/102)},
        // mean oracle computed with 30-digit arithmetic.
        let panel =
            panel_from(vec![Some(100.0), Some(102.0), Some(101.0)], Transform::LogDiff100);
        let transformed = apply_transforms(&panel).unwrap();
        let rows = summary_stats(&transformed);
        assert_eq!(rows[0].n, 2);
        assert_relative_eq!(rows[0].mean.unwrap(), 0.4975165426584041, epsilon = 1e-12);
    }

    #[test]
    fn matches_spreadsheet_oracle_on_twenty_cells() {
        // Mean/sd of these 20 values computed independently: mean 0.45,
        // sd 1.08300264858499088675.
        let vals = [
            1.25, -0.50, 0.75, 2.10, -1.40, 0.30, 0.95, -0.20, 1.80, -0.65, 0.40, 1.15, -0.85,
            0.55, 2.45, -1.10, 0.05, 0.70, -0.35, 1.60,
        ];
        let panel = panel_from(vals.iter().map(|&v| Some(v)).collect(), Transform::Level);
        let rows = summary_stats(&panel);
        assert_relative_eq!(rows[0].mean.unwrap(), 0.45, epsilon = 1e-9);
        assert_relative_eq!(rows[0].sd.unwrap(), 1.0830026485849909, epsilon = 1e-9);
    }

    #[test]
    fn empty_column_yields_missing_stats() {
        let panel = panel_from(vec![None, None, None, None], Transform::Level);
        let rows = summary_stats(&panel);
        assert_eq!(rows[0].mean, None);
        assert_eq!(rows[0].sd, None);
        assert_eq!(rows[0].n, 0);
    }
}
