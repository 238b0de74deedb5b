//! GDP-forecast anticipation controls.
//!
//! Forecast records come from semiannual outlook editions (June and
//! December). Quarters map to editions as follows: Q1/Q2 of year t use the
//! December edition of year t−1 with target year t; Q3/Q4 of year t use the
//! June edition of year t with target year t+1.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Column, DataError, PanelDataset, Period, Transform};

/// Name of the column added by [`merge_anticipation`].
pub const FORECAST_COLUMN: &str = "gdp_forecast";

/// One published forecast: the `edition_month` is 6 or 12.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub country: String,
    pub edition_year: i32,
    pub edition_month: u8,
    pub target_year: i32,
    pub value: f64,
}

/// The (edition, target year) a given quarter draws its forecast from.
fn required_edition(period: Period) -> (i32, u8, i32) {
    if period.quarter <= 2 {
        (period.year - 1, 12, period.year)
    } else {
        (period.year, 6, period.year + 1)
    }
}

/// Attach per-quarter forecast values as the `gdp_forecast` column.
///
/// Every (country, period) cell that carries any data must be covered by a
/// record; a gap is an error naming the edition that would be needed.
/// Re-merging identical records is a no-op.
pub fn merge_anticipation(
    panel: &PanelDataset,
    records: &[ForecastRecord],
) -> Result<PanelDataset, DataError> {
    let mut by_key: HashMap<(String, i32, u8, i32), f64> = HashMap::new();
    for r in records {
        by_key.insert((r.country.clone(), r.edition_year, r.edition_month, r.target_year), r.value);
    }
    let t = panel.n_periods();
    let mut values = vec![None; panel.n_countries() * t];
    for (ci, country) in panel.countries().iter().enumerate() {
        for (pi, period) in panel.periods().iter().enumerate() {
            if panel.row_all_missing(ci, pi) {
                continue;
            }
            let (ey, em, ty) = required_edition(*period);
            match by_key.get(&(country.clone(), ey, em, ty)) {
                Some(v) => values[ci * t + pi] = Some(*v),
                None => {
                    return Err(DataError::MissingForecast {
                        country: country.clone(),
                        period: *period,
                        edition: format!("{ey}-{em:02} (target {ty})"),
                    })
                }
            }
        }
    }
    panel.with_column(Column {
        name: FORECAST_COLUMN.into(),
        transform: Transform::Level,
        values,
    })
}

/// Read forecast records from a CSV `country,edition,target_year,value`
/// where `edition` is formatted `YYYY-MM` with month 06 or 12.
pub fn load_forecasts(path: &Path) -> Result<Vec<ForecastRecord>, DataError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| DataError::BadIndex {
        detail: format!("cannot open {}: {e}", path.display()),
    })?;
    let mut out = Vec::new();
    for (rownum, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| DataError::BadIndex { detail: format!("row {}: {e}", rownum + 2) })?;
        let bad = |what: &str| DataError::BadIndex {
            detail: format!("forecast row {}: {what}", rownum + 2),
        };
        let country = rec.get(0).ok_or_else(|| bad("missing country"))?.trim().to_string();
        let edition = rec.get(1).ok_or_else(|| bad("missing edition"))?.trim();
        let (ey, em) = edition.split_once('-').ok_or_else(|| bad("edition must be YYYY-MM"))?;
        let edition_year: i32 = ey.parse().map_err(|_| bad("bad edition year"))?;
        let edition_month: u8 = em.parse().map_err(|_| bad("bad edition month"))?;
        if edition_month != 6 && edition_month != 12 {
            return Err(bad("edition month must be 06 or 12"));
        }
        let target_year: i32 =
            rec.get(2).ok_or_else(|| bad("missing target year"))?.trim().parse().map_err(|_| bad("bad target year"))?;
        let value: f64 =
            rec.get(3).ok_or_else(|| bad("missing value"))?.trim().parse().map_err(|_| bad("bad value"))?;
        out.push(ForecastRecord { country, edition_year, edition_month, target_year, value });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel() -> PanelDataset {
        let p0 = Period::new(2005, 1);
        let periods: Vec<Period> = (0..4i64).map(|k| p0.offset(k)).collect();
        PanelDataset::new(
            vec!["AT".into()],
            periods,
            vec![Column {
                name: "gdp".into(),
                transform: Transform::Level,
                values: vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0)],
            }],
        )
        .unwrap()
    }

    fn records() -> Vec<ForecastRecord> {
        vec![
            ForecastRecord {
                country: "AT".into(),
                edition_year: 2004,
                edition_month: 12,
                target_year: 2005,
                value: 1.8,
            },
            ForecastRecord {
                country: "AT".into(),
                edition_year: 2005,
                edition_month: 6,
                target_year: 2006,
                value: 2.2,
            },
        ]
    }

    #[test]
    fn quarter_rule_maps_editions() {
        let merged = merge_anticipation(&panel(), &records()).unwrap();
        let col = merged.column_index(FORECAST_COLUMN).unwrap();
        // Q1/Q2 2005 <- Dec-2004 edition, target 2005.
        assert_eq!(merged.value(0, 0, col), Some(1.8));
        assert_eq!(merged.value(0, 1, col), Some(1.8));
        // Q3/Q4 2005 <- Jun-2005 edition, target 2006.
        assert_eq!(merged.value(0, 2, col), Some(2.2));
        assert_eq!(merged.value(0, 3, col), Some(2.2));
    }

    #[test]
    fn missing_edition_is_reported() {
        let only_june = vec![records()[1].clone()];
        let err = merge_anticipation(&panel(), &only_june).unwrap_err();
        match err {
            DataError::MissingForecast { country, period, edition } => {
                assert_eq!(country, "AT");
                assert_eq!(period, Period::new(2005, 1));
                assert!(edition.contains("2004-12"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn merge_is_idempotent() {
        let once = merge_anticipation(&panel(), &records()).unwrap();
        let twice = merge_anticipation(&once, &records()).unwrap();
        let col = once.column_index(FORECAST_COLUMN).unwrap();
        for pi in 0..once.n_periods() {
            assert_eq!(once.value(0, pi, col), twice.value(0, pi, col));
        }
        assert_eq!(once.columns().len(), twice.columns().len());
    }
}
