//! Wide-CSV panel loader.
//!
//! Expected layout: header `country,period,<series...>`, one row per
//! country-quarter, period formatted `YYYY-Qn`, missing cell = empty field.
//! Long-format files are rejected outright.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Column, DataError, PanelDataset, Period, Transform};

/// Which series to ingest and how each one will later be transformed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PanelSchema {
    pub columns: Vec<ColumnSchema>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub transform: Transform,
}

impl PanelSchema {
    pub fn new(columns: Vec<(impl Into<String>, Transform)>) -> Self {
        PanelSchema {
            columns: columns
                .into_iter()
                .map(|(name, transform)| ColumnSchema { name: name.into(), transform })
                .collect(),
        }
    }
}

/// Load and validate a wide CSV into a [`PanelDataset`] of levels.
///
/// Rows are sorted by (country, period); the period index becomes the
/// contiguous quarterly range spanning the file, with absent rows left as
/// missing cells. Duplicate (country, period) rows are an error.
pub fn load_panel(path: &Path, schema: &PanelSchema) -> Result<PanelDataset, DataError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| DataError::BadIndex {
        detail: format!("cannot open {}: {e}", path.display()),
    })?;
    let headers = reader
        .headers()
        .map_err(|e| DataError::BadIndex { detail: format!("cannot read header: {e}") })?
        .clone();
    let names: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();

    if names.iter().any(|n| n == "variable") && names.iter().any(|n| n == "value") {
        return Err(DataError::LongFormat);
    }
    let find = |want: &str| -> Result<usize, DataError> {
        names
            .iter()
            .position(|n| n == want)
            .ok_or_else(|| DataError::MissingColumn { column: want.to_string() })
    };
    let country_idx = find("country")?;
    let period_idx = find("period")?;
    let mut series_idx = Vec::with_capacity(schema.columns.len());
    for c in &schema.columns {
        series_idx.push(find(&c.name)?);
    }

    // (country, period) -> per-series value
    let mut cells: BTreeMap<(String, Period), Vec<Option<f64>>> = BTreeMap::new();
    for (rownum, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| DataError::BadIndex { detail: format!("row {}: {e}", rownum + 2) })?;
        let country = rec.get(country_idx).unwrap_or("").trim().to_string();
        let raw_period = rec.get(period_idx).unwrap_or("").trim().to_string();
        let period: Period = raw_period
            .parse()
            .map_err(|_| DataError::UnparseablePeriod { row: rownum + 2, value: raw_period.clone() })?;
        let mut row = Vec::with_capacity(series_idx.len());
        for (&idx, cs) in series_idx.iter().zip(&schema.columns) {
            let field = rec.get(idx).unwrap_or("").trim();
            if field.is_empty() {
                row.push(None);
            } else {
                let v: f64 = field.parse().map_err(|_| DataError::BadIndex {
                    detail: format!("row {}: cannot parse `{}` in column `{}`", rownum + 2, field, cs.name),
                })?;
                if !v.is_finite() {
                    return Err(DataError::NonFiniteValue {
                        column: cs.name.clone(),
                        country: country.clone(),
                        period,
                    });
                }
                row.push(Some(v));
            }
        }
        if cells.insert((country.clone(), period), row).is_some() {
            return Err(DataError::DuplicateRow { country, period });
        }
    }
    if cells.is_empty() {
        return Err(DataError::BadIndex { detail: "no data rows".into() });
    }

    let countries: Vec<String> =
        cells.keys().map(|(c, _)| c.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let first = cells.keys().map(|(_, p)| *p).min().unwrap();
    let last = cells.keys().map(|(_, p)| *p).max().unwrap();
    let n_periods = (last.ordinal() - first.ordinal() + 1) as usize;
    let periods: Vec<Period> = (0..n_periods as i64).map(|k| first.offset(k)).collect();

    let n_cells = countries.len() * n_periods;
    let mut columns: Vec<Column> = schema
        .columns
        .iter()
        .map(|c| Column { name: c.name.clone(), transform: c.transform, values: vec![None; n_cells] })
        .collect();
    for ((country, period), row) in &cells {
        let ci = countries.binary_search(country).expect("country listed");
        let pi = (period.ordinal() - first.ordinal()) as usize;
        for (k, v) in row.iter().enumerate() {
            columns[k].values[ci * n_periods + pi] = *v;
        }
    }
    PanelDataset::new(countries, periods, columns)
}
