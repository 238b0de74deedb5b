//! The core panel container: a country × quarter grid of named series.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{DataError, Period};

/// How a raw level series is converted into its estimation form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    /// Used as-is.
    #[serde(rename = "level")]
    Level,
    /// 100·ln(x_t / x_{t-1}); requires strictly positive levels.
    #[serde(rename = "log_diff_100")]
    LogDiff100,
    /// First difference x_t − x_{t-1}.
    #[serde(rename = "diff")]
    Diff,
}

/// One named series with its transform tag. Values are stored country-major:
/// the slice for country `i` is `values[i*T .. (i+1)*T]`.
#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub transform: Transform,
    pub values: Vec<Option<f64>>,
}

/// Balanced-or-unbalanced country × quarter table of series.
///
/// All columns share one strictly increasing, gap-free quarterly index;
/// unbalancedness is expressed through missing cells. Immutable after
/// construction: derived panels are new values.
#[derive(Debug, Clone)]
pub struct PanelDataset {
    countries: Vec<String>,
    periods: Vec<Period>,
    columns: Vec<Column>,
    col_index: HashMap<String, usize>,
    transformed: bool,
}

impl PanelDataset {
    /// Build a panel and validate the shared-index invariants.
    pub fn new(
        countries: Vec<String>,
        periods: Vec<Period>,
        columns: Vec<Column>,
    ) -> Result<Self, DataError> {
        if periods.is_empty() || countries.is_empty() {
            return Err(DataError::BadIndex { detail: "empty country or period index".into() });
        }
        for w in periods.windows(2) {
            if w[1].ordinal() != w[0].ordinal() + 1 {
                return Err(DataError::BadIndex {
                    detail: format!("periods must advance one quarter at a time: {} -> {}", w[0], w[1]),
                });
            }
        }
        let cells = countries.len() * periods.len();
        let mut col_index = HashMap::new();
        for (k, c) in columns.iter().enumerate() {
            if c.values.len() != cells {
                return Err(DataError::BadIndex {
                    detail: format!(
                        "column `{}` has {} cells, index has {}",
                        c.name,
                        c.values.len(),
                        cells
                    ),
                });
            }
            for (cell, v) in c.values.iter().enumerate() {
                if let Some(x) = v {
                    if !x.is_finite() {
                        let (ci, pi) = (cell / periods.len(), cell % periods.len());
                        return Err(DataError::NonFiniteValue {
                            column: c.name.clone(),
                            country: countries[ci].clone(),
                            period: periods[pi],
                        });
                    }
                }
            }
            if col_index.insert(c.name.clone(), k).is_some() {
                return Err(DataError::BadIndex {
                    detail: format!("duplicate column name `{}`", c.name),
                });
            }
        }
        Ok(PanelDataset { countries, periods, columns, col_index, transformed: false })
    }

    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    pub fn periods(&self) -> &[Period] {
        &self.periods
    }

    pub fn n_countries(&self) -> usize {
        self.countries.len()
    }

    pub fn n_periods(&self) -> usize {
        self.periods.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.col_index.get(name).copied()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.column_index(name).map(|k| &self.columns[k])
    }

    /// Whether `apply_transforms` has produced this panel.
    pub fn is_transformed(&self) -> bool {
        self.transformed
    }

    pub(crate) fn set_transformed(&mut self, v: bool) {
        self.transformed = v;
    }

    pub fn period_index(&self, p: Period) -> Option<usize> {
        let first = self.periods[0].ordinal();
        let off = p.ordinal() - first;
        if off >= 0 && (off as usize) < self.periods.len() {
            Some(off as usize)
        } else {
            None
        }
    }

    /// Cell value by country index, period index, and column index.
    pub fn value(&self, ci: usize, pi: usize, col: usize) -> Option<f64> {
        self.columns[col].values[ci * self.periods.len() + pi]
    }

    /// Contiguous per-country slice of one column.
    pub fn country_series(&self, ci: usize, col: usize) -> &[Option<f64>] {
        let t = self.periods.len();
        &self.columns[col].values[ci * t..(ci + 1) * t]
    }

    /// Add (or replace) a column, returning a new panel.
    pub fn with_column(&self, column: Column) -> Result<Self, DataError> {
        let mut out = self.clone();
        if let Some(&k) = out.col_index.get(&column.name) {
            out.columns[k] = column;
            return Ok(out);
        }
        let cells = out.countries.len() * out.periods.len();
        if column.values.len() != cells {
            return Err(DataError::BadIndex {
                detail: format!("column `{}` has wrong cell count", column.name),
            });
        }
        out.col_index.insert(column.name.clone(), out.columns.len());
        out.columns.push(column);
        Ok(out)
    }

    /// True when the country row at `pi` has no data in any column.
    pub fn row_all_missing(&self, ci: usize, pi: usize) -> bool {
        self.columns.iter().all(|c| c.values[ci * self.periods.len() + pi].is_none())
    }

    /// A new panel whose countries are `picks` (indices into this panel,
    /// repeats allowed), renamed R000, R001, ... — the country-block
    /// bootstrap resample.
    pub fn resample_countries(&self, picks: &[usize]) -> Result<Self, DataError> {
        let t = self.n_periods();
        let countries: Vec<String> = (0..picks.len()).map(|i| format!("R{i:03}")).collect();
        let columns = self
            .columns
            .iter()
            .map(|c| {
                let mut values = Vec::with_capacity(picks.len() * t);
                for &src in picks {
                    values.extend_from_slice(&c.values[src * t..(src + 1) * t]);
                }
                Column { name: c.name.clone(), transform: c.transform, values }
            })
            .collect();
        let mut out = PanelDataset::new(countries, self.periods.clone(), columns)?;
        out.transformed = self.transformed;
        Ok(out)
    }

    /// Names of columns whose non-missing cells have zero sample variance.
    ///
    /// Surfaced so callers can decide whether to exclude constant policy
    /// series (they carry no identifying variation).
    pub fn zero_variance_columns(&self) -> Vec<String> {
        self.columns
            .iter()
            .filter(|c| {
                let vals: Vec<f64> = c.values.iter().flatten().copied().collect();
                if vals.len() < 2 {
                    return false;
                }
                let first = vals[0];
                vals.iter().all(|&v| v == first)
            })
            .map(|c| c.name.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periods(start: &str, n: usize) -> Vec<Period> {
        let p0: Period = start.parse().unwrap();
        (0..n as i64).map(|k| p0.offset(k)).collect()
    }

    #[test]
    fn rejects_gapped_index() {
        let err = PanelDataset::new(
            vec!["AT".into()],
            vec!["1999-Q1".parse().unwrap(), "1999-Q3".parse().unwrap()],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err.code(), "bad_index");
    }

    #[test]
    fn rejects_non_finite_cells() {
        let err = PanelDataset::new(
            vec!["AT".into()],
            periods("1999-Q1", 2),
            vec![Column {
                name: "x".into(),
                transform: Transform::Level,
                values: vec![Some(1.0), Some(f64::NAN)],
            }],
        )
        .unwrap_err();
        assert_eq!(err.code(), "non_finite_value");
    }

    #[test]
    fn zero_variance_detection() {
        let panel = PanelDataset::new(
            vec!["AT".into()],
            periods("1999-Q1", 3),
            vec![
                Column {
                    name: "flat".into(),
                    transform: Transform::Level,
                    values: vec![Some(2.0), Some(2.0), Some(2.0)],
                },
                Column {
                    name: "moves".into(),
                    transform: Transform::Level,
                    values: vec![Some(1.0), Some(2.0), None],
                },
            ],
        )
        .unwrap();
        assert_eq!(panel.zero_variance_columns(), vec!["flat".to_string()]);
    }
}
