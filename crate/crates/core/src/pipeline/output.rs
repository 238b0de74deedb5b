//! Output bundle rows and writers. Rows are sorted canonically before
//! writing so that identical runs produce byte-identical files.

use std::path::Path;

use serde::Serialize;

use crate::data::SummaryRow;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WeightRow {
    pub outcome: String,
    pub policy: String,
    pub horizon: usize,
    pub model: String,
    pub weight: f64,
    pub criterion: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IrfRow {
    pub outcome: String,
    pub policy: String,
    pub model: String,
    pub horizon: usize,
    pub regime: String,
    pub value: f64,
    pub se: Option<f64>,
    pub se_kind: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TestRow {
    pub outcome: String,
    pub policy: String,
    pub horizon: usize,
    pub prop_accept: f64,
    /// Median raw p-value over the (country, period) cells.
    pub raw_p_summary: f64,
    pub adj_method: String,
    pub adj_reject_frac: f64,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FactorRow {
    pub outcome: String,
    pub policy: String,
    pub horizon: usize,
    pub model: String,
    pub r: usize,
    pub ssr: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
struct SummaryOut<'a> {
    country: &'a str,
    series: &'a str,
    mean: Option<f64>,
    sd: Option<f64>,
    n: usize,
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> crate::Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub(crate) fn write_summary(path: &Path, rows: &[SummaryRow]) -> crate::Result<()> {
    let out: Vec<SummaryOut> = rows
        .iter()
        .map(|r| SummaryOut {
            country: &r.country,
            series: &r.column,
            mean: r.mean,
            sd: r.sd,
            n: r.n,
        })
        .collect();
    write_csv(path, &out)
}

/// Canonical model ordering for output rows.
pub(crate) fn model_order(model: &str) -> usize {
    match model {
        "baseline" => 0,
        "A" => 1,
        "B" => 2,
        "C" => 3,
        "D" => 4,
        "E" => 5,
        "average" => 6,
        _ => 7,
    }
}
