//! Python bindings: the main types and operations of the panel toolkit.
//!
//! Build with `cargo build -p lpma-py --release`, then import the produced
//! `liblpma_py.so` as `lpma_py` (see `python/smoke_test.py`, which wires
//! the search path up for you).

use std::collections::HashMap;
use std::path::PathBuf;

use nalgebra::DMatrix;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lpma::data::{
    self, apply_transforms, build_regimes, summary_stats, PanelSchema, Transform,
};
use lpma::inference::{self, AdjustMethod};
use lpma::lab::{run_monte_carlo, McOptions, SimConfig};
use lpma::mallows::{solve_weights_qp, CandidateSet};
use lpma::pipeline::{run_pipeline, RunConfig};
use lpma::projection::ModelForm;

fn to_py_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn parse_transform(tag: &str) -> PyResult<Transform> {
    match tag {
        "level" => Ok(Transform::Level),
        "log_diff_100" => Ok(Transform::LogDiff100),
        "diff" => Ok(Transform::Diff),
        other => Err(PyValueError::new_err(format!(
            "unknown transform `{other}` (use level, log_diff_100, diff)"
        ))),
    }
}

/// A loaded country × quarter panel.
#[pyclass]
struct Panel {
    inner: data::PanelDataset,
}

#[pymethods]
impl Panel {
    /// Load a wide CSV (`country,period,<series...>`) with a
    /// name -> transform mapping.
    #[staticmethod]
    fn from_csv(path: PathBuf, schema: HashMap<String, String>) -> PyResult<Self> {
        let mut names: Vec<&String> = schema.keys().collect();
        names.sort();
        let mut columns = Vec::with_capacity(names.len());
        for name in names {
            columns.push(data::ColumnSchema {
                name: name.clone(),
                transform: parse_transform(&schema[name])?,
            });
        }
        let panel =
            data::load_panel(&path, &PanelSchema { columns }).map_err(to_py_err)?;
        Ok(Panel { inner: panel })
    }

    /// Apply every column's transform tag, returning a new panel.
    fn apply_transforms(&self) -> PyResult<Panel> {
        Ok(Panel { inner: apply_transforms(&self.inner).map_err(to_py_err)? })
    }

    #[getter]
    fn countries(&self) -> Vec<String> {
        self.inner.countries().to_vec()
    }

    #[getter]
    fn periods(&self) -> Vec<String> {
        self.inner.periods().iter().map(|p| p.to_string()).collect()
    }

    #[getter]
    fn columns(&self) -> Vec<String> {
        self.inner.columns().iter().map(|c| c.name.clone()).collect()
    }

    /// One country's series as a list with None for missing cells.
    fn series(&self, country: &str, column: &str) -> PyResult<Vec<Option<f64>>> {
        let ci = self
            .inner
            .countries()
            .iter()
            .position(|c| c == country)
            .ok_or_else(|| PyValueError::new_err(format!("unknown country `{country}`")))?;
        let col = self
            .inner
            .column_index(column)
            .ok_or_else(|| PyValueError::new_err(format!("unknown column `{column}`")))?;
        Ok(self.inner.country_series(ci, col).to_vec())
    }

    /// Per-country mean/sd rows: (country, column, mean, sd, n).
    fn summary(&self) -> Vec<(String, String, Option<f64>, Option<f64>, usize)> {
        summary_stats(&self.inner)
            .into_iter()
            .map(|r| (r.country, r.column, r.mean, r.sd, r.n))
            .collect()
    }

    /// Interest-rate regime variables from a rate level column:
    /// dict of name -> per-cell list (country-major).
    fn regimes(&self, rate_column: &str) -> PyResult<HashMap<String, Vec<Option<f64>>>> {
        let r = build_regimes(&self.inner, rate_column).map_err(to_py_err)?;
        let mut out = HashMap::new();
        out.insert("d_i_q".to_string(), r.d_i_q);
        out.insert("d_i_a".to_string(), r.d_i_a);
        out.insert("ind_q".to_string(), r.ind_q);
        out.insert("ind_a".to_string(), r.ind_a);
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Panel({} countries x {} quarters, {} columns)",
            self.inner.n_countries(),
            self.inner.n_periods(),
            self.inner.columns().len()
        )
    }
}

/// 100·ln(x_t/x_{t−1}) with missing propagation.
#[pyfunction]
fn log_diff_100(series: Vec<Option<f64>>) -> PyResult<Vec<Option<f64>>> {
    data::log_diff_100(&series).map_err(to_py_err)
}

/// Trend/cycle decomposition; returns (trend, cycle).
#[pyfunction]
#[pyo3(signature = (series, smoothing=1600.0))]
fn hp_filter(series: Vec<f64>, smoothing: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    data::hp_filter(&series, smoothing).map_err(to_py_err)
}

/// Mallows weights over residual columns: `residuals` is T×M (list of
/// rows), `dims` the per-model column counts, `sigma2` the noise variance
/// from the largest model. Returns (weights, criterion value).
#[pyfunction]
fn mallows_weights(
    residuals: Vec<Vec<f64>>,
    dims: Vec<usize>,
    sigma2: f64,
) -> PyResult<(Vec<f64>, f64)> {
    let t = residuals.len();
    let m = dims.len();
    if t == 0 || residuals.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("residuals must be a non-empty T x M matrix"));
    }
    let u = DMatrix::from_fn(t, m, |r, c| residuals[r][c]);
    let forms: Vec<ModelForm> = ModelForm::CANDIDATES.iter().copied().cycle().take(m).collect();
    let cand = CandidateSet {
        horizon: 1,
        forms,
        fits: vec![],
        dims: dims.clone(),
        residual_matrix: u.clone(),
        sigma2_hat: sigma2,
        sigma2_degenerate: sigma2 == 0.0,
    };
    let a = u.tr_mul(&u) / t as f64;
    let b: Vec<f64> = dims.iter().map(|&d| 2.0 * sigma2 / t as f64 * d as f64).collect();
    let (weights, _, _, _) = solve_weights_qp(&a, &b, &dims).map_err(to_py_err)?;
    let value = lpma::mallows::mallows_criterion(&weights, &cand).map_err(to_py_err)?;
    Ok((weights, value))
}

/// Multiple-testing adjustment: method is "bonferroni", "holm", or
/// "benjamini_yekutieli".
#[pyfunction]
fn adjust_pvalues(pvalues: Vec<f64>, method: &str) -> PyResult<Vec<f64>> {
    let m = AdjustMethod::parse(method)
        .ok_or_else(|| PyValueError::new_err(format!("unknown method `{method}`")))?;
    inference::adjust_pvalues(&pvalues, m).map_err(to_py_err)
}

/// Fraction of p-values strictly above alpha.
#[pyfunction]
#[pyo3(signature = (pvalues, alpha=0.1))]
fn acceptance_proportion(pvalues: Vec<f64>, alpha: f64) -> PyResult<f64> {
    inference::acceptance_proportion(&pvalues, alpha).map_err(to_py_err)
}

/// Run the full pipeline from a TOML config; returns a dict with the
/// written files and skipped horizons.
#[pyfunction]
#[pyo3(signature = (config_path, out_dir, threads=None, seed=None))]
fn run(
    py: Python<'_>,
    config_path: PathBuf,
    out_dir: PathBuf,
    threads: Option<usize>,
    seed: Option<u64>,
) -> PyResult<Py<pyo3::types::PyDict>> {
    let mut config = RunConfig::from_path(&config_path).map_err(to_py_err)?;
    if let Some(t) = threads {
        config.options.threads = t;
    }
    if let Some(s) = seed {
        config.options.seed = Some(s);
    }
    let summary = run_pipeline(&config, &out_dir).map_err(to_py_err)?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("out_dir", summary.out_dir)?;
    dict.set_item("files", summary.files)?;
    dict.set_item("cells", summary.cells)?;
    dict.set_item("skipped", summary.skipped)?;
    Ok(dict.unbind())
}

/// Run a Monte Carlo experiment from a simulation TOML; returns the
/// report as a JSON string.
#[pyfunction]
fn simulate(config_toml: &str) -> PyResult<String> {
    let sim = SimConfig::from_toml(config_toml).map_err(to_py_err)?;
    let options = McOptions {
        horizons: sim.run.horizons.clone(),
        alpha: sim.run.alpha,
        bandwidth: None,
        run_equality_test: sim.run.equality_test,
        factor_r_max: sim.run.factor_r_max,
        compute_cv1: sim.run.cv1,
        truth_draws: sim.run.truth_draws,
    };
    let report =
        run_monte_carlo(&sim.dgp, sim.run.replications, &options).map_err(to_py_err)?;
    serde_json_string(&report)
}

fn serde_json_string<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(to_py_err)
}

#[pymodule]
fn lpma_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Panel>()?;
    m.add_function(wrap_pyfunction!(log_diff_100, m)?)?;
    m.add_function(wrap_pyfunction!(hp_filter, m)?)?;
    m.add_function(wrap_pyfunction!(mallows_weights, m)?)?;
    m.add_function(wrap_pyfunction!(adjust_pvalues, m)?)?;
    m.add_function(wrap_pyfunction!(acceptance_proportion, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
