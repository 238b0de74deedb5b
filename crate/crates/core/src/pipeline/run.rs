//! Pipeline orchestration.

use std::path::{Path, PathBuf};

use rand::prelude::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{
    add_output_gap, apply_transforms, attach_regime_columns, build_regimes, load_forecasts,
    load_panel, merge_anticipation, summary_stats, ColumnSchema, PanelDataset, PanelSchema,
    PeriodRange, RegimeVariables, FORECAST_COLUMN, OUTPUT_GAP_COLUMN,
};
use crate::factors::averaged_irf_with_factors;
use crate::inference::{build_test_report, equality_test, with_robust_cov, PointwiseTest};
use crate::mallows::{
    averaged_point_with_se, solve_cv1_weights, solve_weights, CandidateSet, MallowsWeights,
    RegimeScenario,
};
use crate::projection::{
    candidate_designs, fit_horizon, HorizonFit, ModelForm, ModelSpec, ProjectionError,
};
use crate::{Error, Result, SCHEMA_VERSION};

use super::config::{RegimeEvalMode, RunConfig};
use super::output::{
    model_order, write_csv, write_summary, FactorRow, IrfRow, TestRow, WeightRow,
};

/// What a pipeline run produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    /// (outcome, policy) cells processed.
    pub cells: usize,
    /// Horizons skipped for lack of data, as "outcome/policy/k: reason".
    pub skipped: Vec<String>,
}

/// In-memory output bundle, before any file is written.
#[derive(Debug, Clone)]
pub struct PipelineArtifacts {
    pub weights: Vec<WeightRow>,
    pub irf: Vec<IrfRow>,
    pub tests: Vec<TestRow>,
    pub factors: Vec<FactorRow>,
    pub summary: Vec<crate::data::SummaryRow>,
    pub skipped: Vec<String>,
    pub zero_variance: Vec<String>,
    pub quartiles_quarterly: (f64, f64),
    pub quartiles_annual: (f64, f64),
    pub cells: usize,
}

/// One coefficient row of the `fit` export.
#[derive(Debug, Clone, Serialize)]
pub struct CoefRow {
    pub outcome: String,
    pub policy: String,
    pub model: String,
    pub horizon: usize,
    pub term: String,
    pub coef: f64,
    pub se: Option<f64>,
}

#[derive(Debug, Serialize)]
struct RunJson<'a> {
    schema_version: &'static str,
    version: &'static str,
    seed: Option<u64>,
    quartiles_quarterly: (f64, f64),
    quartiles_annual: (f64, f64),
    zero_variance_columns: Vec<String>,
    skipped: Vec<String>,
    files: Vec<String>,
    config: &'a RunConfig,
}

struct CellOutput {
    weights: Vec<WeightRow>,
    irf: Vec<IrfRow>,
    tests: Vec<TestRow>,
    factors: Vec<FactorRow>,
    skipped: Vec<String>,
}

fn with_pool<T>(config: &RunConfig, job: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    if config.options.threads == 0 {
        job()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.options.threads)
            .build()
            .map_err(|e| {
                Error::Config(super::ConfigError::BadValue {
                    field: "options.threads".into(),
                    detail: e.to_string(),
                })
            })?;
        pool.install(job)
    }
}

/// Compute the whole output bundle in memory.
pub fn compute_artifacts(config: &RunConfig) -> Result<PipelineArtifacts> {
    config.validate()?;
    with_pool(config, || compute_inner(config))
}

/// Run the full pipeline and write the output bundle into `out_dir`.
pub fn run_pipeline(config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    let artifacts = compute_artifacts(config)?;
    write_bundle(config, &artifacts, out_dir)
}

fn write_bundle(
    config: &RunConfig,
    artifacts: &PipelineArtifacts,
    out_dir: &Path,
) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir)?;
    let mut files = vec![
        "irf.csv".to_string(),
        "weights.csv".to_string(),
        "tests.csv".to_string(),
        "summary.csv".to_string(),
        "run.json".to_string(),
    ];
    write_csv(&out_dir.join("irf.csv"), &artifacts.irf)?;
    write_csv(&out_dir.join("weights.csv"), &artifacts.weights)?;
    write_csv(&out_dir.join("tests.csv"), &artifacts.tests)?;
    write_summary(&out_dir.join("summary.csv"), &artifacts.summary)?;
    if config.options.factors {
        write_csv(&out_dir.join("factors.csv"), &artifacts.factors)?;
        files.push("factors.csv".to_string());
    }
    files.sort();
    let run_json = RunJson {
        schema_version: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION"),
        seed: config.options.seed,
        quartiles_quarterly: artifacts.quartiles_quarterly,
        quartiles_annual: artifacts.quartiles_annual,
        zero_variance_columns: artifacts.zero_variance.clone(),
        skipped: artifacts.skipped.clone(),
        files: files.clone(),
        config,
    };
    std::fs::write(out_dir.join("run.json"), serde_json::to_string_pretty(&run_json)? + "\n")?;
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        files,
        cells: artifacts.cells,
        skipped: artifacts.skipped.clone(),
    })
}

/// Write one artifact of the bundle (for the thin single-output
/// subcommands). `which` is the file stem, e.g. "weights".
pub fn write_artifact(
    config: &RunConfig,
    artifacts: &PipelineArtifacts,
    which: &str,
    out_dir: &Path,
) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(format!("{which}.csv"));
    match which {
        "irf" => write_csv(&path, &artifacts.irf)?,
        "weights" => write_csv(&path, &artifacts.weights)?,
        "tests" => write_csv(&path, &artifacts.tests)?,
        "summary" => write_summary(&path, &artifacts.summary)?,
        "factors" => write_csv(&path, &artifacts.factors)?,
        other => {
            return Err(Error::Config(super::ConfigError::BadValue {
                field: "artifact".into(),
                detail: format!("unknown artifact `{other}`"),
            }))
        }
    }
    let _ = config;
    Ok(path)
}

/// Loaded and derived inputs shared by the bundle and the fit export.
struct Prepared {
    panel: PanelDataset,
    regimes: RegimeVariables,
    summary: Vec<crate::data::SummaryRow>,
    zero_variance: Vec<String>,
    window: Option<PeriodRange>,
    scenarios: Vec<RegimeScenario>,
    quartiles_quarterly: (f64, f64),
    quartiles_annual: (f64, f64),
}

fn prepare(config: &RunConfig) -> Result<Prepared> {
    let schema = PanelSchema {
        columns: config
            .series
            .iter()
            .map(|(name, transform)| ColumnSchema { name: name.clone(), transform: *transform })
            .collect(),
    };
    let mut levels = load_panel(&config.data.panel, &schema)?;
    let regimes = build_regimes(&levels, &config.data.rate_column)?;
    let zero_variance = levels.zero_variance_columns();
    if config.options.output_gap {
        levels =
            add_output_gap(&levels, &config.options.output_gap_source, config.options.hp_lambda)?;
    }
    if config.options.anticipation {
        let records = load_forecasts(config.data.forecasts.as_ref().expect("validated"))?;
        levels = merge_anticipation(&levels, &records)?;
    }
    let transformed = apply_transforms(&levels)?;
    let panel = attach_regime_columns(&transformed, &regimes)?;
    let summary = summary_stats(&panel);

    let window: Option<PeriodRange> = config
        .model
        .window
        .as_ref()
        .map(|w| PeriodRange::new(w.start.parse().unwrap(), w.end.parse().unwrap()));

    let in_window = |pi: usize| -> bool {
        window.map_or(true, |w| w.contains(panel.periods()[pi]))
    };
    let pooled = |grid: &[Option<f64>]| -> Vec<f64> {
        let t = panel.n_periods();
        grid.iter()
            .enumerate()
            .filter(|(i, _)| in_window(i % t))
            .filter_map(|(_, v)| *v)
            .collect()
    };
    let (qq, qa) = match config.options.regime_eval {
        RegimeEvalMode::Fixed => {
            (config.options.fixed_quartiles_q, config.options.fixed_quartiles_a)
        }
        RegimeEvalMode::SampleQuartiles => (
            quartile_pair(&mut pooled(&regimes.d_i_q)),
            quartile_pair(&mut pooled(&regimes.d_i_a)),
        ),
    };
    let scenarios = vec![
        RegimeScenario::loosening(qq.0, qa.0),
        RegimeScenario::tightening(qq.1, qa.1),
    ];
    Ok(Prepared {
        panel,
        regimes,
        summary,
        zero_variance,
        window,
        scenarios,
        quartiles_quarterly: qq,
        quartiles_annual: qa,
    })
}

fn compute_inner(config: &RunConfig) -> Result<PipelineArtifacts> {
    let prepared = prepare(config)?;
    let Prepared {
        panel,
        regimes,
        summary,
        zero_variance,
        window,
        scenarios,
        quartiles_quarterly: qq,
        quartiles_annual: qa,
    } = prepared;

    let pairs: Vec<(String, String)> = config
        .model
        .outcomes
        .iter()
        .flat_map(|o| config.model.policies.iter().map(move |p| (o.clone(), p.clone())))
        .collect();
    let cell_outputs: Vec<Result<CellOutput>> = pairs
        .par_iter()
        .map(|(outcome, policy)| {
            run_cell(config, &panel, &regimes, outcome, policy, &scenarios, window.as_ref())
        })
        .collect();

    let mut weights = Vec::new();
    let mut irf = Vec::new();
    let mut tests = Vec::new();
    let mut factors = Vec::new();
    let mut skipped = Vec::new();
    for cell in cell_outputs {
        let cell = cell?;
        weights.extend(cell.weights);
        irf.extend(cell.irf);
        tests.extend(cell.tests);
        factors.extend(cell.factors);
        skipped.extend(cell.skipped);
    }
    weights.sort_by(|a, b| {
        (&a.outcome, &a.policy, a.horizon, model_order(&a.model))
            .cmp(&(&b.outcome, &b.policy, b.horizon, model_order(&b.model)))
    });
    irf.sort_by(|a, b| {
        (&a.outcome, &a.policy, model_order(&a.model), a.horizon, &a.regime)
            .cmp(&(&b.outcome, &b.policy, model_order(&b.model), b.horizon, &b.regime))
    });
    tests.sort_by(|a, b| {
        (&a.outcome, &a.policy, a.horizon, &a.adj_method)
            .cmp(&(&b.outcome, &b.policy, b.horizon, &b.adj_method))
    });
    factors.sort_by(|a, b| {
        (&a.outcome, &a.policy, a.horizon, model_order(&a.model))
            .cmp(&(&b.outcome, &b.policy, b.horizon, model_order(&b.model)))
    });

    Ok(PipelineArtifacts {
        weights,
        irf,
        tests,
        factors,
        summary,
        skipped,
        zero_variance,
        quartiles_quarterly: qq,
        quartiles_annual: qa,
        cells: pairs.len(),
    })
}

/// Fit every (outcome, policy, model, horizon) and export the coefficient
/// table `coeffs.csv` with robust standard errors.
pub fn export_fits(config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    config.validate()?;
    with_pool(config, || export_fits_inner(config, out_dir))
}

fn export_fits_inner(config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir)?;
    let prepared = prepare(config)?;
    let panel = &prepared.panel;
    let regimes = &prepared.regimes;
    let window = prepared.window;
    let mut rows: Vec<CoefRow> = Vec::new();
    let mut skipped = Vec::new();
    let mut cells = 0usize;
    for outcome in &config.model.outcomes {
        for policy in &config.model.policies {
            cells += 1;
            let mut spec = ModelSpec::new(
                ModelForm::Baseline,
                outcome.clone(),
                policy.clone(),
                config.model.controls.clone(),
            );
            if config.options.anticipation {
                spec.extra_controls.push(FORECAST_COLUMN.into());
            }
            if config.options.output_gap {
                spec.extra_controls.push(OUTPUT_GAP_COLUMN.into());
            }
            for &k in &config.model.horizons {
                let bandwidth = config.inference.bandwidth.for_horizon(k);
                let designs =
                    match candidate_designs(panel, regimes, &spec, k, window.as_ref()) {
                        Ok(d) => d,
                        Err(
                            e @ (ProjectionError::EmptyDesign { .. }
                            | ProjectionError::InsufficientObservations { .. }),
                        ) => {
                            skipped.push(format!("{outcome}/{policy}/h{k}: {e}"));
                            continue;
                        }
                        Err(e) => return Err(e.into()),
                    };
                let mut all = vec![(ModelForm::Baseline, designs.baseline)];
                all.extend(designs.candidates);
                for (form, design) in all {
                    let fit = match fit_horizon(design) {
                        Ok(f) => with_robust_cov(f, Some(bandwidth))?,
                        Err(
                            e @ (ProjectionError::EmptyDesign { .. }
                            | ProjectionError::InsufficientObservations { .. }),
                        ) => {
                            skipped.push(format!("{outcome}/{policy}/{form}/h{k}: {e}"));
                            continue;
                        }
                        Err(e) => return Err(e.into()),
                    };
                    let cov = fit.robust_cov.as_ref();
                    for (i, term) in fit.names.iter().enumerate() {
                        rows.push(CoefRow {
                            outcome: outcome.clone(),
                            policy: policy.clone(),
                            model: form.label().into(),
                            horizon: k,
                            term: term.clone(),
                            coef: fit.coefficients[i],
                            se: cov.and_then(|c| c.se(term)),
                        });
                    }
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        (&a.outcome, &a.policy, model_order(&a.model), a.horizon)
            .cmp(&(&b.outcome, &b.policy, model_order(&b.model), b.horizon))
    });
    write_csv(&out_dir.join("coeffs.csv"), &rows)?;
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        files: vec!["coeffs.csv".to_string()],
        cells,
        skipped,
    })
}

/// Lower and upper quartiles with linear interpolation.
fn quartile_pair(values: &mut Vec<f64>) -> (f64, f64) {
    assert!(!values.is_empty(), "no regime values to take quartiles of");
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| -> f64 {
        let h = (values.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let frac = h - lo as f64;
        if lo + 1 < values.len() {
            values[lo] + frac * (values[lo + 1] - values[lo])
        } else {
            values[lo]
        }
    };
    (q(0.25), q(0.75))
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    config: &RunConfig,
    panel: &PanelDataset,
    regimes: &RegimeVariables,
    outcome: &str,
    policy: &str,
    scenarios: &[RegimeScenario],
    window: Option<&PeriodRange>,
) -> Result<CellOutput> {
    let mut spec = ModelSpec::new(
        ModelForm::Baseline,
        outcome,
        policy,
        config.model.controls.clone(),
    );
    if config.options.anticipation {
        spec.extra_controls.push(FORECAST_COLUMN.into());
    }
    if config.options.output_gap {
        spec.extra_controls.push(OUTPUT_GAP_COLUMN.into());
    }

    let mut out = CellOutput {
        weights: Vec::new(),
        irf: Vec::new(),
        tests: Vec::new(),
        factors: Vec::new(),
        skipped: Vec::new(),
    };
    let mut pointwise: Vec<PointwiseTest> = Vec::new();
    let mut bootstrap_targets: Vec<usize> = Vec::new();

    for &k in &config.model.horizons {
        let bandwidth = config.inference.bandwidth.for_horizon(k);
        let designs = match candidate_designs(panel, regimes, &spec, k, window) {
            Ok(d) => d,
            Err(
                e @ (ProjectionError::EmptyDesign { .. }
                | ProjectionError::InsufficientObservations { .. }),
            ) => {
                out.skipped.push(format!("{outcome}/{policy}/h{k}: {e}"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let baseline_fit = match fit_horizon(designs.baseline) {
            Ok(f) => with_robust_cov(f, Some(bandwidth))?,
            Err(
                e @ (ProjectionError::EmptyDesign { .. }
                | ProjectionError::InsufficientObservations { .. }),
            ) => {
                out.skipped.push(format!("{outcome}/{policy}/h{k}: {e}"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let mut fits: Vec<(ModelForm, HorizonFit)> = Vec::with_capacity(5);
        let mut undersized = None;
        for (form, design) in designs.candidates {
            match fit_horizon(design) {
                Ok(f) => fits.push((form, f)),
                Err(
                    e @ (ProjectionError::EmptyDesign { .. }
                    | ProjectionError::InsufficientObservations { .. }),
                ) => {
                    undersized = Some(e);
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        if let Some(e) = undersized {
            out.skipped.push(format!("{outcome}/{policy}/h{k}: {e}"));
            continue;
        }
        let cand = CandidateSet::from_fits(fits, None)?;
        let weights =
            if config.options.cv1 { solve_cv1_weights(&cand)? } else { solve_weights(&cand)? };

        for (form, &w) in cand.forms.iter().zip(&weights.weights) {
            out.weights.push(WeightRow {
                outcome: outcome.into(),
                policy: policy.into(),
                horizon: k,
                model: form.label().into(),
                weight: w,
                criterion: weights.criterion_value,
            });
        }

        // Baseline rows: regime-invariant by construction.
        let baseline_value = baseline_fit.coef(policy).unwrap_or(f64::NAN);
        let baseline_se =
            baseline_fit.robust_cov.as_ref().and_then(|c| c.se(policy));
        for scenario in scenarios {
            out.irf.push(IrfRow {
                outcome: outcome.into(),
                policy: policy.into(),
                model: "baseline".into(),
                horizon: k,
                regime: scenario.label.clone(),
                value: baseline_value,
                se: baseline_se,
                se_kind: "delta".into(),
            });
        }
        for scenario in scenarios {
            let point = averaged_point_with_se(&cand, &weights, scenario, bandwidth)?;
            let ses = point.per_model_se.clone().unwrap_or_default();
            for ((form, value), se) in point.per_model.iter().zip(ses) {
                out.irf.push(IrfRow {
                    outcome: outcome.into(),
                    policy: policy.into(),
                    model: form.label().into(),
                    horizon: k,
                    regime: scenario.label.clone(),
                    value: *value,
                    se: Some(se),
                    se_kind: "delta".into(),
                });
            }
            bootstrap_targets.push(out.irf.len());
            out.irf.push(IrfRow {
                outcome: outcome.into(),
                policy: policy.into(),
                model: "average".into(),
                horizon: k,
                regime: scenario.label.clone(),
                value: point.value,
                se: point.se,
                se_kind: "delta".into(),
            });
        }

        let refs: Vec<&HorizonFit> = cand.fits.iter().collect();
        pointwise.push(equality_test(&refs, &weights.weights, &baseline_fit, regimes, bandwidth)?);

        if config.options.factors {
            let fr = averaged_irf_with_factors(
                panel,
                regimes,
                &spec,
                k,
                config.options.factor_r_max,
                scenarios,
                bandwidth,
                window,
            )?;
            for d in &fr.diagnostics {
                out.factors.push(FactorRow {
                    outcome: outcome.into(),
                    policy: policy.into(),
                    horizon: d.horizon,
                    model: d.model.label().into(),
                    r: d.r,
                    ssr: d.ssr,
                    iterations: d.iterations,
                    converged: d.converged,
                });
            }
            for point in &fr.points {
                out.irf.push(IrfRow {
                    outcome: outcome.into(),
                    policy: policy.into(),
                    model: "average_factors".into(),
                    horizon: k,
                    regime: point.regime.clone(),
                    value: point.value,
                    se: point.se,
                    se_kind: "delta".into(),
                });
            }
        }
    }

    if !pointwise.is_empty() {
        let report = build_test_report(outcome, policy, config.inference.alpha, &pointwise)?;
        for (h_idx, ht) in report.per_horizon.iter().enumerate() {
            for method in &report.methods {
                out.tests.push(TestRow {
                    outcome: outcome.into(),
                    policy: policy.into(),
                    horizon: ht.horizon,
                    prop_accept: ht.prop_accept,
                    raw_p_summary: ht.median_raw_p,
                    adj_method: method.method.label().into(),
                    adj_reject_frac: method.per_horizon_reject_frac[h_idx],
                    verdict: method.verdict.label().into(),
                });
            }
        }
    }

    if config.options.bootstrap > 0 {
        let seed = config.options.seed.expect("validated");
        let ses = bootstrap_averaged_se(
            config, panel, regimes, &spec, scenarios, window, seed,
        )?;
        for idx in bootstrap_targets {
            let row = &mut out.irf[idx];
            if let Some(se) = ses.get(&(row.horizon, row.regime.clone())) {
                row.se = Some(*se);
                row.se_kind = "bootstrap".into();
            }
        }
    }
    Ok(out)
}

/// Country-block bootstrap of the averaged IRF: resample countries with
/// replacement, refit everything including the weights, and report the
/// standard deviation of the averaged value per (horizon, regime).
fn bootstrap_averaged_se(
    config: &RunConfig,
    panel: &PanelDataset,
    regimes: &RegimeVariables,
    spec: &ModelSpec,
    scenarios: &[RegimeScenario],
    window: Option<&PeriodRange>,
    seed: u64,
) -> Result<std::collections::HashMap<(usize, String), f64>> {
    let n = panel.n_countries();
    let all: Vec<usize> = (0..n).collect();
    let mut draws: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<(usize, String)> = Vec::new();
    for &k in &config.model.horizons {
        for s in scenarios {
            labels.push((k, s.label.clone()));
        }
    }
    for rep in 0..config.options.bootstrap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(rep as u64 + 1);
        let picks: Vec<usize> =
            (0..n).map(|_| *all.choose(&mut rng).expect("non-empty")).collect();
        let (bpanel, bregimes) = resample_panel(panel, regimes, &picks)?;
        let mut values = Vec::with_capacity(labels.len());
        let mut failed = false;
        for &k in &config.model.horizons {
            let bandwidth = config.inference.bandwidth.for_horizon(k);
            let _ = bandwidth;
            let result = (|| -> Result<Vec<f64>> {
                let designs = candidate_designs(&bpanel, &bregimes, spec, k, window)?;
                let mut fits = Vec::with_capacity(5);
                for (form, design) in designs.candidates {
                    fits.push((form, fit_horizon(design)?));
                }
                let cand = CandidateSet::from_fits(fits, None)?;
                let weights: MallowsWeights = if config.options.cv1 {
                    solve_cv1_weights(&cand)?
                } else {
                    solve_weights(&cand)?
                };
                let mut vals = Vec::with_capacity(scenarios.len());
                for scenario in scenarios {
                    let mut value = 0.0;
                    for (fit, &w) in cand.fits.iter().zip(&weights.weights) {
                        let (me, _) =
                            crate::projection::marginal_effect(fit, &scenario.ctx);
                        value += w * me;
                    }
                    vals.push(value);
                }
                Ok(vals)
            })();
            match result {
                Ok(vals) => values.extend(vals),
                Err(_) => {
                    failed = true;
                    break;
                }
            }
        }
        if !failed && values.len() == labels.len() {
            draws.push(values);
        }
    }
    let mut out = std::collections::HashMap::new();
    if draws.len() >= 2 {
        for (j, label) in labels.iter().enumerate() {
            let vals: Vec<f64> = draws.iter().map(|d| d[j]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                / (vals.len() - 1) as f64;
            out.insert(label.clone(), var.sqrt());
        }
    }
    Ok(out)
}

fn resample_panel(
    panel: &PanelDataset,
    regimes: &RegimeVariables,
    picks: &[usize],
) -> Result<(PanelDataset, RegimeVariables)> {
    Ok((panel.resample_countries(picks)?, regimes.resample(picks)))
}
