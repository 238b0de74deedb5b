//! `lpma` — config-driven front end over the panel toolkit.
//!
//! Subcommands mirror the pipeline stages: `run` writes the whole output
//! bundle; `fit`, `weights`, `irf`, `test`, `summary` are thin wrappers
//! that emit one table; `hpfilter` decomposes panel series; `simulate`
//! runs a Monte Carlo experiment from a DGP config.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use lpma::data::{hp_filter_column, load_panel, ColumnSchema, PanelSchema, Transform};
use lpma::lab::{run_monte_carlo, McOptions, McReport, SimConfig};
use lpma::pipeline::{
    compute_artifacts, export_fits, run_pipeline, write_artifact, RunConfig,
};
use lpma::projection::ModelForm;

#[derive(Parser)]
#[command(
    name = "lpma",
    version,
    about = "Local projections with Mallows model averaging for quarterly policy panels"
)]
struct Cli {
    /// Output directory (defaults to ./out).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (overrides the config; 0 = library default).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// RNG seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: irf.csv, weights.csv, tests.csv,
    /// summary.csv, run.json (and factors.csv when enabled).
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit every model and export the coefficient table coeffs.csv.
    Fit {
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit only the per-horizon model weights.
    Weights {
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit only the impulse-response table.
    Irf {
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit only the equality-test table.
    Test {
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit only the per-country summary statistics.
    Summary {
        #[arg(long)]
        config: PathBuf,
    },
    /// Trend/cycle decomposition of one panel column.
    Hpfilter {
        /// Wide CSV with `country,period,<column>`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long, default_value_t = 1600.0)]
        lambda: f64,
    },
    /// Monte Carlo experiment from a DGP config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Serialize)]
struct ErrorReport {
    error: String,
    message: String,
}

fn fail(error: &lpma::Error) -> ExitCode {
    let report = ErrorReport { error: error.code(), message: error.to_string() };
    eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn load_config(path: &Path, cli: &Cli) -> Result<RunConfig, lpma::Error> {
    let mut config = RunConfig::from_path(path)?;
    if let Some(threads) = cli.threads {
        config.options.threads = threads;
    }
    if let Some(seed) = cli.seed {
        config.options.seed = Some(seed);
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<(), lpma::Error> {
    match &cli.command {
        Command::Run { config } => {
            let config = load_config(config, &cli)?;
            let summary = run_pipeline(&config, &cli.out)?;
            println!(
                "wrote {} ({} cells{})",
                summary.files.join(", "),
                summary.cells,
                if summary.skipped.is_empty() {
                    String::new()
                } else {
                    format!(", {} horizon(s) skipped", summary.skipped.len())
                }
            );
        }
        Command::Fit { config } => {
            let config = load_config(config, &cli)?;
            let summary = export_fits(&config, &cli.out)?;
            println!("wrote {}", summary.files.join(", "));
        }
        Command::Weights { config } | Command::Irf { config } | Command::Test { config }
        | Command::Summary { config } => {
            let which = match &cli.command {
                Command::Weights { .. } => "weights",
                Command::Irf { .. } => "irf",
                Command::Test { .. } => "tests",
                _ => "summary",
            };
            let config = load_config(config, &cli)?;
            let artifacts = compute_artifacts(&config)?;
            let path = write_artifact(&config, &artifacts, which, &cli.out)?;
            println!("wrote {}", path.display());
        }
        Command::Hpfilter { input, column, lambda } => {
            run_hpfilter(input, column, *lambda, &cli.out)?;
        }
        Command::Simulate { config } => {
            let text = std::fs::read_to_string(config)?;
            let mut sim = SimConfig::from_toml(&text).map_err(lpma::Error::from)?;
            if let Some(seed) = cli.seed {
                sim.dgp.seed = seed;
            }
            if let Some(threads) = cli.threads {
                sim.run.threads = threads;
            }
            run_simulate(&sim, &cli.out)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct HpRow<'a> {
    country: &'a str,
    period: String,
    value: f64,
    trend: f64,
    cycle: f64,
}

fn run_hpfilter(input: &Path, column: &str, lambda: f64, out: &Path) -> Result<(), lpma::Error> {
    let schema = PanelSchema {
        columns: vec![ColumnSchema { name: column.to_string(), transform: Transform::Level }],
    };
    let panel = load_panel(input, &schema)?;
    let (trend, cycle) = hp_filter_column(&panel, column, lambda)?;
    std::fs::create_dir_all(out)?;
    let path = out.join("hpfilter.csv");
    let mut writer = csv::Writer::from_path(&path)?;
    let col = panel.column_index(column).expect("column loaded");
    let t = panel.n_periods();
    for (ci, country) in panel.countries().iter().enumerate() {
        for (pi, period) in panel.periods().iter().enumerate() {
            let idx = ci * t + pi;
            if let (Some(value), Some(tr), Some(cy)) =
                (panel.value(ci, pi, col), trend[idx], cycle[idx])
            {
                writer.serialize(HpRow {
                    country,
                    period: period.to_string(),
                    value,
                    trend: tr,
                    cycle: cy,
                })?;
            }
        }
    }
    writer.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct WeightMeanRow {
    horizon: usize,
    model: String,
    mean_weight: f64,
}

#[derive(Serialize)]
struct MetricRow {
    horizon: usize,
    metric: String,
    value: f64,
}

fn run_simulate(sim: &SimConfig, out: &Path) -> Result<(), lpma::Error> {
    let options = McOptions {
        horizons: sim.run.horizons.clone(),
        alpha: sim.run.alpha,
        bandwidth: None,
        run_equality_test: sim.run.equality_test,
        factor_r_max: sim.run.factor_r_max,
        compute_cv1: sim.run.cv1,
        truth_draws: sim.run.truth_draws,
    };
    let report: McReport = if sim.run.threads == 0 {
        run_monte_carlo(&sim.dgp, sim.run.replications, &options)?
    } else {
        let pool = rayon_pool(sim.run.threads)?;
        pool.install(|| run_monte_carlo(&sim.dgp, sim.run.replications, &options))?
    };

    std::fs::create_dir_all(out)?;
    let json_path = out.join("mc_report.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&report)? + "\n")?;

    // Plot-ready tables: mean weights and headline metrics per horizon.
    let mut weight_rows = Vec::new();
    let mut metric_rows = Vec::new();
    for &k in &sim.run.horizons {
        for form in ModelForm::CANDIDATES {
            weight_rows.push(WeightMeanRow {
                horizon: k,
                model: form.label().to_string(),
                mean_weight: report.mean_weight(form, k),
            });
        }
        for (loosening, label) in [(true, "bias_loosening"), (false, "bias_tightening")] {
            let (bias, se) = report.irf_bias(k, loosening);
            metric_rows.push(MetricRow { horizon: k, metric: label.into(), value: bias });
            metric_rows.push(MetricRow {
                horizon: k,
                metric: format!("{label}_se"),
                value: se,
            });
        }
        if k == 1 {
            let (identity, identity_se) =
                report.mean_se(1, |m| m.identity_residual.unwrap_or(f64::NAN));
            metric_rows.push(MetricRow {
                horizon: 1,
                metric: "identity_mean".into(),
                value: identity,
            });
            metric_rows.push(MetricRow {
                horizon: 1,
                metric: "identity_mc_se".into(),
                value: identity_se,
            });
            metric_rows.push(MetricRow {
                horizon: 1,
                metric: "msfe_averaged".into(),
                value: report.msfe_averaged(),
            });
            let singles = report.msfe_single();
            for (form, v) in ModelForm::CANDIDATES.iter().zip(singles) {
                metric_rows.push(MetricRow {
                    horizon: 1,
                    metric: format!("msfe_{}", form.label()),
                    value: v,
                });
            }
        }
        if sim.run.equality_test {
            metric_rows.push(MetricRow {
                horizon: k,
                metric: "eq_rejection_rate".into(),
                value: report.mean_eq_rejection(k),
            });
        }
    }
    let weights_path = out.join("mc_weights.csv");
    let mut writer = csv::Writer::from_path(&weights_path)?;
    for row in &weight_rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    let metrics_path = out.join("mc_metrics.csv");
    let mut writer = csv::Writer::from_path(&metrics_path)?;
    for row in &metric_rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    println!(
        "wrote {}, {}, {} ({} replications, {} failed)",
        json_path.display(),
        weights_path.display(),
        metrics_path.display(),
        report.replications,
        report.failed.len()
    );
    Ok(())
}

fn rayon_pool(threads: usize) -> Result<rayon::ThreadPool, lpma::Error> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| {
        lpma::Error::Config(lpma::pipeline::ConfigError::BadValue {
            field: "threads".into(),
            detail: e.to_string(),
        })
    })
}
