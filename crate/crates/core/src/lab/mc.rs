//! Monte Carlo harness: run the full estimation pipeline per replication
//! and aggregate validation metrics against the known truth.

use rayon::prelude::*;
use serde::Serialize;

use crate::inference::equality_test;
use crate::mallows::{mallows_criterion, solve_cv1_weights, solve_weights, CandidateSet};
use crate::projection::irf::marginal_effect;
use crate::projection::{
    build_design, candidate_designs, fit_horizon, HorizonFit, ModelForm, ModelSpec,
};

use super::generate::{generate_with_stream, OUTCOME, POLICY};
use super::{compute_truth, DgpConfig, LabError, TruthRecord};

/// What the harness computes per replication.
#[derive(Debug, Clone, Serialize)]
pub struct McOptions {
    pub horizons: Vec<usize>,
    pub alpha: f64,
    /// HAC bandwidth; defaults to the horizon.
    pub bandwidth: Option<usize>,
    /// Run the averaged-vs-baseline equality test per cell.
    pub run_equality_test: bool,
    /// Replace the conditional-on-weights delta SE of the equality test
    /// with a country-block bootstrap (refit everything, weights included)
    /// of the given size. The delta SE understates the spread of the
    /// averaged effect because the weights themselves are data-driven.
    pub bootstrap_equality: Option<usize>,
    /// Run factor-count selection on the true form's design at horizon 1.
    pub factor_r_max: Option<usize>,
    /// Also solve leave-one-out weights.
    pub compute_cv1: bool,
    /// Draws behind the simulated truth record.
    pub truth_draws: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            horizons: vec![1],
            alpha: 0.1,
            bandwidth: None,
            run_equality_test: false,
            bootstrap_equality: None,
            factor_r_max: None,
            compute_cv1: false,
            truth_draws: 10_000,
        }
    }
}

/// Per-horizon metrics of one replication.
#[derive(Debug, Clone, Serialize)]
pub struct HorizonMetrics {
    pub horizon: usize,
    /// Mallows weights in candidate order A..E.
    pub weights: Vec<f64>,
    pub cv1_weights: Option<Vec<f64>>,
    pub criterion_value: f64,
    /// Averaged marginal effect at the truth record's class contexts.
    pub averaged_loosening: f64,
    pub averaged_tightening: f64,
    pub per_model_loosening: Vec<f64>,
    pub baseline_policy_coef: f64,
    /// C(ŵ) − (1/T)u'u − L(ŵ) with the true disturbances; horizon 1 only.
    pub identity_residual: Option<f64>,
    /// In-sample squared estimation error L(w) = (1/T)‖û(w) − u‖².
    pub l_t_averaged: Option<f64>,
    pub l_t_single: Option<Vec<f64>>,
    pub l_t_cv1: Option<f64>,
    /// Fraction of (country, period) cells rejecting equality at alpha.
    pub eq_reject_frac: Option<f64>,
}

/// One replication's output.
#[derive(Debug, Clone, Serialize)]
pub struct Replication {
    pub stream: u64,
    pub per_horizon: Vec<HorizonMetrics>,
    pub selected_r: Option<usize>,
}

/// Aggregated Monte Carlo report.
#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub config: DgpConfig,
    pub options: McOptions,
    pub replications: usize,
    pub truth: TruthRecord,
    pub reps: Vec<Replication>,
    /// (replication index, error) of failed replications.
    pub failed: Vec<(usize, String)>,
}

fn horizon_index(report: &McReport, horizon: usize) -> usize {
    report
        .options
        .horizons
        .iter()
        .position(|&h| h == horizon)
        .expect("horizon was simulated")
}

impl McReport {
    pub fn mean_weight(&self, form: ModelForm, horizon: usize) -> f64 {
        let h = horizon_index(self, horizon);
        let m = ModelForm::CANDIDATES.iter().position(|f| *f == form).expect("candidate");
        let sum: f64 = self.reps.iter().map(|r| r.per_horizon[h].weights[m]).sum();
        sum / self.reps.len() as f64
    }

    /// (mean, Monte Carlo SE of the mean) of a per-horizon metric.
    pub fn mean_se<F: Fn(&HorizonMetrics) -> f64>(&self, horizon: usize, f: F) -> (f64, f64) {
        let h = horizon_index(self, horizon);
        let vals: Vec<f64> = self.reps.iter().map(|r| f(&r.per_horizon[h])).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    /// Averaged-IRF bias and empirical SE of the mean at one horizon/regime.
    pub fn irf_bias(&self, horizon: usize, loosening: bool) -> (f64, f64) {
        let truth = self.truth.value(horizon, loosening);
        let (mean, se) = self.mean_se(horizon, |m| {
            if loosening {
                m.averaged_loosening
            } else {
                m.averaged_tightening
            }
        });
        (mean - truth, se)
    }

    /// Mean in-sample squared error of the averaged weights (horizon 1).
    pub fn msfe_averaged(&self) -> f64 {
        let (mean, _) = self.mean_se(1, |m| m.l_t_averaged.expect("horizon-1 metrics"));
        mean
    }

    /// Mean in-sample squared error of each single model (horizon 1).
    pub fn msfe_single(&self) -> Vec<f64> {
        let h = horizon_index(self, 1);
        let m_count = ModelForm::CANDIDATES.len();
        let mut out = vec![0.0; m_count];
        for rep in &self.reps {
            let l = rep.per_horizon[h].l_t_single.as_ref().expect("horizon-1 metrics");
            for (o, v) in out.iter_mut().zip(l) {
                *o += v;
            }
        }
        out.iter_mut().for_each(|v| *v /= self.reps.len() as f64);
        out
    }

    pub fn mean_eq_rejection(&self, horizon: usize) -> f64 {
        let (mean, _) =
            self.mean_se(horizon, |m| m.eq_reject_frac.expect("equality test was run"));
        mean
    }

    pub fn factor_recovery_rate(&self, r_true: usize) -> f64 {
        let hits = self
            .reps
            .iter()
            .filter(|r| r.selected_r.expect("factor selection was run") == r_true)
            .count();
        hits as f64 / self.reps.len() as f64
    }
}

/// The averaged-vs-baseline contrast at each cell's regime values, given
/// fitted candidates, weights, and a baseline fit.
fn cell_contrasts(
    cand: &CandidateSet,
    weights: &[f64],
    baseline: &HorizonFit,
    cells: &[crate::projection::RegimeContext],
) -> Vec<f64> {
    let base = baseline
        .coef(&baseline.spec.policy)
        .expect("baseline keeps its policy column");
    cells
        .iter()
        .map(|ctx| {
            let mut value = -base;
            for (fit, &w) in cand.fits.iter().zip(weights) {
                let (me, _) = marginal_effect(fit, ctx);
                value += w * me;
            }
            value
        })
        .collect()
}

/// Country-block bootstrap p-values for the equality test: resample
/// countries with replacement, refit every model and the weights, and use
/// the bootstrap spread of the contrast at each original cell.
#[allow(clippy::too_many_arguments)]
fn bootstrap_equality_pvalues(
    generated: &super::GeneratedPanel,
    spec: &ModelSpec,
    k: usize,
    cand: &CandidateSet,
    weights: &crate::mallows::MallowsWeights,
    baseline_fit: &HorizonFit,
    n_boot: usize,
    stream: u64,
) -> crate::Result<Vec<f64>> {
    use rand::prelude::IndexedRandom;
    use rand::SeedableRng;
    use statrs::distribution::{ContinuousCDF, Normal};

    let panel = &generated.panel;
    let regimes = &generated.regimes;
    let contexts: Vec<crate::projection::RegimeContext> = cand.fits[0]
        .rows
        .iter()
        .map(|&(ci, pi)| {
            let cell = regimes.cell(ci, pi);
            crate::projection::RegimeContext {
                ind_q: cell.ind_q.expect("complete row"),
                ind_a: cell.ind_a.expect("complete row"),
                d_i_q: cell.d_i_q.expect("complete row"),
                d_i_a: cell.d_i_a.expect("complete row"),
            }
        })
        .collect();
    let point = cell_contrasts(cand, &weights.weights, baseline_fit, &contexts);

    let n = panel.n_countries();
    let all: Vec<usize> = (0..n).collect();
    let mut draws: Vec<Vec<f64>> = Vec::with_capacity(n_boot);
    for b in 0..n_boot {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(generated.config.seed);
        rng.set_stream(stream | ((b as u64 + 1) << 32));
        let picks: Vec<usize> =
            (0..n).map(|_| *all.choose(&mut rng).expect("non-empty")).collect();
        let bpanel = panel.resample_countries(&picks)?;
        let bregimes = regimes.resample(&picks);
        let result = (|| -> crate::Result<Vec<f64>> {
            let designs = candidate_designs(&bpanel, &bregimes, spec, k, None)?;
            let bbase = fit_horizon(designs.baseline)?;
            let mut fits = Vec::with_capacity(5);
            for (form, design) in designs.candidates {
                fits.push((form, fit_horizon(design)?));
            }
            let bcand = CandidateSet::from_fits(fits, None)?;
            let bweights = solve_weights(&bcand)?;
            Ok(cell_contrasts(&bcand, &bweights.weights, &bbase, &contexts))
        })();
        if let Ok(values) = result {
            draws.push(values);
        }
    }
    if draws.len() < 3 {
        return Err(crate::Error::Lab(LabError::ExcessiveFailureRate {
            failed: n_boot - draws.len(),
            total: n_boot,
        }));
    }
    let normal = Normal::new(0.0, 1.0).unwrap();
    let nb = draws.len() as f64;
    let p_values = point
        .iter()
        .enumerate()
        .map(|(j, &d)| {
            let mean = draws.iter().map(|v| v[j]).sum::<f64>() / nb;
            let var = draws.iter().map(|v| (v[j] - mean).powi(2)).sum::<f64>() / (nb - 1.0);
            let se = var.sqrt();
            let z = if se > 0.0 {
                d / se
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY * d.signum()
            };
            2.0 * (1.0 - normal.cdf(z.abs()))
        })
        .collect();
    Ok(p_values)
}

fn run_replication(
    config: &DgpConfig,
    stream: u64,
    options: &McOptions,
    truth: &TruthRecord,
) -> crate::Result<Replication> {
    let generated = generate_with_stream(config, stream)?;
    let spec =
        ModelSpec::new(ModelForm::Baseline, OUTCOME, POLICY, generated.control_names());
    let panel = &generated.panel;
    let regimes = &generated.regimes;

    let mut per_horizon = Vec::with_capacity(options.horizons.len());
    for &k in &options.horizons {
        let bandwidth = options.bandwidth.unwrap_or(k);
        let designs = candidate_designs(panel, regimes, &spec, k, None)?;
        let baseline_fit = fit_horizon(designs.baseline)?;
        let mut fits: Vec<(ModelForm, HorizonFit)> = Vec::with_capacity(5);
        for (form, design) in designs.candidates {
            fits.push((form, fit_horizon(design)?));
        }
        let cand = CandidateSet::from_fits(fits, None)?;
        let weights = solve_weights(&cand)?;
        let cv1 = if options.compute_cv1 { Some(solve_cv1_weights(&cand)?) } else { None };

        let combine = |ctx: &crate::projection::RegimeContext| -> (f64, Vec<f64>) {
            let mut avg = 0.0;
            let mut per_model = Vec::with_capacity(cand.fits.len());
            for (fit, &w) in cand.fits.iter().zip(&weights.weights) {
                let (me, _) = marginal_effect(fit, ctx);
                avg += w * me;
                per_model.push(me);
            }
            (avg, per_model)
        };
        let (averaged_loosening, per_model_loosening) = combine(&truth.loosening_ctx);
        let (averaged_tightening, _) = combine(&truth.tightening_ctx);

        // True-disturbance metrics are defined at horizon 1, where the
        // generating equation itself is the projected model.
        let (identity_residual, l_t_averaged, l_t_single, l_t_cv1) = if k == 1 {
            let t_eff = cand.t_eff() as f64;
            let u: Vec<f64> = cand.fits[0]
                .rows
                .iter()
                .map(|&(ci, pi)| {
                    generated.true_errors[ci * panel.n_periods() + pi + k]
                        .expect("row has an outcome")
                })
                .collect();
            let uu: f64 = u.iter().map(|v| v * v).sum::<f64>() / t_eff;
            let l_t = |w: &[f64]| -> f64 {
                let mut acc = 0.0;
                for (r, &ui) in u.iter().enumerate() {
                    let mut uhat = 0.0;
                    for (m, &wm) in w.iter().enumerate() {
                        uhat += wm * cand.residual_matrix[(r, m)];
                    }
                    acc += (uhat - ui) * (uhat - ui);
                }
                acc / t_eff
            };
            let l_avg = l_t(&weights.weights);
            let identity = weights.criterion_value - uu - l_avg;
            let singles: Vec<f64> = (0..cand.len())
                .map(|m| {
                    let mut unit = vec![0.0; cand.len()];
                    unit[m] = 1.0;
                    l_t(&unit)
                })
                .collect();
            let l_cv = cv1.as_ref().map(|c| l_t(&c.weights));
            (Some(identity), Some(l_avg), Some(singles), l_cv)
        } else {
            (None, None, None, None)
        };

        let eq_reject_frac = if options.run_equality_test {
            let p_values = match options.bootstrap_equality {
                None => {
                    let refs: Vec<&HorizonFit> = cand.fits.iter().collect();
                    equality_test(&refs, &weights.weights, &baseline_fit, regimes, bandwidth)?
                        .p_values
                }
                Some(b) => bootstrap_equality_pvalues(
                    &generated, &spec, k, &cand, &weights, &baseline_fit, b, stream,
                )?,
            };
            let rejected = p_values.iter().filter(|&&p| p <= options.alpha).count() as f64;
            Some(rejected / p_values.len() as f64)
        } else {
            None
        };

        per_horizon.push(HorizonMetrics {
            horizon: k,
            weights: weights.weights.clone(),
            cv1_weights: cv1.as_ref().map(|c| c.weights.clone()),
            criterion_value: mallows_criterion(&weights.weights, &cand)?,
            averaged_loosening,
            averaged_tightening,
            per_model_loosening,
            baseline_policy_coef: baseline_fit.coef(POLICY).unwrap_or(f64::NAN),
            identity_residual,
            l_t_averaged,
            l_t_single,
            l_t_cv1,
            eq_reject_frac,
        });
    }

    let selected_r = match options.factor_r_max {
        Some(r_max) => {
            let design =
                build_design(panel, regimes, &spec.with_form(config.true_form), 1, None)?;
            Some(crate::factors::select_factor_number(&design, r_max)?.r)
        }
        None => None,
    };
    Ok(Replication { stream, per_horizon, selected_r })
}

/// Run the full pipeline over independent replications.
///
/// Replication `i` uses RNG stream `i+1` derived from the config seed, so
/// results are identical no matter how many threads execute them. Failed
/// replications are recorded, and more than 1% of them fails the run.
pub fn run_monte_carlo(
    config: &DgpConfig,
    replications: usize,
    options: &McOptions,
) -> Result<McReport, LabError> {
    if replications < 2 {
        return Err(LabError::TooFewReplications { got: replications });
    }
    config.validate()?;
    let max_horizon = options.horizons.iter().copied().max().unwrap_or(1);
    let truth = compute_truth(config, max_horizon, options.truth_draws)?;

    let results: Vec<Result<Replication, String>> = (0..replications)
        .into_par_iter()
        .map(|rep| {
            run_replication(config, rep as u64 + 1, options, &truth)
                .map_err(|e| format!("{e}"))
        })
        .collect();

    let mut reps = Vec::with_capacity(replications);
    let mut failed = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(rep) => reps.push(rep),
            Err(e) => failed.push((i, e)),
        }
    }
    if failed.len() * 100 > replications {
        return Err(LabError::ExcessiveFailureRate { failed: failed.len(), total: replications });
    }
    Ok(McReport {
        config: config.clone(),
        options: options.clone(),
        replications,
        truth,
        reps,
        failed,
    })
}
