//! Simulated ground-truth impulse responses.
//!
//! The generating equation is defined at horizon 1 and iterated forward, so
//! the true response at horizon k is estimated by common-random-number
//! simulation: draw an economy, add a unit policy innovation at one date,
//! and average the outcome difference paths conditional on the regime at
//! the impulse date. Shared noise cancels exactly in the difference, so
//! the only Monte Carlo variation left comes from the regime path itself.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::projection::{ModelForm, RegimeContext};

use super::{DgpConfig, LabError};

const BURN_IN: usize = 8;

/// True per-horizon marginal effects of a 1% policy innovation, split by
/// the monetary regime at the impulse date, with the class-conditional
/// regime values used as matching evaluation points.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TruthRecord {
    pub horizons: Vec<usize>,
    pub loosening: Vec<f64>,
    pub tightening: Vec<f64>,
    pub mc_se_loosening: Vec<f64>,
    pub mc_se_tightening: Vec<f64>,
    /// Class-conditional means of the regime variables at the impulse date.
    #[serde(skip)]
    pub loosening_ctx: RegimeContext,
    #[serde(skip)]
    pub tightening_ctx: RegimeContext,
    pub n_draws: usize,
}

impl TruthRecord {
    pub fn value(&self, horizon: usize, loosening: bool) -> f64 {
        let idx = self
            .horizons
            .iter()
            .position(|&h| h == horizon)
            .expect("horizon present in truth record");
        if loosening {
            self.loosening[idx]
        } else {
            self.tightening[idx]
        }
    }
}

struct Accumulator {
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    n: usize,
    d_q: f64,
    d_a: f64,
    ind_a: f64,
    ind_q: f64,
}

impl Accumulator {
    fn new(k: usize) -> Self {
        Accumulator {
            sum: vec![0.0; k],
            sumsq: vec![0.0; k],
            n: 0,
            d_q: 0.0,
            d_a: 0.0,
            ind_a: 0.0,
            ind_q: 0.0,
        }
    }

    fn add(&mut self, diffs: &[f64], d_q: f64, d_a: f64, ind_q: f64, ind_a: f64) {
        for (i, &d) in diffs.iter().enumerate() {
            self.sum[i] += d;
            self.sumsq[i] += d * d;
        }
        self.n += 1;
        self.d_q += d_q;
        self.d_a += d_a;
        self.ind_q += ind_q;
        self.ind_a += ind_a;
    }

    fn means(&self) -> Vec<f64> {
        self.sum.iter().map(|s| s / self.n.max(1) as f64).collect()
    }

    fn ses(&self) -> Vec<f64> {
        let n = self.n.max(2) as f64;
        self.sum
            .iter()
            .zip(&self.sumsq)
            .map(|(s, sq)| {
                let mean = s / n;
                ((sq / n - mean * mean).max(0.0) / n).sqrt()
            })
            .collect()
    }

    fn ctx(&self) -> RegimeContext {
        let n = self.n.max(1) as f64;
        RegimeContext {
            ind_q: self.ind_q / n,
            ind_a: self.ind_a / n,
            d_i_q: self.d_q / n,
            d_i_a: self.d_a / n,
        }
    }
}

/// Simulate the truth record for horizons 1..=max_horizon.
pub fn compute_truth(
    config: &DgpConfig,
    max_horizon: usize,
    n_draws: usize,
) -> Result<TruthRecord, LabError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(u64::MAX); // reserved stream, never used by replications
    let horizon_count = max_horizon;
    let t0 = BURN_IN;
    let path_len = t0 + max_horizon + 1;

    let mut loos = Accumulator::new(horizon_count);
    let mut tight = Accumulator::new(horizon_count);
    for _ in 0..n_draws {
        // Rate level path and its quarterly/annual changes.
        let mut level = vec![0.0f64; path_len];
        let mut d = vec![0.0f64; path_len];
        let stationary_sd = config.rate_sigma / (1.0 - config.rate_rho * config.rate_rho).sqrt();
        let z0: f64 = StandardNormal.sample(&mut rng);
        let mut change = stationary_sd * z0;
        level[0] = 4.0 + change;
        d[0] = change;
        for t in 1..path_len {
            let z: f64 = StandardNormal.sample(&mut rng);
            change = config.rate_rho * change + config.rate_sigma * z;
            level[t] = level[t - 1] + change;
            d[t] = level[t] - level[t - 1];
        }
        let d_a = |t: usize| -> f64 { level[t] - level[t - 4] };
        let ind_q = |t: usize| -> f64 {
            if d[t] < 0.0 {
                1.0
            } else {
                0.0
            }
        };
        let ind_a = |t: usize| -> f64 {
            if d_a(t) < 0.0 {
                1.0
            } else {
                0.0
            }
        };

        // Policy shift from a unit innovation at t0.
        let shift = |t: usize| -> f64 {
            if t >= t0 {
                config.policy_rho.powi((t - t0) as i32)
            } else {
                0.0
            }
        };

        // Outcome difference path: y[s+1] depends on policy dated s and s-1.
        let mut diffs = vec![0.0f64; horizon_count];
        for k in 1..=max_horizon {
            let s = t0 + k - 1; // base date entering y at t0+k
            let mut diff = config.delta1 * shift(s);
            if s >= 1 {
                diff += config.delta2 * shift(s - 1);
            }
            let interaction = match config.true_form {
                ModelForm::Baseline => 0.0,
                ModelForm::A => config.delta3 * shift(s) * ind_q(s),
                ModelForm::B => config.delta3 * shift(s) * ind_a(s),
                ModelForm::C => config.delta3 * shift(s) * d[s],
                ModelForm::D => config.delta3 * shift(s) * d_a(s),
                ModelForm::E => {
                    config.delta3 * shift(s) * ind_q(s)
                        + config.delta4 * shift(s) * d[s]
                        + config.delta5 * shift(s) * d[s] * ind_q(s)
                }
            };
            diffs[k - 1] = diff + interaction;
        }

        // Classify by the regime at the impulse date; B and D condition on
        // the annual indicator, everything else on the quarterly one.
        let class_loosening = match config.true_form {
            ModelForm::B | ModelForm::D => ind_a(t0) == 1.0,
            _ => ind_q(t0) == 1.0,
        };
        let acc = if class_loosening { &mut loos } else { &mut tight };
        acc.add(&diffs, d[t0], d_a(t0), ind_q(t0), ind_a(t0));
    }

    Ok(TruthRecord {
        horizons: (1..=max_horizon).collect(),
        loosening: loos.means(),
        tightening: tight.means(),
        mc_se_loosening: loos.ses(),
        mc_se_tightening: tight.ses(),
        loosening_ctx: loos.ctx(),
        tightening_ctx: tight.ctx(),
        n_draws,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn iid_policy_truth_is_delta_profile() {
        // With policy_rho = 0 the shock does not propagate: horizon 1 is
        // δ1 + δ3·I, horizon 2 is δ2, later horizons are 0.
        let mut cfg = DgpConfig::baseline(ModelForm::A, 4, 60, 7);
        cfg.policy_rho = 0.0;
        let truth = compute_truth(&cfg, 4, 4000).unwrap();
        assert_relative_eq!(truth.value(1, true), cfg.delta1 + cfg.delta3, epsilon = 1e-12);
        assert_relative_eq!(truth.value(1, false), cfg.delta1, epsilon = 1e-12);
        for loosening in [true, false] {
            assert_relative_eq!(truth.value(2, loosening), cfg.delta2, epsilon = 1e-12);
            assert_relative_eq!(truth.value(3, loosening), 0.0, epsilon = 1e-12);
            assert_relative_eq!(truth.value(4, loosening), 0.0, epsilon = 1e-12);
        }
        // Conditional contexts: loosening means a negative average change.
        assert!(truth.loosening_ctx.d_i_q < 0.0);
        assert!(truth.tightening_ctx.d_i_q >= 0.0);
        assert_eq!(truth.loosening_ctx.ind_q, 1.0);
    }

    #[test]
    fn baseline_truth_is_regime_free() {
        let mut cfg = DgpConfig::baseline(ModelForm::Baseline, 4, 60, 9);
        cfg.delta3 = 0.7; // ignored by the baseline form
        cfg.policy_rho = 0.5;
        let truth = compute_truth(&cfg, 3, 3000).unwrap();
        for k in 1..=3 {
            assert_relative_eq!(truth.value(k, true), truth.value(k, false), epsilon = 1e-12);
        }
        // Propagation through the AR(1) policy: δ1·ρ^{k-1} + δ2·ρ^{k-2}.
        assert_relative_eq!(truth.value(1, true), cfg.delta1, epsilon = 1e-12);
        assert_relative_eq!(
            truth.value(2, true),
            cfg.delta1 * 0.5 + cfg.delta2,
            epsilon = 1e-12
        );
    }
}
