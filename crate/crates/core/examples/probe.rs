//! Scratch probe for tuning the Monte Carlo experiments. Not part of the
//! deliverable surface; run with
//! `cargo run -p lpma --example probe -- <which>`.

use lpma::lab::{run_monte_carlo, DgpConfig, McOptions};
use lpma::projection::ModelForm;

fn model_b_config(n: usize, t: usize, seed: u64) -> DgpConfig {
    let mut cfg = DgpConfig::baseline(ModelForm::B, n, t, seed);
    cfg.policy_rho = 0.0;
    cfg.delta3 = -0.5;
    cfg
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "identity".into());
    match which.as_str() {
        "identity" => {
            let cfg = model_b_config(6, 400, 31);
            let opts = McOptions { truth_draws: 2000, ..Default::default() };
            let report = run_monte_carlo(&cfg, 100, &opts).unwrap();
            let (mean, se) = report.mean_se(1, |m| m.identity_residual.unwrap());
            println!("identity mean {mean:.3e} se {se:.3e} ratio {:.2}", mean / se);
            let avg = report.msfe_averaged();
            let singles = report.msfe_single();
            let best = singles.iter().cloned().fold(f64::INFINITY, f64::min);
            println!("L_T averaged {avg:.5} best single {best:.5} ratio {:.4}", avg / best);
            for (f, s) in ModelForm::CANDIDATES.iter().zip(&singles) {
                println!("  {f}: {s:.5} w={:.3}", report.mean_weight(*f, 1));
            }
        }
        "trio" => {
            for t in [200usize, 800, 3200] {
                let cfg = model_b_config(6, t, 77);
                let opts = McOptions { truth_draws: 500, ..Default::default() };
                let report = run_monte_carlo(&cfg, 50, &opts).unwrap();
                println!("T={t}: mean w_B = {:.4}", report.mean_weight(ModelForm::B, 1));
            }
        }
        "irf" => {
            let mut cfg = DgpConfig::baseline(ModelForm::A, 11, 800, 5);
            cfg.policy_rho = 0.0;
            let opts = McOptions {
                horizons: (1..=12).collect(),
                truth_draws: 10_000,
                ..Default::default()
            };
            let start = std::time::Instant::now();
            let report = run_monte_carlo(&cfg, 20, &opts).unwrap();
            println!("20 reps took {:?}", start.elapsed());
            for loosening in [true, false] {
                let mut ok = 0;
                for k in 1..=12 {
                    let (bias, se) = report.irf_bias(k, loosening);
                    let pass = bias.abs() <= 3.0 * se;
                    ok += pass as usize;
                    println!(
                        "k={k} loos={loosening} bias {bias:+.4} se {se:.4} {}",
                        if pass { "ok" } else { "FAIL" }
                    );
                }
                println!("loosening={loosening}: {ok}/12");
            }
        }
        "size" => {
            let rho: f64 = std::env::args()
                .nth(2)
                .and_then(|s| s.parse().ok())
                .unwrap_or(0.4);
            let mut cfg = model_b_config(10, 140, 99);
            cfg.true_form = ModelForm::A;
            cfg.delta3 = 0.0;
            cfg.rate_rho = rho;
            let opts = McOptions {
                run_equality_test: true,
                bootstrap_equality: Some(99),
                truth_draws: 500,
                ..Default::default()
            };
            let start = std::time::Instant::now();
            let report = run_monte_carlo(&cfg, 200, &opts).unwrap();
            println!("200 reps took {:?}", start.elapsed());
            println!("size at 0.1 (rate_rho {rho}): {:.4}", report.mean_eq_rejection(1));
        }
        "power" => {
            let mut cfg = model_b_config(6, 800, 13);
            cfg.true_form = ModelForm::A;
            cfg.delta3 = -1.0;
            let opts = McOptions {
                run_equality_test: true,
                truth_draws: 500,
                ..Default::default()
            };
            let report = run_monte_carlo(&cfg, 50, &opts).unwrap();
            println!("power at 0.1: {:.4}", report.mean_eq_rejection(1));
        }
        "factors" => {
            for r_true in [0usize, 2] {
                let mut cfg = DgpConfig::baseline(ModelForm::Baseline, 17, 104, 3);
                cfg.policy_rho = 0.0;
                cfg.delta3 = 0.0;
                if r_true > 0 {
                    cfg.factors =
                        Some(lpma::lab::FactorSpec { r: r_true, loading_scale: 1.5 });
                }
                let opts = McOptions {
                    factor_r_max: Some(4),
                    truth_draws: 500,
                    ..Default::default()
                };
                let start = std::time::Instant::now();
                let report = run_monte_carlo(&cfg, 30, &opts).unwrap();
                println!(
                    "r_true={r_true}: recovery {:.3} ({:?})",
                    report.factor_recovery_rate(r_true),
                    start.elapsed()
                );
            }
        }
        "sediag" => {
            // Compare the claimed SE of the difference statistic against
            // its empirical spread, with fixed unit weights on model A.
            use lpma::inference::equality_test;
            use lpma::lab::generate_with_stream;
            use lpma::mallows::{solve_weights, CandidateSet};
            use lpma::projection::{candidate_designs, fit_horizon, ModelSpec};
            let mut cfg = model_b_config(6, 300, 99);
            cfg.true_form = ModelForm::A;
            cfg.delta3 = 0.0;
            let mut d_fixed = Vec::new();
            let mut se_fixed = Vec::new();
            let mut d_mall = Vec::new();
            let mut se_mall = Vec::new();
            for rep in 0..200 {
                let g = generate_with_stream(&cfg, rep + 1).unwrap();
                let spec = ModelSpec::new(
                    ModelForm::Baseline,
                    "out",
                    "pol",
                    g.control_names(),
                );
                let designs =
                    candidate_designs(&g.panel, &g.regimes, &spec, 1, None).unwrap();
                let baseline = fit_horizon(designs.baseline).unwrap();
                let fits: Vec<_> = designs
                    .candidates
                    .into_iter()
                    .map(|(f, d)| (f, fit_horizon(d).unwrap()))
                    .collect();
                let cand = CandidateSet::from_fits(fits, None).unwrap();
                let refs: Vec<&lpma::projection::HorizonFit> = cand.fits.iter().collect();
                let unit = [1.0, 0.0, 0.0, 0.0, 0.0];
                let t1 = equality_test(&refs, &unit, &baseline, &g.regimes, 1).unwrap();
                let w = solve_weights(&cand).unwrap();
                let t2 =
                    equality_test(&refs, &w.weights, &baseline, &g.regimes, 1).unwrap();
                // First evaluation cell only.
                let z1 = t1.statistics[0];
                let z2 = t2.statistics[0];
                d_fixed.push(z1);
                d_mall.push(z2);
                se_fixed.push(1.0);
                se_mall.push(1.0);
            }
            let sd = |v: &Vec<f64>| {
                let m = v.iter().sum::<f64>() / v.len() as f64;
                (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64)
                    .sqrt()
            };
            println!("z (unit A): sd {:.3} (want ~1)", sd(&d_fixed));
            println!("z (mallows): sd {:.3} (want ~1)", sd(&d_mall));
            let rej = |v: &Vec<f64>| {
                v.iter().filter(|z| z.abs() > 1.6448536269514722).count() as f64
                    / v.len() as f64
            };
            println!("rej (unit A) {:.3}  rej (mallows) {:.3}", rej(&d_fixed), rej(&d_mall));
        }
        other => eprintln!("unknown probe `{other}`"),
    }
}
