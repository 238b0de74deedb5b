//! Property tests for the projection stage.

use lpma::data::{build_regimes, Column, PanelDataset, Period, Transform};
use lpma::projection::{build_design, fit_horizon, irf_point, ModelForm, ModelSpec, RegimeSpec};
use proptest::prelude::*;

fn hash_cell(ci: usize, pi: usize, s: usize) -> f64 {
    let mut v = (ci as u64 * 1_000_003 + pi as u64 * 7919 + s as u64 * 104_729)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15);
    v ^= v >> 33;
    v = v.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    v ^= v >> 29;
    (v as f64 / u64::MAX as f64) - 0.5
}

fn panel_with_policy_scale(scale: f64) -> (PanelDataset, lpma::data::RegimeVariables) {
    let nc = 4;
    let np = 48;
    let p0 = Period::new(1990, 1);
    let periods: Vec<Period> = (0..np as i64).map(|k| p0.offset(k)).collect();
    let countries: Vec<String> = (0..nc).map(|c| format!("C{c}")).collect();
    let grid = |s: usize, f: &dyn Fn(usize, usize) -> f64| -> Vec<Option<f64>> {
        let _ = s;
        (0..nc * np).map(|i| Some(f(i / np, i % np))).collect()
    };
    let columns = vec![
        Column {
            name: "out".into(),
            transform: Transform::Level,
            values: grid(0, &|ci, pi| hash_cell(ci, pi, 0)),
        },
        Column {
            name: "pol".into(),
            transform: Transform::Level,
            values: grid(1, &|ci, pi| scale * hash_cell(ci, pi, 1)),
        },
        Column {
            name: "ctrl".into(),
            transform: Transform::Level,
            values: grid(2, &|ci, pi| hash_cell(ci, pi, 2)),
        },
        Column {
            name: "stir".into(),
            transform: Transform::Level,
            values: grid(3, &|ci, pi| 3.0 + hash_cell(ci, pi, 3)),
        },
    ];
    let panel = PanelDataset::new(countries, periods, columns).unwrap();
    let regimes = build_regimes(&panel, "stir").unwrap();
    (panel, regimes)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Rescaling the policy column by c rescales every policy-related
    /// coefficient by 1/c and leaves fitted values unchanged.
    #[test]
    fn policy_scaling_invariance(scale in prop::sample::select(vec![0.1f64, 0.5, 2.0, 10.0, 100.0]),
                                 form in prop::sample::select(vec![ModelForm::Baseline, ModelForm::A, ModelForm::E])) {
        let (panel1, regimes1) = panel_with_policy_scale(1.0);
        let (panel2, regimes2) = panel_with_policy_scale(scale);
        let spec = ModelSpec::new(form, "out", "pol", vec!["ctrl".into()]);
        let fit1 = fit_horizon(build_design(&panel1, &regimes1, &spec, 1, None).unwrap()).unwrap();
        let fit2 = fit_horizon(build_design(&panel2, &regimes2, &spec, 1, None).unwrap()).unwrap();
        for (name, idx1) in fit1.names.iter().zip(0..) {
            let idx2 = fit2.column_index(name).unwrap();
            let (a, b) = (fit1.coefficients[idx1], fit2.coefficients[idx2]);
            if name.starts_with("pol") {
                prop_assert!((a / scale - b).abs() <= 1e-8 * a.abs().max(1.0));
            } else {
                prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0));
            }
        }
        let fitted1 = &fit1.x * &fit1.coefficients;
        let fitted2 = &fit2.x * &fit2.coefficients;
        for (u, v) in fitted1.iter().zip(fitted2.iter()) {
            prop_assert!((u - v).abs() <= 1e-8 * u.abs().max(1.0));
        }
    }

    /// The baseline impulse response never depends on the regime.
    #[test]
    fn baseline_irf_regime_invariant(x in -3.0f64..3.0) {
        let (panel, regimes) = panel_with_policy_scale(1.0);
        let spec = ModelSpec::new(ModelForm::Baseline, "out", "pol", vec!["ctrl".into()]);
        let fit = fit_horizon(build_design(&panel, &regimes, &spec, 2, None).unwrap()).unwrap();
        let a = irf_point(&fit, &RegimeSpec::Loosening).unwrap().value;
        let b = irf_point(&fit, &RegimeSpec::AtValue(x)).unwrap().value;
        prop_assert_eq!(a, b);
    }

    /// Growth series rebuild their levels by cumulative exponentiation.
    #[test]
    fn log_diff_round_trip(start in 10.0f64..500.0, steps in proptest::collection::vec(-0.04f64..0.04, 4..40)) {
        let mut levels = vec![start];
        for s in &steps {
            let next = levels.last().unwrap() * (1.0 + s);
            levels.push(next);
        }
        let series: Vec<Option<f64>> = levels.iter().map(|&v| Some(v)).collect();
        let growth = lpma::data::log_diff_100(&series).unwrap();
        let mut rebuilt = levels[0];
        for t in 1..levels.len() {
            rebuilt *= (growth[t].unwrap() / 100.0).exp();
            prop_assert!((rebuilt - levels[t]).abs() <= 1e-10 * levels[t].abs());
        }
    }
}
