//! Cross-criterion weighting checks that need the full stack: the
//! leave-one-out criterion against the Mallows criterion on a
//! well-specified generating process.

use lpma::lab::{generate_with_stream, DgpConfig};
use lpma::mallows::{solve_cv1_weights, solve_weights, CandidateSet};
use lpma::projection::{candidate_designs, fit_horizon, ModelForm, ModelSpec};

/// In-sample squared estimation error (1/T)‖û(w) − u‖² with the known
/// disturbances.
fn l_t(cand: &CandidateSet, w: &[f64], u: &[f64]) -> f64 {
    let t = cand.t_eff();
    let mut acc = 0.0;
    for r in 0..t {
        let mut uhat = 0.0;
        for (m, &wm) in w.iter().enumerate() {
            uhat += wm * cand.residual_matrix[(r, m)];
        }
        acc += (uhat - u[r]) * (uhat - u[r]);
    }
    acc / t as f64
}

#[test]
fn cv1_and_mallows_weights_are_comparably_accurate() {
    // Well-specified Model B truth; both criteria should land within a
    // factor of two of each other's squared estimation error.
    let mut cfg = DgpConfig::baseline(ModelForm::B, 4, 253, 4242);
    cfg.policy_rho = 0.0;
    let reps = 40;
    let mut sum_mallows = 0.0;
    let mut sum_cv = 0.0;
    for rep in 0..reps {
        let g = generate_with_stream(&cfg, rep + 1).unwrap();
        let spec = ModelSpec::new(ModelForm::Baseline, "out", "pol", g.control_names());
        let designs = candidate_designs(&g.panel, &g.regimes, &spec, 1, None).unwrap();
        let fits: Vec<_> = designs
            .candidates
            .into_iter()
            .map(|(f, d)| (f, fit_horizon(d).unwrap()))
            .collect();
        let cand = CandidateSet::from_fits(fits, None).unwrap();
        let u: Vec<f64> = cand.fits[0]
            .rows
            .iter()
            .map(|&(ci, pi)| {
                g.true_errors[ci * g.panel.n_periods() + pi + 1].expect("outcome cell")
            })
            .collect();
        let mw = solve_weights(&cand).unwrap();
        let cw = solve_cv1_weights(&cand).unwrap();
        sum_mallows += l_t(&cand, &mw.weights, &u);
        sum_cv += l_t(&cand, &cw.weights, &u);
    }
    let (m, c) = (sum_mallows / reps as f64, sum_cv / reps as f64);
    assert!(c <= 2.0 * m, "cv1 {c} vs mallows {m}");
    assert!(m <= 2.0 * c, "mallows {m} vs cv1 {c}");
}

#[test]
fn mean_weight_concentrates_on_the_true_form() {
    // Single long panel: the true form's weight should dominate.
    let mut cfg = DgpConfig::baseline(ModelForm::B, 6, 800, 99);
    cfg.policy_rho = 0.0;
    let g = generate_with_stream(&cfg, 1).unwrap();
    let spec = ModelSpec::new(ModelForm::Baseline, "out", "pol", g.control_names());
    let designs = candidate_designs(&g.panel, &g.regimes, &spec, 1, None).unwrap();
    let fits: Vec<_> = designs
        .candidates
        .into_iter()
        .map(|(f, d)| (f, fit_horizon(d).unwrap()))
        .collect();
    let cand = CandidateSet::from_fits(fits, None).unwrap();
    let w = solve_weights(&cand).unwrap();
    assert!(w.weight(ModelForm::B).unwrap() > 0.5, "{:?}", w.weights);
}
