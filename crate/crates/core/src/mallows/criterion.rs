//! The Mallows criterion for convex model weights.

use super::{CandidateSet, MallowsError};

/// C(w) = (1/T)·Σ_t (Σ_m w_m û_t(m))² + (2σ̂²/T)·Σ_m w_m·dim(m).
///
/// Equivalently w'(Û'Û/T)w + (2σ̂²/T)·d'w; this is the quadratic form the
/// solver minimizes over the probability simplex.
pub fn mallows_criterion(w: &[f64], cand: &CandidateSet) -> Result<f64, MallowsError> {
    let m = cand.len();
    if w.len() != m {
        return Err(MallowsError::DimensionMismatch { got: w.len(), want: m });
    }
    let t = cand.t_eff() as f64;
    let mut fit_term = 0.0;
    for r in 0..cand.t_eff() {
        let mut combined = 0.0;
        for (j, &wj) in w.iter().enumerate() {
            combined += wj * cand.residual_matrix[(r, j)];
        }
        fit_term += combined * combined;
    }
    let penalty: f64 = w.iter().zip(&cand.dims).map(|(&wj, &d)| wj * d as f64).sum();
    Ok(fit_term / t + 2.0 * cand.sigma2_hat / t * penalty)
}

#[cfg(test)]
mod tests {
    use super::super::candidate::tests::fit_from_residuals;
    use super::*;
    use crate::projection::ModelForm;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set_from_matrix(u: DMatrix<f64>, dims: Vec<usize>, sigma2: f64) -> CandidateSet {
        let forms = ModelForm::CANDIDATES[..u.ncols()].to_vec();
        CandidateSet {
            horizon: 1,
            forms,
            fits: vec![],
            dims,
            residual_matrix: u,
            sigma2_hat: sigma2,
            sigma2_degenerate: sigma2 == 0.0,
        }
    }

    #[test]
    fn zero_residuals_reduce_to_penalty() {
        // Û = 0, σ̂² = 1, T = 100, unit weight on a 5-column model: 0.1.
        let set = set_from_matrix(DMatrix::zeros(100, 2), vec![5, 9], 1.0);
        let v = mallows_criterion(&[1.0, 0.0], &set).unwrap();
        assert_relative_eq!(v, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn identical_columns_fit_term_equals_single_model() {
        let fit = fit_from_residuals((0..60).map(|i| ((i * 7) as f64 * 0.13).sin()).collect(), 3);
        let ssr = fit.ssr();
        let t = fit.t_eff as f64;
        let u2 = {
            let mut m = DMatrix::zeros(60, 2);
            m.column_mut(0).copy_from(&fit.residuals);
            m.column_mut(1).copy_from(&fit.residuals);
            m
        };
        let set = set_from_matrix(u2, vec![3, 3], 0.0);
        let v = mallows_criterion(&[0.5, 0.5], &set).unwrap();
        assert_relative_eq!(v, ssr / t, epsilon = 1e-12);
    }

    #[test]
    fn matches_naive_double_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for _ in 0..50 {
            let t = rng.random_range(20..80);
            let m = rng.random_range(2..6);
            let u = DMatrix::from_fn(t, m, |_, _| rng.random_range(-2.0..2.0));
            let dims: Vec<usize> = (0..m).map(|_| rng.random_range(3..25)).collect();
            let sigma2 = rng.random_range(0.1..4.0);
            let mut w: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            let set = set_from_matrix(u.clone(), dims.clone(), sigma2);
            let fast = mallows_criterion(&w, &set).unwrap();
            // Naive double loop straight from the formula.
            let mut fit_term = 0.0;
            for row in 0..t {
                let mut acc = 0.0;
                for j in 0..m {
                    acc += w[j] * u[(row, j)];
                }
                fit_term += acc * acc;
            }
            let mut penalty = 0.0;
            for j in 0..m {
                penalty += w[j] * dims[j] as f64;
            }
            let oracle = fit_term / t as f64 + 2.0 * sigma2 / t as f64 * penalty;
            assert_relative_eq!(fast, oracle, epsilon = 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let set = set_from_matrix(DMatrix::zeros(10, 2), vec![3, 4], 1.0);
        assert!(matches!(
            mallows_criterion(&[1.0], &set).unwrap_err(),
            MallowsError::DimensionMismatch { got: 1, want: 2 }
        ));
    }
}
