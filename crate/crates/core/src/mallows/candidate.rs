//! Candidate-model bundles sharing one estimation sample.

use nalgebra::DMatrix;

use crate::projection::{HorizonFit, ModelForm};

use super::MallowsError;

/// All candidate fits for one horizon on the common sample, with the
/// residual matrix and the noise-variance estimate from the largest model.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub horizon: usize,
    pub forms: Vec<ModelForm>,
    pub fits: Vec<HorizonFit>,
    /// Column counts dim(z(m)), the Mallows penalty weights.
    pub dims: Vec<usize>,
    /// T_eff × M matrix of per-model residuals.
    pub residual_matrix: DMatrix<f64>,
    /// σ̂² from the largest model: SSR / (T_eff − dim).
    pub sigma2_hat: f64,
    /// True when σ̂² is numerically zero, so the penalty vanishes and
    /// weighting degenerates to pure fit minimization.
    pub sigma2_degenerate: bool,
}

/// σ̂² = (T_eff − dim)⁻¹ · SSR of the given fit.
pub fn estimate_sigma2(largest_fit: &HorizonFit) -> Result<f64, MallowsError> {
    let t_eff = largest_fit.t_eff;
    let dim = largest_fit.dim();
    if t_eff <= dim {
        return Err(MallowsError::NonPositiveDf { t_eff, dim });
    }
    Ok(largest_fit.ssr() / (t_eff - dim) as f64)
}

impl CandidateSet {
    /// Assemble a candidate set from fits that share one sample.
    ///
    /// The largest model (most columns; ties broken toward more interaction
    /// terms, then the later form) supplies σ̂². Extra penalty columns per
    /// model — estimated factors, for instance — can be added through
    /// `extra_dims`.
    pub fn from_fits(
        fits: Vec<(ModelForm, HorizonFit)>,
        extra_dims: Option<&[usize]>,
    ) -> Result<Self, MallowsError> {
        if fits.is_empty() {
            return Err(MallowsError::EmptyCandidateSet);
        }
        let rows0 = fits[0].1.rows.clone();
        let horizon = fits[0].1.horizon;
        for (form, f) in &fits {
            if f.rows != rows0 {
                return Err(MallowsError::MismatchedSamples {
                    detail: format!("model {form} fitted on a different row set"),
                });
            }
        }
        let t_eff = rows0.len();
        let forms: Vec<ModelForm> = fits.iter().map(|(m, _)| *m).collect();
        let mut dims: Vec<usize> = fits.iter().map(|(_, f)| f.dim()).collect();
        if let Some(extra) = extra_dims {
            if extra.len() != dims.len() {
                return Err(MallowsError::DimensionMismatch {
                    got: extra.len(),
                    want: dims.len(),
                });
            }
            for (d, e) in dims.iter_mut().zip(extra) {
                *d += e;
            }
        }
        let mut residual_matrix = DMatrix::<f64>::zeros(t_eff, fits.len());
        for (m, (_, f)) in fits.iter().enumerate() {
            residual_matrix.column_mut(m).copy_from(&f.residuals);
        }
        // Largest model: max columns, ties toward more interactions, then
        // the later candidate.
        let largest = (0..fits.len())
            .max_by_key(|&i| (dims[i], forms[i].interaction_count(), i))
            .expect("non-empty");
        let raw_sigma2 = {
            let f = &fits[largest].1;
            if t_eff <= dims[largest] {
                return Err(MallowsError::NonPositiveDf { t_eff, dim: dims[largest] });
            }
            f.ssr() / (t_eff - dims[largest]) as f64
        };
        // Exact-fit residuals land at rounding level rather than zero;
        // treat anything below 1e-20 as a vanished penalty.
        Ok(CandidateSet {
            horizon,
            forms,
            fits: fits.into_iter().map(|(_, f)| f).collect(),
            dims,
            residual_matrix,
            sigma2_hat: raw_sigma2,
            sigma2_degenerate: raw_sigma2 < 1e-20,
        })
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn t_eff(&self) -> usize {
        self.residual_matrix.nrows()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::projection::{fit_horizon, DesignMatrix, ModelSpec};
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    pub(crate) fn fit_from_residuals(residuals: Vec<f64>, dim_cols: usize) -> HorizonFit {
        // Construct a fit whose residual vector is exactly `residuals` by
        // regressing y = residuals on columns orthogonal to them.
        let n = residuals.len();
        let mut x = DMatrix::<f64>::zeros(n, dim_cols);
        for c in 0..dim_cols {
            for r in 0..n {
                // Orthogonalize a deterministic column against residuals.
                x[(r, c)] = (((r * (c + 2) + 3) % 17) as f64 * 0.31).sin();
            }
        }
        let u = DVector::from_vec(residuals);
        // Project u out of each column so X'u = 0 and OLS leaves u intact.
        let uu = u.norm_squared();
        for c in 0..dim_cols {
            let proj = x.column(c).dot(&u) / uu;
            let adjusted = x.column(c) - &u * proj;
            x.set_column(c, &adjusted);
        }
        let mut spec = ModelSpec::new(crate::projection::ModelForm::A, "out", "pol", vec!["c".into()]);
        spec.include_fixed_effects = false;
        let design = DesignMatrix {
            spec,
            horizon: 1,
            rows: (0..n).map(|i| (0usize, i)).collect(),
            y: u.clone(),
            x,
            names: (0..dim_cols).map(|c| format!("z{c}")).collect(),
            dropped: vec![],
        };
        fit_horizon(design).unwrap()
    }

    #[test]
    fn unit_residuals_give_ratio_sigma2() {
        // T=110, dim=10, all residuals 1 -> 110/100 = 1.1.
        let fit = fit_from_residuals(vec![1.0; 110], 10);
        assert_eq!(fit.dim(), 10);
        let s2 = estimate_sigma2(&fit).unwrap();
        assert_relative_eq!(s2, 1.1, epsilon = 1e-9);
    }

    #[test]
    fn zero_residuals_flagged_degenerate() {
        // y exactly in the column span -> zero residuals.
        let x = DMatrix::from_fn(20, 2, |r, c| ((r + c * 3) as f64 * 0.7).sin());
        let y = x.column(0) * 2.0 - x.column(1) * 0.5;
        let mut spec =
            ModelSpec::new(crate::projection::ModelForm::A, "out", "pol", vec!["c".into()]);
        spec.include_fixed_effects = false;
        let design = DesignMatrix {
            spec,
            horizon: 1,
            rows: (0..20).map(|i| (0usize, i)).collect(),
            y: y.clone_owned(),
            x,
            names: vec!["z0".into(), "z1".into()],
            dropped: vec![],
        };
        let fit = fit_horizon(design).unwrap();
        let set = CandidateSet::from_fits(vec![(crate::projection::ModelForm::A, fit)], None)
            .unwrap();
        assert!(set.sigma2_hat < 1e-20);
        assert!(set.sigma2_degenerate);
    }

    #[test]
    fn sigma2_consistent_under_homoskedastic_noise() {
        // sigma^2 = 4, T = 2000: estimate within 10%.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let normal = Normal::new(0.0, 2.0).unwrap();
        let n = 2000;
        let x = DMatrix::from_fn(n, 3, |r, c| ((r * (c + 1)) as f64 * 0.193).sin());
        let beta = DVector::from_vec(vec![1.0, -0.5, 0.25]);
        let noise = DVector::from_fn(n, |_, _| normal.sample(&mut rng));
        let y = &x * &beta + noise;
        let mut spec =
            ModelSpec::new(crate::projection::ModelForm::A, "out", "pol", vec!["c".into()]);
        spec.include_fixed_effects = false;
        let design = DesignMatrix {
            spec,
            horizon: 1,
            rows: (0..n).map(|i| (0usize, i)).collect(),
            y,
            x,
            names: vec!["z0".into(), "z1".into(), "z2".into()],
            dropped: vec![],
        };
        let fit = fit_horizon(design).unwrap();
        let s2 = estimate_sigma2(&fit).unwrap();
        assert!((s2 - 4.0).abs() / 4.0 < 0.10, "sigma2 {s2}");
    }

    #[test]
    fn non_positive_df_rejected() {
        let fit = fit_from_residuals(vec![1.0; 12], 6);
        let mut small = fit.clone();
        small.t_eff = 6;
        assert!(matches!(
            estimate_sigma2(&small).unwrap_err(),
            MallowsError::NonPositiveDf { .. }
        ));
    }
}
