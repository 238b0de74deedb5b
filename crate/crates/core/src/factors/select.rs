//! Data-driven factor count via the panel information criterion
//! IC(r) = ln(SSR/(NT)) + r·((N+T)/(NT))·ln(NT/(N+T)), evaluated on the
//! defactored residuals of the full interactive estimation at each r.

use crate::projection::DesignMatrix;

use super::interactive::balance_rows;
use super::{estimate_interactive, FactorError, FactorFit};

/// Outcome of the outer selection loop.
#[derive(Debug, Clone)]
pub struct FactorSelection {
    pub r: usize,
    /// (r, IC value) for every candidate count.
    pub ic: Vec<(usize, f64)>,
    /// The winning fit.
    pub best: FactorFit,
}

/// Select the factor count in 0..=r_max by rerunning the full estimation
/// at each r and minimizing the information criterion; ties go to the
/// smaller count.
pub fn select_factor_number(
    design: &DesignMatrix,
    r_max: usize,
) -> Result<FactorSelection, FactorError> {
    let grid = balance_rows(&design.rows)?;
    let n = grid.countries.len();
    let t = grid.periods.len();
    let limit = n.min(t) / 2;
    if r_max > limit {
        return Err(FactorError::RMaxTooLarge { r_max, limit });
    }
    let nt = (n * t) as f64;
    let penalty_unit = ((n + t) as f64 / nt) * (nt / (n + t) as f64).ln();

    let mut ic = Vec::with_capacity(r_max + 1);
    let mut best: Option<(usize, f64, FactorFit)> = None;
    for r in 0..=r_max {
        let fit = estimate_interactive(design, r)?;
        let value = (fit.ssr() / nt).ln() + r as f64 * penalty_unit;
        ic.push((r, value));
        let better = match &best {
            None => true,
            // Strict improvement only: ties keep the smaller r.
            Some((_, best_value, _)) => value < *best_value,
        };
        if better {
            best = Some((r, value, fit));
        }
    }
    let (r, _, fit) = best.expect("r_max >= 0 yields at least one candidate");
    Ok(FactorSelection { r, ic, best: fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_regimes, Column, PanelDataset, Period, Transform};
    use crate::projection::{build_design, ModelForm, ModelSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise_design(n: usize, t: usize, r_true: usize, seed: u64) -> DesignMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let np = t + 3;
        let p0 = Period::new(1985, 1);
        let periods: Vec<Period> = (0..np as i64).map(|k| p0.offset(k)).collect();
        let countries: Vec<String> = (0..n).map(|c| format!("C{c:02}")).collect();
        let factors: Vec<Vec<f64>> = (0..r_true)
            .map(|_| (0..np).map(|_| rng.random_range(-1.0f64..1.0) * 1.8).collect())
            .collect();
        let loadings: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..r_true).map(|_| rng.random_range(-1.5f64..1.5) * 1.5).collect())
            .collect();
        let mut pol = vec![None; n * np];
        let mut out = vec![None; n * np];
        let mut stir = vec![None; n * np];
        for ci in 0..n {
            for pi in 0..np {
                pol[ci * np + pi] = Some(rng.random_range(-1.0..1.0));
                stir[ci * np + pi] = Some(3.0 + ((ci + pi) as f64 * 0.31).sin());
            }
        }
        for ci in 0..n {
            for pi in 0..np - 1 {
                let mut fac = 0.0;
                for j in 0..r_true {
                    fac += loadings[ci][j] * factors[j][pi + 1];
                }
                let e: f64 = rng.random_range(-0.8..0.8);
                out[ci * np + pi + 1] = Some(0.9 * pol[ci * np + pi].unwrap() + fac + e);
            }
        }
        let panel = PanelDataset::new(
            countries,
            periods,
            vec![
                Column { name: "out".into(), transform: Transform::Level, values: out },
                Column { name: "pol".into(), transform: Transform::Level, values: pol },
                Column { name: "stir".into(), transform: Transform::Level, values: stir },
            ],
        )
        .unwrap();
        let regimes = build_regimes(&panel, "stir").unwrap();
        let mut spec = ModelSpec::new(ModelForm::Baseline, "out", "pol", vec![]);
        spec.controls = vec![];
        spec.include_fixed_effects = false;
        // Policy alone; controls empty keeps the design minimal.
        build_design(&panel, &regimes, &spec, 1, None).unwrap()
    }

    #[test]
    fn r_max_zero_returns_zero() {
        let design = noise_design(6, 30, 0, 5);
        let sel = select_factor_number(&design, 0).unwrap();
        assert_eq!(sel.r, 0);
        assert_eq!(sel.ic.len(), 1);
    }

    #[test]
    fn pure_noise_selects_zero() {
        let design = noise_design(10, 60, 0, 17);
        let sel = select_factor_number(&design, 3).unwrap();
        assert_eq!(sel.r, 0);
    }

    #[test]
    fn strong_two_factor_structure_selects_two() {
        let design = noise_design(12, 80, 2, 29);
        let sel = select_factor_number(&design, 4).unwrap();
        assert_eq!(sel.r, 2);
    }

    #[test]
    fn oversized_r_max_is_rejected() {
        let design = noise_design(6, 30, 0, 5);
        let err = select_factor_number(&design, 5).unwrap_err();
        assert!(matches!(err, FactorError::RMaxTooLarge { r_max: 5, limit: 3 }));
    }
}
