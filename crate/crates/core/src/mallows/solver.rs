//! Exact minimization of the Mallows criterion over the probability simplex.
//!
//! The criterion is the convex quadratic w'Aw + b'w with A = Û'Û/T and
//! b = (2σ̂²/T)·dims. For small candidate counts the solver enumerates all
//! nonempty supports, solves each equality-constrained KKT system, keeps
//! the feasible candidates, and returns the best; ties break toward the
//! support with smaller total dim, then lexicographically. Larger sets fall
//! back to projected gradient with a duality-gap stop.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::{project_simplex, solve_dense};
use crate::projection::ModelForm;

use super::{mallows_criterion, CandidateSet, MallowsError};

/// Enumeration is exact and fast up to this many candidates.
const ENUMERATION_LIMIT: usize = 8;
/// Weights this far below zero are clipped; anything lower is a solver bug.
const CLIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    ActiveSetEnumeration,
    ProjectedGradient,
}

/// Solved weights for one horizon.
#[derive(Debug, Clone)]
pub struct MallowsWeights {
    pub horizon: usize,
    pub forms: Vec<ModelForm>,
    pub weights: Vec<f64>,
    pub criterion_value: f64,
    /// Models carrying strictly positive weight.
    pub active_set: Vec<ModelForm>,
    pub solver: SolverKind,
    /// Supports skipped because their KKT system was singular.
    pub singular_supports: usize,
    pub sigma2_degenerate: bool,
}

impl MallowsWeights {
    pub fn weight(&self, form: ModelForm) -> Option<f64> {
        self.forms.iter().position(|f| *f == form).map(|i| self.weights[i])
    }
}

/// Quadratic-form pieces of the criterion.
fn quadratic_parts(cand: &CandidateSet) -> (DMatrix<f64>, Vec<f64>) {
    let t = cand.t_eff() as f64;
    let a = cand.residual_matrix.tr_mul(&cand.residual_matrix) / t;
    let b: Vec<f64> = cand.dims.iter().map(|&d| 2.0 * cand.sigma2_hat / t * d as f64).collect();
    (a, b)
}

fn objective(a: &DMatrix<f64>, b: &[f64], w: &[f64]) -> f64 {
    let wv = DVector::from_column_slice(w);
    (wv.transpose() * a * &wv)[(0, 0)] + b.iter().zip(w).map(|(bi, wi)| bi * wi).sum::<f64>()
}

/// Solve min w'Aw + b'w on the simplex by support enumeration (m ≤ 8) or
/// projected gradient. Returns (weights, value, solver, singular supports).
pub fn solve_weights_qp(
    a: &DMatrix<f64>,
    b: &[f64],
    dims: &[usize],
) -> Result<(Vec<f64>, f64, SolverKind, usize), MallowsError> {
    let m = b.len();
    if m == 0 {
        return Err(MallowsError::EmptyCandidateSet);
    }
    if m == 1 {
        return Ok((vec![1.0], objective(a, b, &[1.0]), SolverKind::ActiveSetEnumeration, 0));
    }
    if m <= ENUMERATION_LIMIT {
        solve_by_enumeration(a, b, dims)
    } else {
        solve_by_projected_gradient(a, b)
    }
}

struct Best {
    value: f64,
    weights: Vec<f64>,
    total_dim: usize,
    support: Vec<usize>,
}

fn solve_by_enumeration(
    a: &DMatrix<f64>,
    b: &[f64],
    dims: &[usize],
) -> Result<(Vec<f64>, f64, SolverKind, usize), MallowsError> {
    let m = b.len();
    let mut best: Option<Best> = None;
    let mut singular = 0usize;
    for mask in 1u32..(1u32 << m) {
        let support: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let s = support.len();
        // KKT system: [2A_SS 1; 1' 0][w; λ] = [-b_S; 1].
        let mut kkt = DMatrix::<f64>::zeros(s + 1, s + 1);
        let mut rhs = DVector::<f64>::zeros(s + 1);
        for (i, &gi) in support.iter().enumerate() {
            for (j, &gj) in support.iter().enumerate() {
                kkt[(i, j)] = 2.0 * a[(gi, gj)];
            }
            kkt[(i, s)] = 1.0;
            kkt[(s, i)] = 1.0;
            rhs[i] = -b[gi];
        }
        rhs[s] = 1.0;
        let Some(sol) = solve_dense(&kkt, &rhs) else {
            singular += 1;
            continue;
        };
        // Feasibility: weights may dip to -1e-12 from rounding; clip and
        // renormalize. Anything lower means the support is infeasible.
        let mut w = vec![0.0; m];
        let mut feasible = true;
        for (i, &gi) in support.iter().enumerate() {
            let wi = sol[i];
            if wi < -CLIP_TOL {
                feasible = false;
                break;
            }
            w[gi] = wi.max(0.0);
        }
        if !feasible {
            continue;
        }
        let sum: f64 = w.iter().sum();
        if sum <= 0.0 {
            singular += 1;
            continue;
        }
        w.iter_mut().for_each(|x| *x /= sum);
        let value = objective(a, b, &w);
        let total_dim: usize = support.iter().map(|&i| dims[i]).sum();
        let candidate = Best { value, weights: w, total_dim, support };
        best = Some(match best {
            None => candidate,
            Some(current) => {
                let tie = (candidate.value - current.value).abs()
                    <= 1e-12 * (1.0 + current.value.abs());
                let better = if tie {
                    (candidate.total_dim, &candidate.support)
                        < (current.total_dim, &current.support)
                } else {
                    candidate.value < current.value
                };
                if better {
                    candidate
                } else {
                    current
                }
            }
        });
    }
    let best = best.ok_or(MallowsError::EmptyCandidateSet)?;
    Ok((best.weights, best.value, SolverKind::ActiveSetEnumeration, singular))
}

fn solve_by_projected_gradient(
    a: &DMatrix<f64>,
    b: &[f64],
) -> Result<(Vec<f64>, f64, SolverKind, usize), MallowsError> {
    let m = b.len();
    let sym = (a + a.transpose()) * 0.5;
    let lmax = sym.clone().symmetric_eigen().eigenvalues.amax();
    let step = 1.0 / (2.0 * lmax + 1e-12);
    let mut w = vec![1.0 / m as f64; m];
    let bv = DVector::from_column_slice(b);
    for _ in 0..200_000 {
        let wv = DVector::from_column_slice(&w);
        let grad = &sym * &wv * 2.0 + &bv;
        // Duality gap for the simplex: g'w − min_i g_i bounds f(w) − f*.
        let gap = grad.dot(&wv) - grad.min();
        if gap <= 1e-10 * (1.0 + objective(a, b, &w).abs()) {
            break;
        }
        let moved: Vec<f64> = (0..m).map(|i| w[i] - step * grad[i]).collect();
        w = project_simplex(&moved);
    }
    let value = objective(a, b, &w);
    Ok((w, value, SolverKind::ProjectedGradient, 0))
}

/// Minimize the Mallows criterion for a candidate set.
pub fn solve_weights(cand: &CandidateSet) -> Result<MallowsWeights, MallowsError> {
    if cand.is_empty() {
        return Err(MallowsError::EmptyCandidateSet);
    }
    let (a, b) = quadratic_parts(cand);
    let (weights, _, solver, singular_supports) = solve_weights_qp(&a, &b, &cand.dims)?;
    for &w in &weights {
        if w < -CLIP_TOL {
            return Err(MallowsError::NegativeWeight { value: w });
        }
    }
    // Report the criterion from its reference implementation, not the
    // solver's internal quadratic form.
    let criterion_value = mallows_criterion(&weights, cand)?;
    let active_set = cand
        .forms
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(f, _)| *f)
        .collect();
    Ok(MallowsWeights {
        horizon: cand.horizon,
        forms: cand.forms.clone(),
        weights,
        criterion_value,
        active_set,
        solver,
        singular_supports,
        sigma2_degenerate: cand.sigma2_degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_candidate_set(rng: &mut ChaCha8Rng, t: usize, m: usize) -> CandidateSet {
        let u = DMatrix::from_fn(t, m, |_, _| rng.random_range(-1.5..1.5));
        let dims: Vec<usize> = (0..m).map(|_| rng.random_range(5..25)).collect();
        let sigma2 = rng.random_range(0.05..2.0);
        CandidateSet {
            horizon: 1,
            forms: ModelForm::CANDIDATES[..m].to_vec(),
            fits: vec![],
            dims,
            residual_matrix: u,
            sigma2_hat: sigma2,
            sigma2_degenerate: false,
        }
    }

    /// Brute-force minimum over a 0.01-step grid on the 3-simplex.
    pub(crate) fn grid_minimum(cand: &CandidateSet) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..=100 {
            for j in 0..=(100 - i) {
                let w = [i as f64 / 100.0, j as f64 / 100.0, (100 - i - j) as f64 / 100.0];
                let v = mallows_criterion(&w, cand).unwrap();
                if v < best {
                    best = v;
                }
            }
        }
        best
    }

    #[test]
    fn single_model_gets_unit_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut cand = random_candidate_set(&mut rng, 40, 1);
        cand.forms = vec![ModelForm::A];
        let w = solve_weights(&cand).unwrap();
        assert_eq!(w.weights, vec![1.0]);
        assert_eq!(w.active_set, vec![ModelForm::A]);
    }

    #[test]
    fn identical_residuals_prefer_smaller_dim() {
        // Equal fit, dims 20 vs 23: all weight on the smaller model.
        let mut u = DMatrix::zeros(50, 2);
        for r in 0..50 {
            let v = ((r * 13) as f64 * 0.17).sin();
            u[(r, 0)] = v;
            u[(r, 1)] = v;
        }
        let cand = CandidateSet {
            horizon: 1,
            forms: vec![ModelForm::A, ModelForm::B],
            fits: vec![],
            dims: vec![20, 23],
            residual_matrix: u,
            sigma2_hat: 0.8,
            sigma2_degenerate: false,
        };
        let w = solve_weights(&cand).unwrap();
        assert_relative_eq!(w.weights[0], 1.0, epsilon = 1e-9);
        assert_relative_eq!(w.weights[1], 0.0, epsilon = 1e-9);
        assert!(w.singular_supports >= 1, "the two-model KKT must be singular");
    }

    #[test]
    fn matches_grid_oracle_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let cand = random_candidate_set(&mut rng, 60, 3);
            let solved = solve_weights(&cand).unwrap();
            let grid = grid_minimum(&cand);
            assert!(
                solved.criterion_value <= grid + 1e-6,
                "solver {} vs grid {}",
                solved.criterion_value,
                grid
            );
        }
    }

    #[test]
    fn minimized_value_beats_every_unit_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cand = random_candidate_set(&mut rng, 80, 5);
        let solved = solve_weights(&cand).unwrap();
        for i in 0..5 {
            let mut unit = vec![0.0; 5];
            unit[i] = 1.0;
            let v = mallows_criterion(&unit, &cand).unwrap();
            assert!(solved.criterion_value <= v + 1e-12);
        }
    }

    #[test]
    fn criterion_is_convex_on_the_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let cand = random_candidate_set(&mut rng, 50, 4);
        for _ in 0..50 {
            let draw = |rng: &mut ChaCha8Rng| {
                let mut w: Vec<f64> = (0..4).map(|_| rng.random_range(0.0f64..1.0)).collect();
                let s: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= s);
                w
            };
            let w1 = draw(&mut rng);
            let w2 = draw(&mut rng);
            let mid: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| 0.5 * (a + b)).collect();
            let f1 = mallows_criterion(&w1, &cand).unwrap();
            let f2 = mallows_criterion(&w2, &cand).unwrap();
            let fm = mallows_criterion(&mid, &cand).unwrap();
            assert!(fm <= 0.5 * (f1 + f2) + 1e-12);
        }
    }

    #[test]
    fn weights_invariant_to_row_reordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let cand = random_candidate_set(&mut rng, 60, 4);
        let solved = solve_weights(&cand).unwrap();
        // Reverse the rows of the residual matrix.
        let mut rev = cand.clone();
        let nrows = rev.residual_matrix.nrows();
        let rm = rev.residual_matrix.clone();
        for r in 0..nrows {
            rev.residual_matrix.row_mut(r).copy_from(&rm.row(nrows - 1 - r));
        }
        let solved_rev = solve_weights(&rev).unwrap();
        for (a, b) in solved.weights.iter().zip(&solved_rev.weights) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn projected_gradient_agrees_with_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let cand = random_candidate_set(&mut rng, 70, 5);
        let (a, b) = quadratic_parts(&cand);
        let (_, v_enum, _, _) = solve_by_enumeration(&a, &b, &cand.dims).unwrap();
        let (_, v_pg, _, _) = solve_by_projected_gradient(&a, &b).unwrap();
        assert_relative_eq!(v_enum, v_pg, epsilon = 1e-7, max_relative = 1e-7);
    }
}
