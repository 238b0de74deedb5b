//! Shared dense linear-algebra helpers: rank-revealing column pruning,
//! QR least squares, and small solvers used by the weight QP.

use nalgebra::{DMatrix, DVector};

/// Relative tolerance used to declare a pivoted-QR diagonal entry zero.
pub const PRUNE_TOL: f64 = 1e-10;

/// Result of an ordinary least-squares solve.
#[derive(Debug, Clone)]
pub struct LsSolution {
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    /// (X'X)^{-1}, kept for covariance and leverage computations.
    pub xtx_inv: DMatrix<f64>,
    pub ssr: f64,
}

/// Column pivot order of `x` from a column-pivoted QR decomposition.
///
/// Entry `j` is the index of the original column placed at pivot slot `j`,
/// i.e. columns in decreasing order of remaining norm.
pub fn pivot_order(x: &DMatrix<f64>) -> Vec<usize> {
    let n = x.ncols();
    let qr = x.clone().col_piv_qr();
    let mut idx = DMatrix::<f64>::zeros(1, n);
    for j in 0..n {
        idx[(0, j)] = j as f64;
    }
    // A·P = Q·R: applying P to the index row vector yields the pivot order.
    qr.p().permute_columns(&mut idx);
    (0..n).map(|j| idx[(0, j)] as usize).collect()
}

/// Split columns of `x` into (retained, dropped) by rank-revealing QR.
///
/// A column is dropped when its pivoted R diagonal falls below
/// `tol * |r_00|`. Retained indices are returned in the original column
/// order so downstream column layouts stay deterministic.
pub fn prune_columns(x: &DMatrix<f64>, tol: f64) -> (Vec<usize>, Vec<usize>) {
    let n = x.ncols();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let qr = x.clone().col_piv_qr();
    let r = qr.r();
    let order = pivot_order(x);
    let lead = r[(0, 0)].abs();
    let mut rank = 0;
    let kmax = r.nrows().min(r.ncols());
    for k in 0..kmax {
        if r[(k, k)].abs() > tol * lead {
            rank = k + 1;
        } else {
            break;
        }
    }
    let mut retained: Vec<usize> = order[..rank].to_vec();
    let mut dropped: Vec<usize> = order[rank..].to_vec();
    retained.sort_unstable();
    dropped.sort_unstable();
    (retained, dropped)
}

/// Least squares of `y` on `x` via thin QR. `x` must have full column rank
/// (callers prune first); returns `None` when the triangular solve fails.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<LsSolution> {
    let n = x.ncols();
    let qr = x.clone().qr();
    let q = qr.q();
    let r = qr.r();
    for k in 0..n {
        if r[(k, k)] == 0.0 {
            return None;
        }
    }
    let qty = q.tr_mul(y);
    let beta = r.solve_upper_triangular(&qty)?;
    let residuals = y - x * &beta;
    let ssr = residuals.norm_squared();
    // (X'X)^{-1} = R^{-1} R^{-T}
    let rinv = r.solve_upper_triangular(&DMatrix::identity(n, n))?;
    let xtx_inv = &rinv * rinv.transpose();
    Some(LsSolution { beta, residuals, xtx_inv, ssr })
}

/// Dense LU solve, used for KKT systems and as an independent oracle path.
pub fn solve_dense(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    a.clone().lu().solve(b)
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pivot_order_prefers_larger_columns() {
        // Column 2 has the largest norm, so it must be pivoted first.
        let x = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 10.0, 0.0, 1.0, 10.0, 0.0, 0.0, 10.0]);
        let order = pivot_order(&x);
        assert_eq!(order[0], 2);
    }

    #[test]
    fn prune_detects_duplicate_column() {
        let mut x = DMatrix::from_fn(20, 3, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let dup = x.column(1).into_owned();
        x = DMatrix::from_columns(&[
            x.column(0).into_owned(),
            x.column(1).into_owned(),
            x.column(2).into_owned(),
            dup,
        ]
        .iter()
        .map(|c| c.column(0))
        .collect::<Vec<_>>());
        let (retained, dropped) = prune_columns(&x, PRUNE_TOL);
        assert_eq!(retained.len(), 3);
        assert_eq!(dropped.len(), 1);
        // The duplicate pair is columns 1 and 3; exactly one survives.
        assert!(dropped == vec![1] || dropped == vec![3]);
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        let x = DMatrix::from_fn(50, 4, |i, j| ((i as f64 + 1.0) * (j as f64 + 1.3)).sin());
        let y = DVector::from_fn(50, |i, _| (i as f64 * 0.37).cos());
        let ls = least_squares(&x, &y).unwrap();
        // Independent oracle: explicitly form X'X and solve by LU.
        let xtx = x.tr_mul(&x);
        let xty = x.tr_mul(&y);
        let beta_oracle = solve_dense(&xtx, &xty).unwrap();
        assert_relative_eq!(ls.beta, beta_oracle, epsilon = 1e-8);
        // Residual orthogonality.
        let xtu = x.tr_mul(&ls.residuals);
        assert!(xtu.amax() < 1e-8);
    }

    #[test]
    fn simplex_projection_basic() {
        let p = project_simplex(&[0.4, 0.4, 0.4]);
        let s: f64 = p.iter().sum();
        assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        let p2 = project_simplex(&[2.0, -1.0]);
        assert_relative_eq!(p2[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(p2[1], 0.0, epsilon = 1e-12);
    }
}
