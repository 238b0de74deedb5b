//! Assembly of per-(outcome, policy) test reports across horizons.

use std::collections::HashMap;

use super::{acceptance_proportion, adjust_pvalues, irf_verdict, AdjustMethod, InferenceError, IrfVerdict, PointwiseTest};

/// Raw-p summary for one horizon.
#[derive(Debug, Clone)]
pub struct HorizonTests {
    pub horizon: usize,
    pub p_values: Vec<f64>,
    /// Fraction of cells with p > alpha.
    pub prop_accept: f64,
    pub median_raw_p: f64,
}

/// Adjusted results for one method, computed per (country, period) cell
/// over the cells present at every horizon, then aggregated with equal
/// weight per cell.
#[derive(Debug, Clone)]
pub struct MethodReport {
    pub method: AdjustMethod,
    /// Fraction of cells rejecting at each horizon after adjustment.
    pub per_horizon_reject_frac: Vec<f64>,
    /// Majority-of-cells verdict (each cell's own verdict is the strict
    /// majority rule across its 12 adjusted horizons).
    pub verdict: IrfVerdict,
    /// Fraction of cells with at least one adjusted rejection.
    pub any_rejection_frac: f64,
    pub cells: usize,
}

/// Raw and adjusted testing results for one (outcome, policy) pair.
#[derive(Debug, Clone)]
pub struct TestReport {
    pub outcome: String,
    pub policy: String,
    pub alpha: f64,
    pub per_horizon: Vec<HorizonTests>,
    pub methods: Vec<MethodReport>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Build the report from per-horizon pointwise tests.
pub fn build_test_report(
    outcome: &str,
    policy: &str,
    alpha: f64,
    tests: &[PointwiseTest],
) -> Result<TestReport, InferenceError> {
    if tests.is_empty() {
        return Err(InferenceError::EmptyInput);
    }
    let mut per_horizon = Vec::with_capacity(tests.len());
    for t in tests {
        per_horizon.push(HorizonTests {
            horizon: t.horizon,
            p_values: t.p_values.clone(),
            prop_accept: acceptance_proportion(&t.p_values, alpha)?,
            median_raw_p: median(t.p_values.clone()),
        });
    }

    // Cells present at every horizon carry the multi-horizon adjustment.
    let per_horizon_maps: Vec<HashMap<(usize, usize), f64>> = tests
        .iter()
        .map(|t| t.rows.iter().copied().zip(t.p_values.iter().copied()).collect())
        .collect();
    let mut complete: Vec<((usize, usize), Vec<f64>)> = Vec::new();
    let mut candidate_cells: Vec<(usize, usize)> = tests[0].rows.clone();
    candidate_cells.sort_unstable();
    for cell in candidate_cells {
        let ps: Option<Vec<f64>> =
            per_horizon_maps.iter().map(|m| m.get(&cell).copied()).collect();
        if let Some(ps) = ps {
            complete.push((cell, ps));
        }
    }

    let mut methods = Vec::with_capacity(AdjustMethod::ALL.len());
    for method in AdjustMethod::ALL {
        let mut reject_counts = vec![0usize; tests.len()];
        let mut different_cells = 0usize;
        let mut any_rejection_cells = 0usize;
        for (_, pvals) in &complete {
            let adjusted = adjust_pvalues(pvals, method)?;
            for (h, &p) in adjusted.iter().enumerate() {
                if p <= alpha {
                    reject_counts[h] += 1;
                }
            }
            let detail = irf_verdict(&adjusted, alpha);
            if detail.verdict == IrfVerdict::Different {
                different_cells += 1;
            }
            if detail.any_rejection {
                any_rejection_cells += 1;
            }
        }
        let cells = complete.len();
        let frac = |count: usize| if cells > 0 { count as f64 / cells as f64 } else { 0.0 };
        methods.push(MethodReport {
            method,
            per_horizon_reject_frac: reject_counts.iter().map(|&c| frac(c)).collect(),
            verdict: if cells > 0 && 2 * different_cells > cells {
                IrfVerdict::Different
            } else {
                IrfVerdict::NotDifferent
            },
            any_rejection_frac: frac(any_rejection_cells),
            cells,
        });
    }
    Ok(TestReport {
        outcome: outcome.to_string(),
        policy: policy.to_string(),
        alpha,
        per_horizon,
        methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake_test(horizon: usize, rows: Vec<(usize, usize)>, p: Vec<f64>) -> PointwiseTest {
        PointwiseTest { horizon, statistics: vec![0.0; p.len()], rows, p_values: p }
    }

    #[test]
    fn report_aggregates_cells_and_verdicts() {
        // Two horizons, two common cells: cell (0,0) rejects everywhere,
        // cell (0,1) never rejects.
        let rows = vec![(0, 0), (0, 1)];
        let t1 = fake_test(1, rows.clone(), vec![0.001, 0.9]);
        let t2 = fake_test(2, rows.clone(), vec![0.002, 0.8]);
        let report = build_test_report("gdp", "almp", 0.1, &[t1, t2]).unwrap();
        assert_eq!(report.per_horizon.len(), 2);
        assert_eq!(report.per_horizon[0].prop_accept, 0.5);
        let bonf = &report.methods[0];
        assert_eq!(bonf.cells, 2);
        // Cell 1: adjusted p = 2*0.001, 2*0.002 -> rejects both horizons.
        assert_eq!(bonf.per_horizon_reject_frac, vec![0.5, 0.5]);
        assert_eq!(bonf.any_rejection_frac, 0.5);
        // One of two cells is "different": not a strict majority.
        assert_eq!(bonf.verdict, IrfVerdict::NotDifferent);
    }

    #[test]
    fn cells_missing_a_horizon_are_excluded() {
        let t1 = fake_test(1, vec![(0, 0), (0, 1)], vec![0.001, 0.9]);
        let t2 = fake_test(2, vec![(0, 0)], vec![0.002]);
        let report = build_test_report("gdp", "almp", 0.1, &[t1, t2]).unwrap();
        assert_eq!(report.methods[0].cells, 1);
    }
}
