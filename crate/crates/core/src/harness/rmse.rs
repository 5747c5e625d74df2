//! RMSE against ground truth, pooled over sources and trials.

use itertools::Itertools;

use crate::error::{DoaError, Result};
use crate::harness::sweep::TrialRecord;

/// Largest source count paired by exhaustive permutation search.
const EXHAUSTIVE_PAIRING_MAX: usize = 5;

/// Estimate-minus-truth errors under the pairing that minimizes the total
/// squared error. Entry `k` is the error of the estimate assigned to `truth[k]`.
pub fn pair_errors(estimates: &[f64], truth: &[f64]) -> Result<Vec<f64>> {
    if estimates.len() != truth.len() {
        return Err(DoaError::Precondition(format!(
            "{} estimates for {} true angles",
            estimates.len(),
            truth.len()
        )));
    }
    let k = truth.len();
    if k > EXHAUSTIVE_PAIRING_MAX {
        // sorted order is optimal for squared error on the line
        let mut e = estimates.to_vec();
        e.sort_by(f64::total_cmp);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| truth[a].total_cmp(&truth[b]));
        let mut errors = vec![0.0; k];
        for (rank, &t) in order.iter().enumerate() {
            errors[t] = e[rank] - truth[t];
        }
        return Ok(errors);
    }
    let best = (0..k)
        .permutations(k)
        .map(|perm| {
            let errors: Vec<f64> = perm
                .iter()
                .zip(truth)
                .map(|(&i, &t)| estimates[i] - t)
                .collect();
            let cost: f64 = errors.iter().map(|e| e * e).sum();
            (cost, errors)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, e)| e)
        .unwrap_or_default();
    Ok(best)
}

/// Pooled RMSE with its Monte-Carlo standard error and failure accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmseSummary {
    /// `None` when every trial failed.
    pub rmse_deg: Option<f64>,
    /// Delta-method standard error of the RMSE.
    pub std_error_deg: Option<f64>,
    pub n_ok: usize,
    pub n_failed: usize,
}

/// Summarizes records of a single algorithm.
pub fn summarize(records: &[TrialRecord], truth: &[f64]) -> Result<RmseSummary> {
    let mut per_trial = Vec::with_capacity(records.len());
    let mut n_failed = 0;
    for rec in records {
        match &rec.estimates_deg {
            Ok(est) => {
                let errors = pair_errors(est, truth)?;
                per_trial.push(errors.iter().map(|e| e * e).sum::<f64>() / truth.len() as f64);
            }
            Err(_) => n_failed += 1,
        }
    }
    let n_ok = per_trial.len();
    if n_ok == 0 {
        return Ok(RmseSummary {
            rmse_deg: None,
            std_error_deg: None,
            n_ok,
            n_failed,
        });
    }
    let t = n_ok as f64;
    let mse = per_trial.iter().sum::<f64>() / t;
    let rmse = mse.sqrt();
    let std_error = if n_ok > 1 && rmse > 0.0 {
        let var = per_trial.iter().map(|x| (x - mse).powi(2)).sum::<f64>() / (t - 1.0);
        (var / t).sqrt() / (2.0 * rmse)
    } else {
        0.0
    };
    Ok(RmseSummary {
        rmse_deg: Some(rmse),
        std_error_deg: Some(std_error),
        n_ok,
        n_failed,
    })
}

/// `sqrt( Σ_trials Σ_k (θ̂_k − θ_k)² / (K · T_ok) )` over non-failed trials.
pub fn compute_rmse(records: &[TrialRecord], truth: &[f64]) -> Result<f64> {
    summarize(records, truth)?
        .rmse_deg
        .ok_or_else(|| DoaError::Estimation("every trial failed".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Algorithm;
    use std::time::Duration;

    fn rec(i: usize, est: Option<Vec<f64>>) -> TrialRecord {
        TrialRecord {
            trial_index: i,
            algorithm: Algorithm::WlsLp,
            estimates_deg: est.ok_or_else(|| "failed".to_string()),
            warnings: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    #[test]
    fn exact_estimates_give_zero() {
        let r = [rec(0, Some(vec![1.0, 2.0])), rec(1, Some(vec![1.0, 2.0]))];
        assert_eq!(compute_rmse(&r, &[1.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_errors() {
        let r = [rec(0, Some(vec![11.0])), rec(1, Some(vec![9.0]))];
        assert!((compute_rmse(&r, &[10.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pairing_by_permutation() {
        let r = [rec(0, Some(vec![12.1, 9.9]))];
        let rmse = compute_rmse(&r, &[10.0, 12.0]).unwrap();
        assert!((rmse - 0.1).abs() < 1e-12, "{rmse}");
        let errs = pair_errors(&[12.1, 9.9], &[10.0, 12.0]).unwrap();
        assert!((errs[0] + 0.1).abs() < 1e-12 && (errs[1] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn large_k_uses_sorted_matching() {
        let truth = [5.0, 1.0, 3.0, 2.0, 4.0, 6.0];
        let est = [1.1, 2.1, 3.1, 4.1, 5.1, 6.1];
        let errs = pair_errors(&est, &truth).unwrap();
        assert!(errs.iter().all(|e| (e - 0.1).abs() < 1e-12));
    }

    #[test]
    fn failures_excluded_and_counted() {
        let r = [
            rec(0, Some(vec![10.5])),
            rec(1, None),
            rec(2, Some(vec![9.5])),
        ];
        let s = summarize(&r, &[10.0]).unwrap();
        assert_eq!((s.n_ok, s.n_failed), (2, 1));
        assert!((s.rmse_deg.unwrap() - 0.5).abs() < 1e-15);
        let all_failed = [rec(0, None)];
        assert_eq!(summarize(&all_failed, &[10.0]).unwrap().rmse_deg, None);
        assert!(compute_rmse(&all_failed, &[10.0]).is_err());
    }

    #[test]
    fn mismatched_lengths() {
        assert!(pair_errors(&[1.0], &[1.0, 2.0]).is_err());
    }
}
