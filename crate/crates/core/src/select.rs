//! Threshold and hyper-parameter selection.
//!
//! Selection for every family except hard thresholding is a grid search
//! minimizing SURE. Hard thresholding has no data-driven SURE, so its level
//! comes from the universal threshold √(2σ̂²·log n/n) instead.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::risk::sure;
use crate::rules::{Family, ThresholdRule};

/// Indices (0-based) with |b̂_k| ≥ λ. The boundary is active, so hard,
/// soft, and scaled-soft rules select the same set at equal λ.
pub fn active_set(bhat: &[f64], lambda: f64) -> Vec<usize> {
    bhat.iter()
        .enumerate()
        .filter(|(_, u)| u.abs() >= lambda)
        .map(|(k, _)| k)
        .collect()
}

/// The data-independent hard-thresholding level √(2σ²·ln n/n).
pub fn universal_threshold(sigma2: f64, n: usize) -> Result<f64> {
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma2 must be finite and > 0, got {sigma2}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "universal threshold needs n >= 2, got {n}"
        )));
    }
    Ok((2.0 * sigma2 * (n as f64).ln() / n as f64).sqrt())
}

/// Outcome of a SURE grid search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionResult {
    /// The winning grid point.
    pub rule: ThresholdRule,
    /// Minimum SURE over the searched grid.
    pub sure: f64,
    /// Size of the active set at the winning threshold.
    pub k_hat: usize,
    /// 0-based active set at the winning threshold.
    pub active_set: Vec<usize>,
    /// Number of grid points evaluated.
    pub searched: usize,
}

fn build_rule(family: Family, lambda: f64, hyper: Option<f64>) -> Result<ThresholdRule> {
    match family {
        Family::Hard => Err(Error::InvalidParameter(
            "hard thresholding is not selected by SURE; use universal_threshold".to_string(),
        )),
        Family::Soft => ThresholdRule::soft(lambda),
        Family::Garrote => ThresholdRule::garrote(lambda),
        Family::Firm => ThresholdRule::firm(
            lambda,
            hyper.ok_or_else(|| {
                Error::InvalidParameter("firm thresholding needs a gamma grid".to_string())
            })?,
        ),
        Family::ScaledSoft => {
            let h = hyper.ok_or_else(|| {
                Error::InvalidParameter("scaled soft thresholding needs an m grid".to_string())
            })?;
            if h.fract() != 0.0 || h < 1.0 || h > u32::MAX as f64 {
                return Err(Error::InvalidParameter(format!(
                    "m must be a positive odd integer, got {h}"
                )));
            }
            ThresholdRule::scaled_soft(lambda, h as u32)
        }
        // For the adaptive lasso the first grid is over the raw
        // regularization level λ_R, not the effective threshold.
        Family::AdaptiveLasso => ThresholdRule::adaptive_lasso(
            lambda,
            hyper.ok_or_else(|| {
                Error::InvalidParameter("adaptive lasso needs a gamma grid".to_string())
            })?,
        ),
    }
}

/// SURE grid search over `lambda_grid` (× `hyper_grid` for families with a
/// second hyper-parameter).
///
/// Ties are broken toward the larger effective threshold, then the smaller
/// total DOF, then the earlier hyper-grid position, so the result does not
/// depend on evaluation order.
pub fn grid_select(
    family: Family,
    lambda_grid: &[f64],
    hyper_grid: Option<&[f64]>,
    bhat: &[f64],
    sigma2: f64,
) -> Result<SelectionResult> {
    if lambda_grid.is_empty() {
        return Err(Error::EmptyInput("lambda grid".to_string()));
    }
    if family.has_hyper() && hyper_grid.is_none_or(<[f64]>::is_empty) {
        return Err(Error::EmptyInput(format!("hyper grid for {family}")));
    }
    let hypers: Vec<Option<f64>> = if family.has_hyper() {
        hyper_grid.unwrap().iter().copied().map(Some).collect()
    } else {
        vec![None]
    };

    struct Best {
        rule: ThresholdRule,
        sure: f64,
        dof_total: f64,
        threshold: f64,
    }
    let mut best: Option<Best> = None;
    let mut searched = 0usize;
    for &lambda in lambda_grid {
        for &hyper in &hypers {
            let rule = build_rule(family, lambda, hyper)?;
            let report = sure(&rule, bhat, sigma2)?;
            searched += 1;
            let threshold = rule.effective_threshold();
            let better = match &best {
                None => true,
                Some(b) => {
                    report.sure < b.sure
                        || (report.sure == b.sure
                            && (threshold > b.threshold
                                || (threshold == b.threshold && report.dof.total < b.dof_total)))
                }
            };
            if better {
                best = Some(Best {
                    rule,
                    sure: report.sure,
                    dof_total: report.dof.total,
                    threshold,
                });
            }
        }
    }
    let best = best.expect("non-empty grid");
    let active = active_set(bhat, best.threshold);
    Ok(SelectionResult {
        rule: best.rule,
        sure: best.sure,
        k_hat: active.len(),
        active_set: active,
        searched,
    })
}

/// Cardinality of the symmetric difference K* Δ K̂.
pub fn selection_error(k_star: &[usize], k_hat: &[usize]) -> usize {
    let a: HashSet<usize> = k_star.iter().copied().collect();
    let b: HashSet<usize> = k_hat.iter().copied().collect();
    a.symmetric_difference(&b).count()
}

/// Σ_k (β̂_k − b_k)², which equals (1/n)‖Xβ̂ − Xb‖² under the Gram
/// normalization XᵀX = n·I.
pub fn actual_risk(beta_hat: &[f64], b_true: &[f64]) -> Result<f64> {
    if beta_hat.len() != b_true.len() {
        return Err(Error::DimensionMismatch {
            expected: b_true.len(),
            got: beta_hat.len(),
        });
    }
    Ok(beta_hat
        .iter()
        .zip(b_true)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum())
}
