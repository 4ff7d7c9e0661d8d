//! Degrees of freedom, unbiased risk estimates, and noise-variance
//! estimators.
//!
//! For a componentwise rule β̂ = f(b̂) with b̂ ~ N(b, σ²/n·I), the degrees
//! of freedom (the covariance between fit and observation) equals
//! σ²·E Σ_k f'(b̂_k) whenever f is absolutely continuous. Each rule's DOF
//! splits into a first term σ²·k̂ counting the active set — the soft
//! thresholding DOF — and an excess term tied to threshold-crossing
//! behavior. Hard thresholding is discontinuous: its DOF exists but
//! depends on the unknown true coefficients, so only the closed-form
//! oracle [`ht_dof_theoretical`] is provided for it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{MAD_CONSISTENCY, normal_pdf_scaled, normal_upper_tail};
use crate::rules::ThresholdRule;

/// Degrees of freedom split into the active-set term and the excess term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DofBreakdown {
    /// Active-set term σ²·k̂ (σ²·k̂₀ for firm thresholding).
    pub d1: f64,
    /// Excess ("search") term; zero for soft thresholding.
    pub d2: f64,
    /// d1 + d2.
    pub total: f64,
}

impl DofBreakdown {
    pub fn new(d1: f64, d2: f64) -> Self {
        DofBreakdown {
            d1,
            d2,
            total: d1 + d2,
        }
    }
}

fn check_sigma2(sigma2: f64) -> Result<()> {
    if !(sigma2.is_finite() && sigma2 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma2 must be finite and >= 0, got {sigma2}"
        )));
    }
    Ok(())
}

/// Data-driven degrees of freedom of a rule at the observed coefficients.
///
/// Hard thresholding is rejected: its DOF needs the true representation
/// and must go through [`ht_dof_theoretical`] instead.
pub fn dof(rule: &ThresholdRule, bhat: &[f64], sigma2: f64) -> Result<DofBreakdown> {
    check_sigma2(sigma2)?;
    match *rule {
        ThresholdRule::Hard { .. } => Err(Error::NoDataDrivenDof),
        ThresholdRule::Soft { lambda } => {
            let k = bhat.iter().filter(|u| u.abs() >= lambda).count();
            Ok(DofBreakdown::new(sigma2 * k as f64, 0.0))
        }
        ThresholdRule::Garrote { lambda } => {
            let mut k = 0usize;
            let mut excess = 0.0;
            for &u in bhat {
                let a = u.abs();
                if a >= lambda {
                    k += 1;
                    let r = lambda / a;
                    excess += r * r;
                }
            }
            Ok(DofBreakdown::new(sigma2 * k as f64, sigma2 * excess))
        }
        ThresholdRule::ScaledSoft { lambda, m } => {
            let mut k = 0usize;
            let mut excess = 0.0;
            for &u in bhat {
                let a = u.abs();
                if a >= lambda {
                    k += 1;
                    excess += (lambda / a).powi(m as i32 + 1);
                }
            }
            Ok(DofBreakdown::new(
                sigma2 * k as f64,
                sigma2 * f64::from(m) * excess,
            ))
        }
        ThresholdRule::AdaptiveLasso { lambda_r, gamma } => {
            let t = rule.effective_threshold();
            let mut k = 0usize;
            let mut excess = 0.0;
            for &u in bhat {
                let a = u.abs();
                if a >= t {
                    k += 1;
                    excess += gamma * lambda_r / a.powf(gamma + 1.0);
                }
            }
            Ok(DofBreakdown::new(sigma2 * k as f64, sigma2 * excess))
        }
        ThresholdRule::Firm { lambda, gamma } => {
            let top = gamma * lambda;
            let mut k0 = 0usize;
            let mut k1 = 0usize;
            for &u in bhat {
                let a = u.abs();
                if a >= top {
                    k0 += 1;
                } else if a >= lambda {
                    k1 += 1;
                }
            }
            Ok(DofBreakdown::new(
                sigma2 * k0 as f64,
                sigma2 * gamma / (gamma - 1.0) * k1 as f64,
            ))
        }
    }
}

/// One fitted rule's unbiased risk estimate and its ingredients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SureReport {
    /// (1/n)‖y − Xβ̂‖², which equals ‖b̂ − β̂‖² under an orthogonal design.
    pub residual: f64,
    pub sigma2: f64,
    pub dof: DofBreakdown,
    /// residual − σ² + 2·dof.total/n.
    pub sure: f64,
    pub n: usize,
}

/// Stein's unbiased estimate of the prediction risk of `rule` at the
/// least-squares coefficients `bhat`.
pub fn sure(rule: &ThresholdRule, bhat: &[f64], sigma2: f64) -> Result<SureReport> {
    if bhat.is_empty() {
        return Err(Error::EmptyInput("coefficient vector".to_string()));
    }
    let breakdown = dof(rule, bhat, sigma2)?;
    let residual: f64 = bhat
        .iter()
        .map(|&u| {
            let d = u - rule.apply(u);
            d * d
        })
        .sum();
    let n = bhat.len();
    let sure = residual - sigma2 + 2.0 * breakdown.total / n as f64;
    Ok(SureReport {
        residual,
        sigma2,
        dof: breakdown,
        sure,
        n,
    })
}

/// Closed-form degrees of freedom of hard thresholding at level λ, given
/// the *true* coefficients (an oracle quantity, not an estimator).
///
/// With b̂_k ~ N(b_k, τ²), τ = σ/√n:
/// d1 = σ²·E k̂_λ = σ²·Σ_k [Φ̄((λ−b_k)/τ) + Φ̄((λ+b_k)/τ)] and
/// d2 = σ²·Σ_k λ·(φ_{b_k,τ}(λ) + φ_{b_k,τ}(−λ)), the search degrees of
/// freedom contributed by threshold crossings.
pub fn ht_dof_theoretical(b: &[f64], sigma2: f64, lambda: f64) -> Result<DofBreakdown> {
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma2 must be finite and > 0, got {sigma2}"
        )));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be finite and > 0, got {lambda}"
        )));
    }
    if b.is_empty() {
        return Err(Error::EmptyInput("coefficient vector".to_string()));
    }
    let n = b.len() as f64;
    let tau = (sigma2 / n).sqrt();
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for &bk in b {
        d1 += normal_upper_tail((lambda - bk) / tau) + normal_upper_tail((lambda + bk) / tau);
        d2 += lambda * (normal_pdf_scaled(lambda, bk, tau) + normal_pdf_scaled(-lambda, bk, tau));
    }
    Ok(DofBreakdown::new(sigma2 * d1, sigma2 * d2))
}

/// Unbiased noise-variance estimate from components whose true
/// coefficients are zero: σ̂² = (n/|J|)·Σ_{k∈J} b̂_k².
///
/// `zero_indices` are 0-based positions into `bhat`.
pub fn estimate_sigma2(bhat: &[f64], zero_indices: &[usize]) -> Result<f64> {
    if zero_indices.is_empty() {
        return Err(Error::EmptyInput("zero index set".to_string()));
    }
    let n = bhat.len();
    let mut sum = 0.0;
    for &k in zero_indices {
        if k >= n {
            return Err(Error::InvalidParameter(format!(
                "zero index {k} out of range for n = {n}"
            )));
        }
        sum += bhat[k] * bhat[k];
    }
    Ok(n as f64 / zero_indices.len() as f64 * sum)
}

/// Median-absolute-deviation noise estimate from putative noise-only
/// coefficients of an n-sample problem: σ̂ = √n·median(|b̂_k|)/Φ⁻¹(0.75).
/// Returns σ̂².
pub fn estimate_sigma_mad(detail: &[f64], n: usize) -> Result<f64> {
    if detail.is_empty() {
        return Err(Error::EmptyInput("detail coefficients".to_string()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".to_string()));
    }
    let mut abs: Vec<f64> = detail.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| a.partial_cmp(b).expect("finite coefficients"));
    let mid = abs.len() / 2;
    let median = if abs.len().is_multiple_of(2) {
        0.5 * (abs[mid - 1] + abs[mid])
    } else {
        abs[mid]
    };
    let sigma = (n as f64).sqrt() * median / MAD_CONSISTENCY;
    Ok(sigma * sigma)
}
