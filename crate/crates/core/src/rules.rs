//! Componentwise thresholding rules and their pointwise derivatives.
//!
//! Every rule maps a least-squares coefficient `u` to an estimate that is
//! zero below a threshold and shrunk (or kept) above it. All rules are odd
//! functions of `u` and never increase the magnitude. The scaled-soft rule
//! multiplies the soft-thresholding output by a truncated expansion of the
//! ideal scaling `1/(1 - λ/|u|)`, which interpolates between soft (low
//! order) and hard (order → ∞) thresholding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Estimator family, without hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Hard thresholding (`ht`): keep-or-kill.
    #[serde(rename = "ht")]
    Hard,
    /// Soft thresholding (`st`): kill and shrink by λ.
    #[serde(rename = "st")]
    Soft,
    /// Non-negative garrote (`ng`): quadratic relaxation of the soft bias.
    #[serde(rename = "ng")]
    Garrote,
    /// Firm thresholding (`ft`): piecewise-linear soft/hard bridge.
    #[serde(rename = "ft")]
    Firm,
    /// Scaled soft thresholding (`sst`): order-m expansion of the ideal scaling.
    #[serde(rename = "sst")]
    ScaledSoft,
    /// Adaptive lasso (`al`): power-law reweighted soft rule.
    #[serde(rename = "al")]
    AdaptiveLasso,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Hard => "ht",
            Family::Soft => "st",
            Family::Garrote => "ng",
            Family::Firm => "ft",
            Family::ScaledSoft => "sst",
            Family::AdaptiveLasso => "al",
        }
    }

    /// True for families whose rule needs a second hyper-parameter besides
    /// the threshold (γ for firm, m for scaled soft, γ for adaptive lasso).
    pub fn has_hyper(self) -> bool {
        matches!(
            self,
            Family::Firm | Family::ScaledSoft | Family::AdaptiveLasso
        )
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ht" | "hard" => Ok(Family::Hard),
            "st" | "soft" => Ok(Family::Soft),
            "ng" | "garrote" => Ok(Family::Garrote),
            "ft" | "firm" => Ok(Family::Firm),
            "sst" | "scaled-soft" => Ok(Family::ScaledSoft),
            "al" | "adaptive-lasso" => Ok(Family::AdaptiveLasso),
            other => Err(Error::InvalidParameter(format!(
                "unknown method '{other}' (expected ht|st|ng|ft|sst|al)"
            ))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fully parameterized thresholding rule.
///
/// Construct through the checked constructors ([`ThresholdRule::soft`],
/// [`ThresholdRule::firm`], ...); they reject invalid hyper-parameters so
/// the evaluation methods never have to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    Hard { lambda: f64 },
    Soft { lambda: f64 },
    Garrote { lambda: f64 },
    Firm { lambda: f64, gamma: f64 },
    ScaledSoft { lambda: f64, m: u32 },
    AdaptiveLasso { lambda_r: f64, gamma: f64 },
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold level must be a positive finite number, got {lambda}"
        )));
    }
    Ok(())
}

impl ThresholdRule {
    pub fn hard(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(ThresholdRule::Hard { lambda })
    }

    pub fn soft(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(ThresholdRule::Soft { lambda })
    }

    pub fn garrote(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(ThresholdRule::Garrote { lambda })
    }

    pub fn firm(lambda: f64, gamma: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be > 1 for firm thresholding, got {gamma}"
            )));
        }
        Ok(ThresholdRule::Firm { lambda, gamma })
    }

    pub fn scaled_soft(lambda: f64, m: u32) -> Result<Self> {
        check_lambda(lambda)?;
        if m == 0 || m.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "m must be odd and >= 1 for scaled soft thresholding, got {m}"
            )));
        }
        Ok(ThresholdRule::ScaledSoft { lambda, m })
    }

    pub fn adaptive_lasso(lambda_r: f64, gamma: f64) -> Result<Self> {
        if !(lambda_r.is_finite() && lambda_r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda_r must be a positive finite number, got {lambda_r}"
            )));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be > 0 for the adaptive lasso, got {gamma}"
            )));
        }
        Ok(ThresholdRule::AdaptiveLasso { lambda_r, gamma })
    }

    pub fn family(&self) -> Family {
        match self {
            ThresholdRule::Hard { .. } => Family::Hard,
            ThresholdRule::Soft { .. } => Family::Soft,
            ThresholdRule::Garrote { .. } => Family::Garrote,
            ThresholdRule::Firm { .. } => Family::Firm,
            ThresholdRule::ScaledSoft { .. } => Family::ScaledSoft,
            ThresholdRule::AdaptiveLasso { .. } => Family::AdaptiveLasso,
        }
    }

    /// The magnitude below which the rule outputs exactly zero.
    ///
    /// For the adaptive lasso this is `λ_R^{1/(γ+1)}`; for every other rule
    /// it is λ itself, so selection agrees across families at equal λ.
    pub fn effective_threshold(&self) -> f64 {
        match *self {
            ThresholdRule::Hard { lambda }
            | ThresholdRule::Soft { lambda }
            | ThresholdRule::Garrote { lambda }
            | ThresholdRule::Firm { lambda, .. }
            | ThresholdRule::ScaledSoft { lambda, .. } => lambda,
            ThresholdRule::AdaptiveLasso { lambda_r, gamma } => lambda_r.powf(1.0 / (gamma + 1.0)),
        }
    }

    /// Evaluate the rule at a single coefficient.
    pub fn apply(&self, u: f64) -> f64 {
        let a = u.abs();
        match *self {
            ThresholdRule::Hard { lambda } => {
                if a >= lambda {
                    u
                } else {
                    0.0
                }
            }
            ThresholdRule::Soft { lambda } => {
                if a >= lambda {
                    u - u.signum() * lambda
                } else {
                    0.0
                }
            }
            ThresholdRule::Garrote { lambda } => {
                if a >= lambda {
                    let r = lambda / a;
                    (1.0 - r * r) * u
                } else {
                    0.0
                }
            }
            ThresholdRule::Firm { lambda, gamma } => {
                if a >= gamma * lambda {
                    u
                } else if a >= lambda {
                    gamma / (gamma - 1.0) * (u - u.signum() * lambda)
                } else {
                    0.0
                }
            }
            ThresholdRule::ScaledSoft { lambda, m } => {
                if a >= lambda {
                    let r = lambda / a;
                    (1.0 - r.powi(m as i32 + 1)) * u
                } else {
                    0.0
                }
            }
            ThresholdRule::AdaptiveLasso { lambda_r, gamma } => {
                if a >= self.effective_threshold() {
                    (1.0 - lambda_r / a.powf(gamma + 1.0)).max(0.0) * u
                } else {
                    0.0
                }
            }
        }
    }

    /// Almost-everywhere derivative of [`apply`](Self::apply) with respect
    /// to `u`, as used in Stein's identity. At the threshold itself the
    /// active-side value is returned (a measure-zero convention).
    ///
    /// Hard thresholding is discontinuous and has no such derivative.
    pub fn derivative(&self, u: f64) -> Result<f64> {
        let a = u.abs();
        Ok(match *self {
            ThresholdRule::Hard { .. } => return Err(Error::NoSteinDerivative),
            ThresholdRule::Soft { lambda } => {
                if a >= lambda {
                    1.0
                } else {
                    0.0
                }
            }
            ThresholdRule::Garrote { lambda } => {
                if a >= lambda {
                    let r = lambda / a;
                    1.0 + r * r
                } else {
                    0.0
                }
            }
            ThresholdRule::Firm { lambda, gamma } => {
                if a >= gamma * lambda {
                    1.0
                } else if a >= lambda {
                    gamma / (gamma - 1.0)
                } else {
                    0.0
                }
            }
            ThresholdRule::ScaledSoft { lambda, m } => {
                if a >= lambda {
                    let r = lambda / a;
                    1.0 + f64::from(m) * r.powi(m as i32 + 1)
                } else {
                    0.0
                }
            }
            ThresholdRule::AdaptiveLasso { lambda_r, gamma } => {
                if a >= self.effective_threshold() {
                    1.0 + gamma * lambda_r / a.powf(gamma + 1.0)
                } else {
                    0.0
                }
            }
        })
    }

    /// Apply the rule to every component of a coefficient vector.
    pub fn apply_vec(&self, bhat: &[f64]) -> Vec<f64> {
        bhat.iter().map(|&u| self.apply(u)).collect()
    }

    /// Short label used in report tables, e.g. `st` or `sst(m=21)`.
    ///
    /// The threshold level is deliberately omitted: labels identify a curve
    /// across a λ grid.
    pub fn curve_label(&self) -> String {
        match *self {
            ThresholdRule::Hard { .. } => "ht".to_string(),
            ThresholdRule::Soft { .. } => "st".to_string(),
            ThresholdRule::Garrote { .. } => "ng".to_string(),
            ThresholdRule::Firm { gamma, .. } => format!("ft(gamma={gamma})"),
            ThresholdRule::ScaledSoft { m, .. } => format!("sst(m={m})"),
            ThresholdRule::AdaptiveLasso { gamma, .. } => format!("al(gamma={gamma})"),
        }
    }
}

/// The exact scaling `1/(1 - λ/|u|)` that turns a soft-thresholded value
/// back into `u`. Only defined for `|u| > λ`.
pub fn ideal_scaling(lambda: f64, u: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let a = u.abs();
    if a <= lambda {
        return Err(Error::Domain(format!(
            "ideal scaling requires |u| > lambda, got |{u}| <= {lambda}"
        )));
    }
    Ok(1.0 / (1.0 - lambda / a))
}

/// Order-m truncation of the geometric expansion of [`ideal_scaling`]:
/// `1 + Σ_{j=1..m} (λ/|u|)^j` for `|u| ≥ λ`, and `m + 1` below the
/// threshold (the continuity convention; the soft factor is zero there).
pub fn taylor_scaling(lambda: f64, m: u32, u: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if m == 0 {
        return Err(Error::InvalidParameter(
            "expansion order m must be >= 1".to_string(),
        ));
    }
    let a = u.abs();
    if a < lambda {
        return Ok(f64::from(m) + 1.0);
    }
    let r = lambda / a;
    let mut sum = 1.0;
    let mut pow = 1.0;
    for _ in 0..m {
        pow *= r;
        sum += pow;
    }
    Ok(sum)
}

/// The jump part of hard thresholding: `±λ` beyond the threshold, zero in
/// the dead zone, so that `H_λ(u) = S_λ(u) + hard_jump(λ, u)` for all `u`.
pub fn hard_jump(lambda: f64, u: f64) -> f64 {
    debug_assert!(lambda > 0.0);
    if u >= lambda {
        lambda
    } else if u <= -lambda {
        -lambda
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn soft(lambda: f64) -> ThresholdRule {
        ThresholdRule::soft(lambda).unwrap()
    }

    #[test]
    fn apply_known_values() {
        assert_eq!(soft(1.0).apply(2.0), 1.0);
        assert_eq!(ThresholdRule::hard(1.0).unwrap().apply(0.5), 0.0);
        assert_eq!(ThresholdRule::garrote(1.0).unwrap().apply(2.0), 1.5);
        let sst = ThresholdRule::scaled_soft(1.0, 5).unwrap();
        assert_eq!(sst.apply(2.0), 1.96875);
        assert_eq!(sst.apply(-2.0), -1.96875);
    }

    #[test]
    fn firm_is_continuous_at_band_edges() {
        let ft = ThresholdRule::firm(1.0, 2.0).unwrap();
        assert_eq!(ft.apply(1.5), 1.0);
        assert_eq!(ft.apply(3.0), 3.0);
        // At |u| = γλ both branches give the same value.
        assert!((ft.apply(2.0) - 2.0).abs() < 1e-15);
        assert_eq!(ft.apply(1.0), 0.0);
    }

    #[test]
    fn boundary_convention_is_closed() {
        // |u| = λ is active: hard keeps u, the shrinkage rules output 0 by
        // continuity, and derivatives take the active-side value.
        let ht = ThresholdRule::hard(1.0).unwrap();
        assert_eq!(ht.apply(1.0), 1.0);
        assert_eq!(soft(1.0).apply(1.0), 0.0);
        assert_eq!(soft(1.0).derivative(1.0).unwrap(), 1.0);
        let sst = ThresholdRule::scaled_soft(1.0, 5).unwrap();
        assert_eq!(sst.derivative(1.0).unwrap(), 6.0);
    }

    #[test]
    fn derivative_known_values() {
        assert_eq!(soft(1.0).derivative(0.5).unwrap(), 0.0);
        assert_eq!(
            ThresholdRule::garrote(1.0)
                .unwrap()
                .derivative(2.0)
                .unwrap(),
            1.25
        );
        let sst = ThresholdRule::scaled_soft(1.0, 5).unwrap();
        assert_eq!(sst.derivative(2.0).unwrap(), 1.078125);
        let ft = ThresholdRule::firm(1.0, 2.0).unwrap();
        assert_eq!(ft.derivative(1.5).unwrap(), 2.0);
        assert_eq!(ft.derivative(2.5).unwrap(), 1.0);
    }

    #[test]
    fn hard_has_no_stein_derivative() {
        let err = ThresholdRule::hard(1.0)
            .unwrap()
            .derivative(2.0)
            .unwrap_err();
        assert!(matches!(err, Error::NoSteinDerivative));
    }

    #[test]
    fn ideal_scaling_reconstructs_hard() {
        assert_eq!(ideal_scaling(1.0, 2.0).unwrap(), 2.0);
        assert_eq!(ideal_scaling(1.0, -2.0).unwrap(), 2.0);
        let w = ideal_scaling(0.5, 1.0).unwrap();
        assert_eq!(w, 2.0);
        assert_eq!(w * soft(0.5).apply(1.0), 1.0);
        assert!(ideal_scaling(1.0, 1.0).is_err());
        assert!(ideal_scaling(1.0, 0.3).is_err());
    }

    #[test]
    fn taylor_scaling_values() {
        assert_eq!(taylor_scaling(1.0, 1, 2.0).unwrap(), 1.5);
        assert_eq!(taylor_scaling(1.0, 5, 0.3).unwrap(), 6.0);
        // For odd m the scaled soft factor reproduces the closed form:
        // S_1(2) = 1, so the product is the scaling itself.
        let alpha = taylor_scaling(1.0, 5, 2.0).unwrap();
        assert!((alpha * soft(1.0).apply(2.0) - 1.96875).abs() < 1e-15);
    }

    #[test]
    fn hard_jump_values_and_decomposition() {
        assert_eq!(hard_jump(1.0, 2.0), 1.0);
        assert_eq!(hard_jump(1.0, -3.0), -1.0);
        assert_eq!(hard_jump(1.0, 0.2), 0.0);
        let ht = ThresholdRule::hard(1.0).unwrap();
        for u in [-3.0, -1.0, -0.2, 0.0, 0.2, 1.0, 2.7] {
            let s = soft(1.0).apply(u);
            assert!((ht.apply(u) - (s + hard_jump(1.0, u))).abs() < 1e-15);
        }
    }

    #[test]
    fn apply_vec_matches_componentwise() {
        let bhat = [2.0, -2.0, 0.5];
        assert_eq!(soft(1.0).apply_vec(&bhat), vec![1.0, -1.0, 0.0]);
        assert_eq!(
            ThresholdRule::hard(1.0).unwrap().apply_vec(&bhat),
            vec![2.0, -2.0, 0.0]
        );
        let sst = ThresholdRule::scaled_soft(1.0, 5).unwrap();
        assert_eq!(sst.apply_vec(&[2.0, 0.0, -0.9]), vec![1.96875, 0.0, 0.0]);
    }

    #[test]
    fn adaptive_lasso_matches_scaled_soft_reparameterization() {
        let m = 5u32;
        for lambda in [0.25, 1.0, 1.7] {
            let sst = ThresholdRule::scaled_soft(lambda, m).unwrap();
            let al =
                ThresholdRule::adaptive_lasso(lambda.powi(m as i32 + 1), f64::from(m)).unwrap();
            for u in [-4.0, -1.2, -0.1, 0.4, 0.9, 2.0, 8.5] {
                assert!(
                    (sst.apply(u) - al.apply(u)).abs() < 1e-13,
                    "lambda={lambda} u={u}"
                );
            }
        }
    }

    #[test]
    fn constructors_reject_invalid_parameters() {
        assert!(ThresholdRule::soft(0.0).is_err());
        assert!(ThresholdRule::soft(-1.0).is_err());
        assert!(ThresholdRule::soft(f64::NAN).is_err());
        assert!(ThresholdRule::firm(1.0, 1.0).is_err());
        assert!(ThresholdRule::firm(1.0, 0.5).is_err());
        assert!(ThresholdRule::scaled_soft(1.0, 4).is_err());
        assert!(ThresholdRule::scaled_soft(1.0, 0).is_err());
        assert!(ThresholdRule::adaptive_lasso(0.0, 1.0).is_err());
        assert!(ThresholdRule::adaptive_lasso(1.0, 0.0).is_err());
        let msg = ThresholdRule::scaled_soft(1.0, 4).unwrap_err().to_string();
        assert!(msg.contains("m must be odd"));
    }

    #[test]
    fn effective_threshold_of_adaptive_lasso() {
        let al = ThresholdRule::adaptive_lasso(0.25, 1.0).unwrap();
        assert!((al.effective_threshold() - 0.5).abs() < 1e-15);
        assert_eq!(al.apply(0.4), 0.0);
        assert!(al.apply(0.6) > 0.0);
    }

    #[test]
    fn labels_are_stable() {
        assert_eq!(soft(0.3).curve_label(), "st");
        assert_eq!(
            ThresholdRule::firm(0.3, 1.5).unwrap().curve_label(),
            "ft(gamma=1.5)"
        );
        assert_eq!(
            ThresholdRule::scaled_soft(0.3, 21).unwrap().curve_label(),
            "sst(m=21)"
        );
    }
}
