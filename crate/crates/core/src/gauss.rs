//! Gaussian density and tail helpers.
//!
//! The upper tail goes through `erfc`, which keeps the relative error at
//! machine level far into the tail instead of cancelling like `1 - Φ(z)`
//! would. Densities are evaluated in exponent form so extreme arguments
//! underflow cleanly to zero.

/// 1/sqrt(2π).
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Φ⁻¹(0.75), the consistency constant turning a median absolute
/// deviation into a Gaussian standard deviation.
pub const MAD_CONSISTENCY: f64 = 0.674_489_750_196_081_7;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Standard normal density φ(z).
#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Density of N(mu, tau²) at `x`.
#[inline]
pub fn normal_pdf_scaled(x: f64, mu: f64, tau: f64) -> f64 {
    debug_assert!(tau > 0.0);
    normal_pdf((x - mu) / tau) / tau
}

/// Upper tail Φ̄(z) = P(Z ≥ z) for a standard normal Z.
#[inline]
pub fn normal_upper_tail(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// Standard normal CDF Φ(z).
#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}
