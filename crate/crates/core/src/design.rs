//! Square orthogonal designs: construction, analysis and synthesis.
//!
//! A design is an n×n matrix X with Gram matrix XᵀX = n·I. Under that
//! normalization the least-squares coefficients of a signal y are simply
//! b̂ = Xᵀy/n, and y = X·b̂ holds exactly, so analysis and synthesis are
//! inverse transforms. The built-in design is the real trigonometric basis
//! on the uniform grid t_i = 2π(i-1)/n.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest allowed entry of |XᵀX − n·I| for a valid design.
pub const GRAM_TOLERANCE: f64 = 1e-8;

/// Where a design came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    BuiltinTrig,
    UserLoaded,
}

/// An n×n design with orthogonal columns of squared norm n.
#[derive(Debug, Clone)]
pub struct OrthogonalDesign {
    n: usize,
    /// Column-major storage: `cols[j*n + i]` is X[i][j].
    cols: Vec<f64>,
    provenance: Provenance,
}

impl OrthogonalDesign {
    /// Build the trigonometric design on t_i = 2π(i-1)/n.
    ///
    /// Column 1 is constant one; each frequency f = 1..n/2-1 contributes a
    /// `√2·cos(f t)` and a `√2·sin(f t)` column; the last column is the
    /// Nyquist alternation cos((n/2)t) = (-1)^(i-1). These are exactly the
    /// integer frequencies that are orthogonal on the discrete grid.
    pub fn trig(n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "trig design needs an even n >= 4, got {n}"
            )));
        }
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut cols = vec![0.0; n * n];
        for i in 0..n {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            cols[i] = 1.0;
            for j in 1..n - 1 {
                // 1-based column k = j+1: even k carries cos(f t) with
                // f = k/2, odd k carries sin(f t) with f = (k-1)/2.
                let f = j.div_ceil(2) as f64;
                cols[j * n + i] = if j % 2 == 1 {
                    sqrt2 * (f * t).cos()
                } else {
                    sqrt2 * (f * t).sin()
                };
            }
            cols[(n - 1) * n + i] = if i % 2 == 0 { 1.0 } else { -1.0 };
        }
        let design = OrthogonalDesign {
            n,
            cols,
            provenance: Provenance::BuiltinTrig,
        };
        design.check_gram()?;
        Ok(design)
    }

    /// Wrap a user-supplied matrix given in row-major order.
    ///
    /// The Gram property is re-validated; a violation is a hard error.
    pub fn from_rows(n: usize, row_major: &[f64]) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "designs must have an even n >= 2, got {n}"
            )));
        }
        if row_major.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: row_major.len(),
            });
        }
        if !row_major.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "design entries must be finite".to_string(),
            ));
        }
        let mut cols = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                cols[j * n + i] = row_major[i * n + j];
            }
        }
        let design = OrthogonalDesign {
            n,
            cols,
            provenance: Provenance::UserLoaded,
        };
        design.check_gram()?;
        Ok(design)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// The design entry `X[i][j]`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.cols[j * self.n + i]
    }

    fn column(&self, j: usize) -> &[f64] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }

    /// Row-major copy, the layout used by the CSV format.
    pub fn to_row_major(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.cols[j * n + i];
            }
        }
        out
    }

    /// max_{j,k} |(XᵀX)_{jk} − n·δ_{jk}|.
    pub fn max_gram_deviation(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                let dot: f64 = self
                    .column(j)
                    .iter()
                    .zip(self.column(k))
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if j == k { n as f64 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    fn check_gram(&self) -> Result<()> {
        let dev = self.max_gram_deviation();
        if dev > GRAM_TOLERANCE {
            return Err(Error::NotOrthogonal {
                max_deviation: dev,
                tolerance: GRAM_TOLERANCE,
            });
        }
        Ok(())
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Least-squares coefficients b̂ = Xᵀy/n.
    pub fn analyze(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y)?;
        let inv_n = 1.0 / self.n as f64;
        Ok((0..self.n)
            .map(|j| {
                self.column(j)
                    .iter()
                    .zip(y)
                    .map(|(x, yi)| x * yi)
                    .sum::<f64>()
                    * inv_n
            })
            .collect())
    }

    /// Fitted signal Xβ.
    pub fn synthesize(&self, beta: &[f64]) -> Result<Vec<f64>> {
        self.check_len(beta)?;
        let mut out = vec![0.0; self.n];
        for (j, &bj) in beta.iter().enumerate() {
            if bj == 0.0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.column(j)) {
                *o += bj * x;
            }
        }
        Ok(out)
    }

    /// Draw y = Xb + ε with ε ~ N(0, σ²I) from the given stream.
    ///
    /// With `sigma2 = 0` the observation is exactly Xb.
    pub fn generate_observation<R: Rng>(
        &self,
        b: &[f64],
        sigma2: f64,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be finite and >= 0, got {sigma2}"
            )));
        }
        let mut y = self.synthesize(b)?;
        if sigma2 > 0.0 {
            let sigma = sigma2.sqrt();
            for yi in &mut y {
                let z: f64 = rng.sample(StandardNormal);
                *yi += sigma * z;
            }
        }
        Ok(y)
    }
}
