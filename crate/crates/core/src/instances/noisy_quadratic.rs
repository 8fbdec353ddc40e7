//! A diagonal quadratic with a wide spectrum and isotropic Gaussian gradient
//! noise; the workhorse for measuring convergence rates.

use super::{Objective, StochasticOracle};
use crate::error::{check_dim, invalid, Result};
use crate::point::Point;
use crate::rng::{derive_stream, RngKey};
use crate::types::{OracleDraw, Outcome};
use serde::{Deserialize, Serialize};

/// `F(x) = 1/2 sum_i lambda_i (x_i - x*_i)^2` with eigenvalues log-spaced
/// from `H * min_ratio` to `H`, `x*` a constant vector of norm `B`, and
/// gradient noise `N(0, sigma^2 / d)` per coordinate, so total variance is
/// exactly `sigma^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyQuadratic {
    pub eigenvalues: Vec<f64>,
    pub optimum: Point,
    pub sigma: f64,
}

pub const DEFAULT_DIM: usize = 64;
pub const DEFAULT_MIN_RATIO: f64 = 1e-8;

impl NoisyQuadratic {
    pub fn new(h: f64, b: f64, sigma: f64, dim: usize, min_ratio: f64) -> Result<Self> {
        if !(h > 0.0 && b > 0.0 && h.is_finite() && b.is_finite()) {
            return invalid("H and B must be finite and > 0");
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return invalid("sigma must be finite and >= 0");
        }
        if dim == 0 {
            return invalid("dimension must be >= 1");
        }
        if !(min_ratio > 0.0 && min_ratio <= 1.0) {
            return invalid("eigenvalue ratio must lie in (0, 1]");
        }
        let eigenvalues = if dim == 1 {
            vec![h]
        } else {
            (0..dim)
                .map(|i| h * min_ratio.powf(1.0 - i as f64 / (dim - 1) as f64))
                .collect()
        };
        let c = b / (dim as f64).sqrt();
        Ok(NoisyQuadratic {
            eigenvalues,
            optimum: Point::from(vec![c; dim]),
            sigma,
        })
    }

    pub fn standard(h: f64, b: f64, sigma: f64) -> Result<Self> {
        Self::new(h, b, sigma, DEFAULT_DIM, DEFAULT_MIN_RATIO)
    }
}

impl Objective for NoisyQuadratic {
    fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    fn value_grad(&self, x: &[f64]) -> Result<(f64, Point)> {
        check_dim(self.eigenvalues.len(), x.len())?;
        let mut v = 0.0;
        let g: Vec<f64> = x
            .iter()
            .zip(self.optimum.iter())
            .zip(&self.eigenvalues)
            .map(|((xi, oi), l)| {
                let d = xi - oi;
                v += 0.5 * l * d * d;
                l * d
            })
            .collect();
        Ok((v, Point::from(g)))
    }
}

impl StochasticOracle for NoisyQuadratic {
    fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    fn draw(&self, x: &[f64], key: RngKey) -> Result<OracleDraw> {
        let mut g = self.gradient(x)?;
        if self.sigma > 0.0 {
            let std = self.sigma / (self.eigenvalues.len() as f64).sqrt();
            let mut s = derive_stream(key);
            for gi in g.iter_mut() {
                *gi += std * s.gaussian();
            }
        }
        Ok(OracleDraw {
            z: Outcome::Noise,
            value: None,
            gradient: g,
        })
    }

    fn variance_bound(&self) -> Option<f64> {
        Some(self.sigma * self.sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_and_optimum() {
        let q = NoisyQuadratic::new(2.0, 3.0, 1.0, 5, 1e-4).unwrap();
        assert_eq!(q.eigenvalues.len(), 5);
        assert!((q.eigenvalues[0] - 2e-4).abs() < 1e-18);
        assert_eq!(q.eigenvalues[4], 2.0);
        assert!((q.optimum.norm() - 3.0).abs() < 1e-14);
        let (v, g) = q.value_grad(&q.optimum).unwrap();
        assert_eq!(v, 0.0);
        assert!(g.iter().all(|a| *a == 0.0));
    }

    #[test]
    fn noise_has_requested_variance() {
        let q = NoisyQuadratic::new(1.0, 1.0, 2.0, 8, 1e-3).unwrap();
        let x = vec![0.1; 8];
        let exact = q.gradient(&x).unwrap();
        let n = 20_000;
        let mut acc = 0.0;
        for i in 0..n {
            let d = q.draw(&x, RngKey::new(i, 0, 0, 0)).unwrap();
            acc += d.gradient.sub(&exact).norm_sq();
        }
        let var = acc / n as f64;
        assert!((var - 4.0).abs() < 0.1, "{var}");
    }
}
