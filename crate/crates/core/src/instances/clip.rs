//! Smooth clipping that freezes the chain outside a large ball and replaces
//! it with a quadratic moat, so the lower-bound structure survives queries
//! of arbitrary norm.
//!
//! With `Gamma(x) = Gamma~(a(||x|| - b))` and `G = F - F*`,
//! `F~(x) = (1 - Gamma(x)) G(x) + 42H max{0, ||x|| - B}^2`, whose minimum is 0.

use super::chain::ChainInstance;
use super::smooth_step::{smooth_step, smooth_step_d1};
use super::{Objective, StochasticOracle};
use crate::error::{check_dim, invalid, Result};
use crate::point::Point;
use crate::rng::RngKey;
use crate::types::OracleDraw;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipParams {
    pub a: f64,
    pub b: f64,
    pub rho: f64,
    /// Norm beyond which the clipped objective is exactly the moat.
    pub gamma_bound: f64,
    /// Gradient noise level the clip was tuned for.
    pub sigma: f64,
}

impl ClipParams {
    /// `a = min{1/(408B), sqrt(sigma^2/(32 rho^2))}`, `b = 2B`.
    pub fn new(radius: f64, sigma: f64, rho: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return invalid("B must be finite and > 0");
        }
        if !(sigma >= 0.0 && rho >= 0.0 && sigma.is_finite() && rho.is_finite()) {
            return invalid("sigma and rho must be finite and >= 0");
        }
        let ratio = if rho == 0.0 {
            f64::INFINITY
        } else {
            sigma / (32f64.sqrt() * rho)
        };
        let a = (1.0 / (408.0 * radius)).min(ratio);
        if a <= 0.0 {
            return invalid("clip sharpness collapses to 0 (sigma = 0 with rho > 0)");
        }
        let reach = if rho == 0.0 {
            0.0
        } else {
            32f64.sqrt() * rho / sigma
        };
        Ok(ClipParams {
            a,
            b: 2.0 * radius,
            rho,
            gamma_bound: 2.0 * radius + (408.0 * radius).max(reach),
            sigma,
        })
    }

    fn gamma(&self, norm: f64) -> (f64, f64) {
        let t = self.a * (norm - self.b);
        (smooth_step(t), self.a * smooth_step_d1(t))
    }
}

/// The clipped chain `F~`, built on the optimum-shifted chain `F - F*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClippedChain {
    pub chain: ChainInstance,
    pub clip: ClipParams,
    /// `B`, the radius inside which `F~ = F - F*`.
    pub radius: f64,
    f_star: f64,
}

impl ClippedChain {
    pub fn new(chain: ChainInstance, clip: ClipParams, radius: f64) -> Result<Self> {
        chain.validate()?;
        if (clip.b - 2.0 * radius).abs() > 1e-12 * radius {
            return invalid("clip radius b must equal 2B");
        }
        Ok(ClippedChain {
            chain,
            clip,
            radius,
            f_star: chain.f_star(),
        })
    }

    /// Clip tuned to the three-outcome oracle's own value variance.
    pub fn from_chain(chain: ChainInstance, radius: f64, sigma: f64) -> Result<Self> {
        let rho = chain.value_variance_bound().sqrt();
        Self::new(chain, ClipParams::new(radius, sigma, rho)?, radius)
    }

    /// `F(x) - F*` of the underlying chain.
    pub fn shifted_chain_value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.chain.value(x)? - self.f_star)
    }

    fn moat(&self, norm: f64) -> f64 {
        (norm - self.radius).max(0.0)
    }

    /// Combine a (possibly stochastic) value/gradient of `F - F*` into the
    /// clipped value/gradient.
    fn combine(&self, x: &[f64], shifted: f64, g: &Point) -> (f64, Point) {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (gam, dgam) = self.clip.gamma(norm);
        let moat = self.moat(norm);
        let h = self.chain.h;
        let value = (1.0 - gam) * shifted + 42.0 * h * moat * moat;
        // radial coefficient multiplying x / ||x||
        let radial = -shifted * dgam + 84.0 * h * moat;
        let mut out = g.scaled(1.0 - gam);
        if norm > 0.0 && radial != 0.0 {
            let c = radial / norm;
            for (o, xi) in out.iter_mut().zip(x) {
                *o += c * xi;
            }
        }
        (value, out)
    }
}

impl Objective for ClippedChain {
    fn dim(&self) -> usize {
        self.chain.n
    }

    fn value_grad(&self, x: &[f64]) -> Result<(f64, Point)> {
        let (f, g) = self.chain.eval(x)?;
        Ok(self.combine(x, f - self.f_star, &g))
    }
}

/// `g~ = (1 - Gamma) g - (f - F*) grad Gamma + 84H max{0, ||x|| - B} x/||x||`
/// driven by the three-outcome oracle.
#[derive(Clone, Debug)]
pub struct ClipOracle(pub Arc<ClippedChain>);

impl StochasticOracle for ClipOracle {
    fn dim(&self) -> usize {
        self.0.chain.n
    }

    fn draw(&self, x: &[f64], key: RngKey) -> Result<OracleDraw> {
        check_dim(self.0.chain.n, x.len())?;
        let base = self.0.chain.three_point(x, key)?;
        let f = base.value.expect("three-outcome oracle returns values");
        let (value, gradient) = self.0.combine(x, f - self.0.f_star, &base.gradient);
        Ok(OracleDraw {
            z: base.z,
            value: Some(value),
            gradient,
        })
    }

    fn variance_bound(&self) -> Option<f64> {
        Some(3.0 * self.0.clip.sigma * self.0.clip.sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::choose_chain_parameters;
    use crate::rng::derive_stream;
    use crate::types::ProblemParams;

    fn clipped() -> ClippedChain {
        let pp = ProblemParams::new(1.0, 1.0, 1.0, 2, 4, 2).unwrap();
        let chain = choose_chain_parameters(&pp).unwrap();
        ClippedChain::from_chain(chain, 1.0, 1.0).unwrap()
    }

    fn point_with_norm(n: usize, norm: f64, seed: u64) -> Vec<f64> {
        let mut s = derive_stream(RngKey::new(seed, 7, 7, 7));
        let v = s.gaussian_vec(n, 1.0);
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.into_iter().map(|a| a * norm / r).collect()
    }

    #[test]
    fn inside_radius_is_shifted_chain() {
        let c = clipped();
        for seed in 0..20 {
            let x = point_with_norm(c.dim(), 0.9, seed);
            let (v, g) = c.value_grad(&x).unwrap();
            let (f, gf) = c.chain.eval(&x).unwrap();
            assert_eq!(v, f - c.chain.f_star());
            assert_eq!(g, gf);
        }
    }

    #[test]
    fn far_away_is_pure_moat() {
        let c = clipped();
        let norm = c.clip.gamma_bound * 1.01;
        let x = point_with_norm(c.dim(), norm, 3);
        let v = c.value(&x).unwrap();
        let expect = 42.0 * (norm - 1.0) * (norm - 1.0);
        assert!((v - expect).abs() <= 1e-10 * expect);
    }

    #[test]
    fn dominates_shifted_chain() {
        let c = clipped();
        for seed in 0..400 {
            let norm = 10f64.powf(-1.0 + 4.0 * (seed as f64) / 400.0);
            let x = point_with_norm(c.dim(), norm, seed);
            let v = c.value(&x).unwrap();
            let shifted = c.shifted_chain_value(&x).unwrap();
            assert!(v >= shifted - 1e-12 * (1.0 + shifted.abs()), "norm {norm}");
        }
    }

    #[test]
    fn sharpness_and_reach() {
        let cp = ClipParams::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(cp.a, 1.0 / 408.0);
        assert_eq!(cp.gamma_bound, 410.0);
        let cp = ClipParams::new(1.0, 1.0, 100.0).unwrap();
        assert_eq!(cp.a, 1.0 / (32f64.sqrt() * 100.0));
        assert!((cp.gamma_bound - (2.0 + 32f64.sqrt() * 100.0)).abs() < 1e-9);
        assert!(ClipParams::new(1.0, 0.0, 1.0).is_err());
    }
}
