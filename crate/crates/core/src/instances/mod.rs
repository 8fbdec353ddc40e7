//! Objectives and stochastic oracles.

mod chain;
mod clip;
mod descriptor;
mod noisy_quadratic;
mod params;
mod psi;
mod quadratic;
mod rotation;
mod smooth_step;

pub use chain::{ChainInstance, FloorVariant, ProgMode, ThreePointOracle, TwoPointOracle};
pub use clip::{ClipOracle, ClipParams, ClippedChain};
pub use descriptor::{ClipSpec, InstanceDescriptor, InstanceKind, RotationSpec};
pub use noisy_quadratic::{NoisyQuadratic, DEFAULT_DIM as NOISY_QUADRATIC_DIM};
pub use params::{
    choose_beta_for_regularity, choose_chain_parameters, choose_quadratic_parameters,
    min_p_for_variance, progress_budget, required_dimension, Regularity,
};
pub use psi::{psi_eval, Psi, PsiValues};
pub use quadratic::QuadraticPair;
pub use rotation::{haar_frame, rotate, RotatedInstance, RotatedOracle};
pub use smooth_step::{smooth_step, smooth_step_d1, smooth_step_d2};

use crate::error::Result;
use crate::point::Point;
use crate::rng::RngKey;
use crate::types::OracleDraw;
use std::sync::Arc;

/// A deterministic differentiable objective.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value_grad(&self, x: &[f64]) -> Result<(f64, Point)>;

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value_grad(x)?.0)
    }

    fn gradient(&self, x: &[f64]) -> Result<Point> {
        Ok(self.value_grad(x)?.1)
    }

    /// Coordinates in which chain progress is read off. Rotated instances
    /// map back to the base frame; everything else is the identity.
    fn progress_coords(&self, x: &[f64]) -> Point {
        Point::from(x.to_vec())
    }
}

/// A randomized first-order (optionally zeroth-order) oracle. All randomness
/// comes from the key, so a draw is a pure function of `(x, key)`.
pub trait StochasticOracle: Send + Sync {
    fn dim(&self) -> usize;

    fn draw(&self, x: &[f64], key: RngKey) -> Result<OracleDraw>;

    /// Declared bound on `E||g - grad F||^2`, if one is known.
    fn variance_bound(&self) -> Option<f64> {
        None
    }
}

/// An objective paired with its oracle and known optimum.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub objective: Arc<dyn Objective>,
    pub oracle: Arc<dyn StochasticOracle>,
    pub f_star: f64,
    /// Threshold used when reporting query progress.
    pub alpha: f64,
    /// The underlying chain, for chain-based instances.
    pub chain: Option<ChainInstance>,
}

impl Problem {
    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn subopt(&self, x: &[f64]) -> Result<f64> {
        Ok(self.objective.value(x)? - self.f_star)
    }

    pub fn prog(&self, x: &[f64]) -> usize {
        crate::progress::prog(&self.objective.progress_coords(x), self.alpha)
    }
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("f_star", &self.f_star)
            .field("alpha", &self.alpha)
            .finish()
    }
}
