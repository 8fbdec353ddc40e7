//! Shared domain records.

use crate::error::{invalid, Result};
use crate::point::Point;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Problem class and communication budget: smoothness `H`, solution radius
/// `B`, oracle noise `sigma`, and `M` machines making `K` sequential queries
/// in each of `R` rounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    #[serde(rename = "H")]
    pub smoothness: f64,
    #[serde(rename = "B")]
    pub radius: f64,
    pub sigma: f64,
    #[serde(rename = "M")]
    pub machines: usize,
    #[serde(rename = "K")]
    pub local_steps: usize,
    #[serde(rename = "R")]
    pub rounds: usize,
}

impl ProblemParams {
    pub fn new(
        smoothness: f64,
        radius: f64,
        sigma: f64,
        machines: usize,
        local_steps: usize,
        rounds: usize,
    ) -> Result<Self> {
        let pp = ProblemParams {
            smoothness,
            radius,
            sigma,
            machines,
            local_steps,
            rounds,
        };
        pp.validate()?;
        Ok(pp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.smoothness.is_finite() && self.smoothness > 0.0) {
            return invalid(format!("H must be finite and > 0, got {}", self.smoothness));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return invalid(format!("B must be finite and > 0, got {}", self.radius));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return invalid(format!("sigma must be finite and >= 0, got {}", self.sigma));
        }
        if self.machines == 0 || self.local_steps == 0 || self.rounds == 0 {
            return invalid("M, K and R must all be at least 1");
        }
        Ok(())
    }

    /// Formulas involving `log M` need at least two machines.
    pub fn require_multi_machine(&self) -> Result<()> {
        self.validate()?;
        if self.machines < 2 {
            return invalid(format!(
                "this formula requires M >= 2, got {}",
                self.machines
            ));
        }
        Ok(())
    }

    /// Sequential horizon `T = KR`.
    pub fn horizon(&self) -> usize {
        self.local_steps * self.rounds
    }
}

/// Oracle outcome category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Z0,
    Z1,
    Z2,
    Noise,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Outcome::Z0 => "Z0",
            Outcome::Z1 => "Z1",
            Outcome::Z2 => "Z2",
            Outcome::Noise => "Noise",
        };
        f.write_str(s)
    }
}

/// One stochastic oracle response.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleDraw {
    pub z: Outcome,
    pub value: Option<f64>,
    pub gradient: Point,
}

/// Per-query audit record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub machine: usize,
    pub round: usize,
    pub k: usize,
    pub query: Point,
    /// Gradient returned for this query; kept so supports can be audited.
    pub gradient: Point,
    pub prog: usize,
    pub z: Option<Outcome>,
    pub s_budget: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// `F(x_hat_r) - F*` after each round.
    pub per_round_subopt: Vec<f64>,
    /// Largest query progress seen up to and including each round.
    pub per_round_max_prog: Vec<usize>,
    #[serde(rename = "final")]
    pub final_point: Point,
    pub max_prog: usize,
    pub max_s_budget: usize,
    pub queries: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<crate::simulator::AuditReport>,
}

impl RunResult {
    pub fn final_subopt(&self) -> f64 {
        self.per_round_subopt.last().copied().unwrap_or(f64::NAN)
    }
}
