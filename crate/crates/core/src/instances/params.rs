//! Closed-form parameter selections for the hard instances.

use super::chain::ChainInstance;
use crate::error::{invalid, Result};
use crate::types::ProblemParams;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Chain parameters for a communication budget:
///
/// ```text
/// p     = min{1, sqrt(HB) / (sqrt(sigma) (KR)^{3/4})}
/// delta = 1 / (16 MKR)
/// N     = max(2, floor(min{2KR, 16KRp + 24R(1 + ln M)}))
/// beta  = 2 N^{3/2} / (sqrt(H) B),  zeta = B / N^{3/2}
/// alpha = min{N/(12 beta sqrt(H)), sqrt(H) beta B^2/(64 N^2), sigma sqrt(p delta)/(5 H sqrt(N))}
/// ```
pub fn choose_chain_parameters(pp: &ProblemParams) -> Result<ChainInstance> {
    pp.require_multi_machine()?;
    let (h, b, sigma) = (pp.smoothness, pp.radius, pp.sigma);
    let (m, k, r) = (pp.machines as f64, pp.local_steps as f64, pp.rounds as f64);

    let p = if sigma == 0.0 {
        1.0
    } else {
        (h * b).sqrt() / (sigma.sqrt() * (k * r).powf(0.75))
    }
    .min(1.0);
    let delta = 1.0 / (16.0 * m * k * r);
    let n_real = (2.0 * k * r).min(16.0 * k * r * p + 24.0 * r * (1.0 + m.ln()));
    let n = (n_real.floor() as usize).max(2);
    let nf = n as f64;
    let beta = 2.0 * nf.powf(1.5) / (h.sqrt() * b);
    let zeta = b / nf.powf(1.5);
    let alpha = (nf / (12.0 * beta * h.sqrt()))
        .min(h.sqrt() * beta * b * b / (64.0 * nf * nf))
        .min(sigma * (p * delta).sqrt() / (5.0 * h * nf.sqrt()));
    ChainInstance::new(h, beta, zeta, n, alpha, p, delta)
}

/// Higher-order regularity targeted by the choice of `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    HessianLipschitz,
    SelfConcordant,
    QuasiSelfConcordant,
}

pub fn choose_beta_for_regularity(h: f64, q: f64, kind: Regularity) -> Result<f64> {
    if !(h > 0.0 && q > 0.0 && h.is_finite() && q.is_finite()) {
        return invalid("H and Q must be finite and > 0");
    }
    Ok(match kind {
        Regularity::HessianLipschitz => 3.0 * q / (4.0 * h.powf(1.5)),
        Regularity::SelfConcordant => q,
        Regularity::QuasiSelfConcordant => 2.0 * q / h.sqrt(),
    })
}

/// Curvature and tilt `(a, b)` of the one-dimensional statistical pair.
pub fn choose_quadratic_parameters(h: f64, b: f64, sigma: f64, t: usize) -> Result<(f64, f64)> {
    if !(h > 0.0 && b > 0.0 && h.is_finite() && b.is_finite()) {
        return invalid("H and B must be finite and > 0");
    }
    if t == 0 {
        return invalid("T must be >= 1");
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return invalid("the quadratic pair needs sigma > 0");
    }
    let rt = (t as f64).sqrt();
    let a = h.min(3.0 * sigma / (4.0 * b * rt));
    let bb = (a * b).min(3.0 * sigma / (4.0 * rt));
    Ok((a, bb))
}

/// Ambient dimension under which the random rotation hides the chain.
/// Saturates at `u64::MAX`.
pub fn required_dimension(pp: &ProblemParams) -> Result<u64> {
    pp.require_multi_machine()?;
    if pp.sigma == 0.0 {
        return invalid("required dimension is undefined for sigma = 0");
    }
    let (h, b, s) = (pp.smoothness, pp.radius, pp.sigma);
    let (m, k, r) = (pp.machines as f64, pp.local_steps as f64, pp.rounds as f64);
    let kr = k * r;
    let inner = 1e9 * (1.0 + kr + (h * b / s).powf(1.5) * m * kr.powf(1.25))
        + 6144.0 * h * h * b * b * m * kr / (s * s);
    Ok((2.0 * kr + inner * (64.0 * m * k * k * r * r).ln()).ceil() as u64)
}

/// `ceil(min{KR, 8KRp + 12R ln M + 12R})`: the progress any zero-respecting
/// algorithm can reach with constant probability.
pub fn progress_budget(pp: &ProblemParams, p: f64) -> Result<usize> {
    pp.require_multi_machine()?;
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("p must lie in [0, 1], got {p}"));
    }
    let (m, k, r) = (pp.machines as f64, pp.local_steps as f64, pp.rounds as f64);
    let v = (k * r).min(8.0 * k * r * p + 12.0 * r * m.ln() + 12.0 * r);
    Ok(v.ceil() as usize)
}

/// Smallest advance probability keeping the two-outcome oracle's variance
/// below `sigma^2`.
pub fn min_p_for_variance(h: f64, beta: f64, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return 1.0;
    }
    PI * PI * h / (PI * PI * h + 8.0 * sigma * sigma * beta * beta)
}
