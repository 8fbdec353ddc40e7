//! Serializable instance descriptions, resolved against a problem budget.

use super::chain::ChainInstance;
use super::clip::{ClipOracle, ClipParams, ClippedChain};
use super::noisy_quadratic::{NoisyQuadratic, DEFAULT_DIM, DEFAULT_MIN_RATIO};
use super::params::{choose_chain_parameters, choose_quadratic_parameters, min_p_for_variance};
use super::quadratic::QuadraticPair;
use super::rotation::rotate;
use super::{Objective, Problem, StochasticOracle, ThreePointOracle, TwoPointOracle};
use crate::error::{invalid, Result};
use crate::rng::RngKey;
use crate::types::ProblemParams;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// Arctan chain with the three-outcome oracle.
    Chain,
    /// Arctan chain with the two-outcome oracle.
    ChainTwoPoint,
    /// Clipped arctan chain driven by the three-outcome oracle.
    ClippedChain,
    QuadraticPlus,
    QuadraticMinus,
    NoisyQuadratic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClipSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationSpec {
    #[serde(rename = "D")]
    pub ambient: usize,
    pub seed: u64,
}

/// Every field except `kind` may be omitted; missing values are filled in
/// from the problem parameters by [`InstanceDescriptor::resolve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDescriptor {
    pub kind: InstanceKind,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip: Option<ClipSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<RotationSpec>,
}

impl InstanceDescriptor {
    pub fn of_kind(kind: InstanceKind) -> Self {
        InstanceDescriptor {
            kind,
            h: None,
            b: None,
            sigma: None,
            beta: None,
            zeta: None,
            n: None,
            alpha: None,
            p: None,
            delta: None,
            clip: None,
            rotation: None,
        }
    }

    pub fn from_chain(kind: InstanceKind, chain: &ChainInstance, b: f64, sigma: f64) -> Self {
        InstanceDescriptor {
            h: Some(chain.h),
            b: Some(b),
            sigma: Some(sigma),
            beta: Some(chain.beta),
            zeta: Some(chain.zeta),
            n: Some(chain.n),
            alpha: Some(chain.alpha),
            p: Some(chain.p),
            delta: Some(chain.delta),
            ..Self::of_kind(kind)
        }
    }

    fn is_chain(&self) -> bool {
        matches!(
            self.kind,
            InstanceKind::Chain | InstanceKind::ChainTwoPoint | InstanceKind::ClippedChain
        )
    }

    /// Problem parameters with any `H`, `B`, `sigma` overrides applied.
    pub fn effective_params(&self, pp: &ProblemParams) -> Result<ProblemParams> {
        let mut q = *pp;
        if let Some(h) = self.h {
            q.smoothness = h;
        }
        if let Some(b) = self.b {
            q.radius = b;
        }
        if let Some(s) = self.sigma {
            q.sigma = s;
        }
        q.validate()?;
        Ok(q)
    }

    /// Fill every missing field, returning a descriptor that pins the
    /// instance completely.
    pub fn resolve(&self, pp: &ProblemParams) -> Result<InstanceDescriptor> {
        let q = self.effective_params(pp)?;
        let mut d = self.clone();
        d.h = Some(q.smoothness);
        d.b = Some(q.radius);
        d.sigma = Some(q.sigma);
        if self.rotation.is_some() && !self.is_chain() {
            return invalid("rotation applies to chain instances only");
        }
        if self.clip.is_some() && self.kind != InstanceKind::ClippedChain {
            return invalid("clip settings apply to clipped_chain only");
        }
        match self.kind {
            InstanceKind::Chain | InstanceKind::ChainTwoPoint | InstanceKind::ClippedChain => {
                let needs_default = [self.beta, self.zeta, self.alpha, self.p, self.delta]
                    .iter()
                    .any(Option::is_none)
                    || self.n.is_none();
                if needs_default {
                    let base = choose_chain_parameters(&q)?;
                    d.n = Some(self.n.unwrap_or(base.n));
                    let nf = d.n.unwrap_or(base.n) as f64;
                    d.beta = Some(
                        self.beta
                            .unwrap_or(2.0 * nf.powf(1.5) / (q.smoothness.sqrt() * q.radius)),
                    );
                    d.zeta = Some(self.zeta.unwrap_or(q.radius / nf.powf(1.5)));
                    if self.kind == InstanceKind::ChainTwoPoint {
                        let beta = d.beta.unwrap_or(base.beta);
                        let floor = min_p_for_variance(q.smoothness, beta, q.sigma);
                        let p = floor.max(2.0 / q.local_steps as f64).min(1.0);
                        d.p = Some(self.p.unwrap_or(p));
                        d.alpha = Some(self.alpha.unwrap_or(0.0));
                        d.delta = Some(self.delta.unwrap_or(0.0));
                    } else {
                        d.p = Some(self.p.unwrap_or(base.p));
                        d.alpha = Some(self.alpha.unwrap_or(base.alpha));
                        d.delta = Some(self.delta.unwrap_or(base.delta));
                    }
                }
                let chain = d.chain()?.expect("chain kind");
                if self.kind == InstanceKind::ClippedChain {
                    let spec = self.clip.unwrap_or_default();
                    let rho = spec
                        .rho
                        .unwrap_or_else(|| chain.value_variance_bound().sqrt());
                    let cp = ClipParams::new(q.radius, q.sigma, rho)?;
                    d.clip = Some(ClipSpec {
                        a: Some(spec.a.unwrap_or(cp.a)),
                        b: Some(spec.b.unwrap_or(cp.b)),
                        rho: Some(rho),
                    });
                }
            }
            InstanceKind::QuadraticPlus | InstanceKind::QuadraticMinus => {
                if self.n.is_some_and(|n| n != 1) {
                    return invalid("the quadratic pair is one-dimensional");
                }
                d.n = Some(1);
            }
            InstanceKind::NoisyQuadratic => {
                d.n = Some(self.n.unwrap_or(DEFAULT_DIM));
            }
        }
        Ok(d)
    }

    /// The chain encoded by a resolved descriptor.
    pub fn chain(&self) -> Result<Option<ChainInstance>> {
        if !self.is_chain() {
            return Ok(None);
        }
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| {
                crate::error::Error::InvalidParameter(format!("descriptor is missing {name}"))
            })
        };
        let n = self.n.ok_or_else(|| {
            crate::error::Error::InvalidParameter("descriptor is missing N".into())
        })?;
        ChainInstance::new(
            need(self.h, "H")?,
            need(self.beta, "beta")?,
            need(self.zeta, "zeta")?,
            n,
            need(self.alpha, "alpha")?,
            need(self.p, "p")?,
            need(self.delta, "delta")?,
        )
        .map(Some)
    }

    /// Resolve and construct the objective/oracle pair.
    pub fn build(&self, pp: &ProblemParams) -> Result<Problem> {
        let d = self.resolve(pp)?;
        let q = d.effective_params(pp)?;
        let name = serde_json::to_value(d.kind)?
            .as_str()
            .unwrap_or("instance")
            .to_string();
        let chain = d.chain()?;
        let (objective, oracle, f_star, alpha): (
            Arc<dyn Objective>,
            Arc<dyn StochasticOracle>,
            f64,
            f64,
        ) = match d.kind {
            InstanceKind::Chain => {
                let c = Arc::new(chain.expect("chain kind"));
                (
                    c.clone(),
                    Arc::new(ThreePointOracle(c.clone())),
                    c.f_star(),
                    c.alpha,
                )
            }
            InstanceKind::ChainTwoPoint => {
                let c = Arc::new(chain.expect("chain kind"));
                (
                    c.clone(),
                    Arc::new(TwoPointOracle(c.clone())),
                    c.f_star(),
                    0.0,
                )
            }
            InstanceKind::ClippedChain => {
                let c = chain.expect("chain kind");
                let spec = d.clip.unwrap_or_default();
                let rho = spec.rho.unwrap_or(0.0);
                let mut cp = ClipParams::new(q.radius, q.sigma, rho)?;
                if let Some(a) = spec.a {
                    if !(a > 0.0 && a.is_finite()) {
                        return invalid("clip a must be finite and > 0");
                    }
                    cp.a = a;
                    cp.gamma_bound = cp.b + 1.0 / a;
                }
                let cc = Arc::new(ClippedChain::new(c, cp, q.radius)?);
                (cc.clone(), Arc::new(ClipOracle(cc)), 0.0, c.alpha)
            }
            InstanceKind::QuadraticPlus | InstanceKind::QuadraticMinus => {
                let (a, b) =
                    choose_quadratic_parameters(q.smoothness, q.radius, q.sigma, q.horizon())?;
                let sign = if d.kind == InstanceKind::QuadraticPlus {
                    1
                } else {
                    -1
                };
                let qp = Arc::new(QuadraticPair::new(a, b, q.sigma, sign)?);
                (qp.clone(), qp.clone(), qp.f_star(), 0.0)
            }
            InstanceKind::NoisyQuadratic => {
                let nq = Arc::new(NoisyQuadratic::new(
                    q.smoothness,
                    q.radius,
                    q.sigma,
                    d.n.unwrap_or(DEFAULT_DIM),
                    DEFAULT_MIN_RATIO,
                )?);
                (nq.clone(), nq, 0.0, 0.0)
            }
        };

        if let (Some(rot), Some(c)) = (d.rotation, chain) {
            let r = Arc::new(rotate(&c, rot.ambient, RngKey::new(rot.seed, 0, 0, 0))?);
            let wrapped = Arc::new(r.wrap(oracle));
            return Ok(Problem {
                name,
                objective: r,
                oracle: wrapped,
                f_star,
                alpha,
                chain,
            });
        }
        Ok(Problem {
            name,
            objective,
            oracle,
            f_star,
            alpha,
            chain,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp() -> ProblemParams {
        ProblemParams::new(1.0, 1.0, 1.0, 2, 4, 2).unwrap()
    }

    #[test]
    fn chain_defaults_follow_budget() {
        let d = InstanceDescriptor::of_kind(InstanceKind::Chain)
            .resolve(&pp())
            .unwrap();
        let c = choose_chain_parameters(&pp()).unwrap();
        assert_eq!(d.chain().unwrap().unwrap(), c);
    }

    #[test]
    fn json_field_names() {
        let mut d = InstanceDescriptor::of_kind(InstanceKind::ClippedChain)
            .resolve(&pp())
            .unwrap();
        d.rotation = Some(RotationSpec {
            ambient: 40,
            seed: 3,
        });
        let v = serde_json::to_value(&d).unwrap();
        for key in [
            "kind", "H", "B", "sigma", "beta", "zeta", "N", "alpha", "p", "delta", "clip",
            "rotation",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        for key in ["a", "b", "rho"] {
            assert!(v["clip"].get(key).is_some(), "missing clip.{key}");
        }
        assert!(v["rotation"].get("D").is_some());
        let back: InstanceDescriptor = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn every_kind_builds() {
        for kind in [
            InstanceKind::Chain,
            InstanceKind::ChainTwoPoint,
            InstanceKind::ClippedChain,
            InstanceKind::QuadraticPlus,
            InstanceKind::QuadraticMinus,
            InstanceKind::NoisyQuadratic,
        ] {
            let p = InstanceDescriptor::of_kind(kind).build(&pp()).unwrap();
            let x = vec![0.0; p.dim()];
            let d = p.oracle.draw(&x, RngKey::default()).unwrap();
            assert_eq!(d.gradient.dim(), p.dim());
            assert!(p.subopt(&x).unwrap() >= 0.0);
        }
    }

    #[test]
    fn rotated_chain_builds() {
        let mut d = InstanceDescriptor::of_kind(InstanceKind::ChainTwoPoint);
        d.rotation = Some(RotationSpec {
            ambient: 50,
            seed: 1,
        });
        let p = d.build(&pp()).unwrap();
        assert_eq!(p.dim(), 50);
        assert!(p.subopt(&vec![0.0; 50]).unwrap() > 0.0);
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: std::result::Result<InstanceDescriptor, _> =
            serde_json::from_str(r#"{"kind": "chain", "bogus": 1}"#);
        assert!(r.is_err());
        let mut d = InstanceDescriptor::of_kind(InstanceKind::NoisyQuadratic);
        d.rotation = Some(RotationSpec {
            ambient: 80,
            seed: 0,
        });
        assert!(d.build(&pp()).is_err());
    }
}
