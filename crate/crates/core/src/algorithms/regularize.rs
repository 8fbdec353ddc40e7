//! Strongly convex reduction `G(x) = F(x) + (lambda/2) ||x||^2`.

use crate::error::{invalid, Result};
use crate::instances::{Objective, StochasticOracle};
use crate::point::Point;
use crate::rng::RngKey;
use crate::types::{OracleDraw, ProblemParams};
use std::sync::Arc;

#[derive(Clone)]
pub struct Regularized<T: ?Sized> {
    pub inner: Arc<T>,
    pub lambda: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        invalid(format!("lambda must be finite and >= 0, got {lambda}"))
    }
}

pub fn sc_reduction<T: ?Sized>(inner: Arc<T>, lambda: f64) -> Result<Regularized<T>> {
    check_lambda(lambda)?;
    Ok(Regularized { inner, lambda })
}

impl<T: Objective + ?Sized> Objective for Regularized<T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value_grad(&self, x: &[f64]) -> Result<(f64, Point)> {
        let (v, mut g) = self.inner.value_grad(x)?;
        if self.lambda == 0.0 {
            return Ok((v, g));
        }
        let mut sq = 0.0;
        for (gi, xi) in g.iter_mut().zip(x) {
            *gi += self.lambda * xi;
            sq += xi * xi;
        }
        Ok((v + 0.5 * self.lambda * sq, g))
    }

    fn progress_coords(&self, x: &[f64]) -> Point {
        self.inner.progress_coords(x)
    }
}

impl<T: StochasticOracle + ?Sized> StochasticOracle for Regularized<T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn draw(&self, x: &[f64], key: RngKey) -> Result<OracleDraw> {
        let mut d = self.inner.draw(x, key)?;
        if self.lambda != 0.0 {
            for (gi, xi) in d.gradient.iter_mut().zip(x) {
                *gi += self.lambda * xi;
            }
            if let Some(v) = d.value.as_mut() {
                *v += 0.5 * self.lambda * x.iter().map(|a| a * a).sum::<f64>();
            }
        }
        Ok(d)
    }

    fn variance_bound(&self) -> Option<f64> {
        self.inner.variance_bound()
    }
}

/// `max{H/(KR)^2, sigma/(B sqrt(MKR)), H/(R ln M)^2, sigma/(B sqrt(KR))}`.
pub fn choose_lambda(pp: &ProblemParams) -> Result<f64> {
    pp.require_multi_machine()?;
    let (h, b, s) = (pp.smoothness, pp.radius, pp.sigma);
    let (m, k, r) = (pp.machines as f64, pp.local_steps as f64, pp.rounds as f64);
    let lnm = m.ln();
    Ok((h / (k * k * r * r))
        .max(s / (b * (m * k * r).sqrt()))
        .max(h / (r * r * lnm * lnm))
        .max(s / (b * (k * r).sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::NoisyQuadratic;

    #[test]
    fn lambda_example() {
        let pp = ProblemParams::new(1.0, 1.0, 1.0, 4, 16, 4).unwrap();
        assert_eq!(choose_lambda(&pp).unwrap(), 0.125);
        let single = ProblemParams::new(1.0, 1.0, 1.0, 1, 16, 4).unwrap();
        assert!(choose_lambda(&single).is_err());
    }

    #[test]
    fn wrapper_adds_lambda_x() {
        let q = Arc::new(NoisyQuadratic::new(1.0, 1.0, 0.0, 4, 0.1).unwrap());
        let x = [0.5, -1.0, 2.0, 0.0];
        let id = sc_reduction(q.clone(), 0.0).unwrap();
        assert_eq!(id.value_grad(&x).unwrap(), q.value_grad(&x).unwrap());
        let r = sc_reduction(q.clone(), 0.3).unwrap();
        let (gv, gg) = r.value_grad(&x).unwrap();
        let (fv, fg) = q.value_grad(&x).unwrap();
        for i in 0..4 {
            assert!((gg[i] - fg[i] - 0.3 * x[i]).abs() < 1e-15);
        }
        assert!((gv - fv - 0.15 * 5.25).abs() < 1e-15);
        assert!(sc_reduction(q, -1.0).is_err());
    }
}
