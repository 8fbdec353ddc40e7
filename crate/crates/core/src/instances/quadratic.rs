//! The one-dimensional pair `F_+/-(x) = (a/2) x^2 +/- b x` with a Gaussian
//! gradient oracle; telling the two apart is a pure estimation problem.

use super::{Objective, StochasticOracle};
use crate::error::{check_dim, invalid, Result};
use crate::point::Point;
use crate::rng::{derive_stream, RngKey};
use crate::types::{OracleDraw, Outcome};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPair {
    pub a_coef: f64,
    pub b_coef: f64,
    pub sigma: f64,
    /// `+1` for `F_+`, `-1` for `F_-`.
    pub sign: i8,
}

impl QuadraticPair {
    pub fn new(a_coef: f64, b_coef: f64, sigma: f64, sign: i8) -> Result<Self> {
        if !(a_coef > 0.0 && a_coef.is_finite()) {
            return invalid("curvature a must be finite and > 0");
        }
        if !(b_coef.is_finite() && sigma >= 0.0 && sigma.is_finite()) {
            return invalid("b must be finite and sigma finite and >= 0");
        }
        if sign != 1 && sign != -1 {
            return invalid("sign must be +1 or -1");
        }
        Ok(QuadraticPair {
            a_coef,
            b_coef,
            sigma,
            sign,
        })
    }

    fn tilt(&self) -> f64 {
        f64::from(self.sign) * self.b_coef
    }

    pub fn value(&self, x: f64) -> f64 {
        0.5 * self.a_coef * x * x + self.tilt() * x
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.a_coef * x + self.tilt()
    }

    pub fn minimizer(&self) -> f64 {
        -self.tilt() / self.a_coef
    }

    pub fn f_star(&self) -> f64 {
        -self.b_coef * self.b_coef / (2.0 * self.a_coef)
    }

    /// `(F(x), F'(x) + noise)`.
    pub fn eval(&self, x: f64, key: RngKey) -> (f64, f64) {
        let noise = if self.sigma > 0.0 {
            self.sigma * derive_stream(key).gaussian()
        } else {
            0.0
        };
        (self.value(x), self.derivative(x) + noise)
    }
}

impl Objective for QuadraticPair {
    fn dim(&self) -> usize {
        1
    }

    fn value_grad(&self, x: &[f64]) -> Result<(f64, Point)> {
        check_dim(1, x.len())?;
        Ok((self.value(x[0]), Point::from(vec![self.derivative(x[0])])))
    }
}

impl StochasticOracle for QuadraticPair {
    fn dim(&self) -> usize {
        1
    }

    fn draw(&self, x: &[f64], key: RngKey) -> Result<OracleDraw> {
        check_dim(1, x.len())?;
        let (_, g) = self.eval(x[0], key);
        Ok(OracleDraw {
            z: Outcome::Noise,
            value: None,
            gradient: Point::from(vec![g]),
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
    fn unit_pair() {
        let plus = QuadraticPair::new(1.0, 1.0, 0.0, 1).unwrap();
        let minus = QuadraticPair::new(1.0, 1.0, 0.0, -1).unwrap();
        assert_eq!(plus.minimizer(), -1.0);
        assert_eq!(minus.minimizer(), 1.0);
        assert_eq!(plus.value(-1.0), -0.5);
        assert_eq!(minus.value(1.0), -0.5);
        assert_eq!(plus.f_star(), -0.5);
    }

    #[test]
    fn wrong_side_gap() {
        let q = QuadraticPair::new(0.3, 0.7, 1.0, -1).unwrap();
        let gap = q.b_coef * q.b_coef / (2.0 * q.a_coef);
        for i in 0..100 {
            let x = -(i as f64) * 0.1;
            assert!(q.value(x) - q.f_star() >= gap * (1.0 - 1e-12));
        }
    }

    #[test]
    fn noiseless_is_exact() {
        let q = QuadraticPair::new(2.0, 0.5, 0.0, 1).unwrap();
        for s in 0..10 {
            assert_eq!(q.eval(0.3, RngKey::new(s, 0, 0, 0)).1, q.derivative(0.3));
        }
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(QuadraticPair::new(0.0, 1.0, 1.0, 1).is_err());
        assert!(QuadraticPair::new(1.0, 1.0, 1.0, 0).is_err());
    }
}
