//! The arctan-smoothed link function and its first three derivatives.
//!
//! `psi(x) = (sqrt(H) x / 2b) atan(sqrt(H) b x / 2) - log(1 + H b^2 x^2 / 4) / (2 b^2)`
//! is even, convex, `H/4`-smooth and Lipschitz with constant `pi sqrt(H) / (4b)`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiValues {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Psi {
    h: f64,
    beta: f64,
    sqrt_h: f64,
}

impl Psi {
    pub fn new(h: f64, beta: f64) -> Self {
        debug_assert!(h > 0.0 && beta > 0.0);
        Psi {
            h,
            beta,
            sqrt_h: h.sqrt(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let s = self.sqrt_h * self.beta * x / 2.0;
        (self.sqrt_h * x / (2.0 * self.beta)) * s.atan()
            - (s * s).ln_1p() / (2.0 * self.beta * self.beta)
    }

    pub fn d1(&self, x: f64) -> f64 {
        (self.sqrt_h / (2.0 * self.beta)) * (self.sqrt_h * self.beta * x / 2.0).atan()
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.h / (4.0 + self.h * self.beta * self.beta * x * x)
    }

    pub fn d3(&self, x: f64) -> f64 {
        let den = 4.0 + self.h * self.beta * self.beta * x * x;
        -2.0 * self.h * self.h * self.beta * self.beta * x / (den * den)
    }

    /// Supremum of `|psi'|`.
    pub fn lipschitz(&self) -> f64 {
        std::f64::consts::PI * self.sqrt_h / (4.0 * self.beta)
    }

    /// Maximum of `|psi'''|`, attained at `x = 2 / (sqrt(3) sqrt(H) beta)`.
    pub fn max_d3(&self) -> f64 {
        3.0 * 3f64.sqrt() * self.h * self.sqrt_h * self.beta / 64.0
    }

    pub fn argmax_d3(&self) -> f64 {
        2.0 / (3f64.sqrt() * self.sqrt_h * self.beta)
    }
}

pub fn psi_eval(x: f64, h: f64, beta: f64) -> PsiValues {
    let psi = Psi::new(h, beta);
    PsiValues {
        value: psi.value(x),
        d1: psi.d1(x),
        d2: psi.d2(x),
        d3: psi.d3(x),
    }
}
