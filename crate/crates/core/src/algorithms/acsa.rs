//! Accelerated stochastic approximation with coupled iterates `(y, x)`:
//! query at `y/beta_t + (1 - 1/beta_t) x`, then
//! `y <- y - gamma_t g`, `x <- y/beta_t + (1 - 1/beta_t) x`.

use crate::error::{check_dim, invalid, Result};
use crate::point::Point;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcsaSchedule {
    pub h_eff: f64,
    /// Slope of the noise-limited stepsize; infinite when noiseless.
    pub noise_cap: f64,
    pub horizon: usize,
}

/// `beta_t = (t+1)/2` (inverse clamped to 1) and
/// `gamma_t = min{(t+1)/(4H), noise_cap (t+1)}` with
/// `noise_cap = B / (sigma (T+1)^{3/2})`.
pub fn default_schedule(h: f64, b: f64, sigma: f64, horizon: usize) -> Result<AcsaSchedule> {
    if !(h > 0.0 && h.is_finite()) {
        return invalid("H must be finite and > 0");
    }
    if horizon == 0 {
        return invalid("horizon T must be >= 1");
    }
    if !(b > 0.0 && b.is_finite() && sigma >= 0.0 && sigma.is_finite()) {
        return invalid("B must be > 0 and sigma >= 0");
    }
    let noise_cap = if sigma == 0.0 {
        f64::INFINITY
    } else {
        b / (sigma * ((horizon + 1) as f64).powf(1.5))
    };
    Ok(AcsaSchedule {
        h_eff: h,
        noise_cap,
        horizon,
    })
}

impl AcsaSchedule {
    pub fn beta_inv(&self, t: usize) -> f64 {
        (2.0 / (t as f64 + 1.0)).min(1.0)
    }

    pub fn gamma(&self, t: usize) -> f64 {
        let s = t as f64 + 1.0;
        (s / (4.0 * self.h_eff)).min(self.noise_cap * s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcsaState {
    pub y: Point,
    pub x: Point,
    pub t: usize,
    pub schedule: AcsaSchedule,
}

impl AcsaState {
    /// Both iterates at the origin.
    pub fn new(dim: usize, schedule: AcsaSchedule) -> Self {
        AcsaState {
            y: Point::zeros(dim),
            x: Point::zeros(dim),
            t: 0,
            schedule,
        }
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// Where the next gradient must be evaluated.
    pub fn query(&self) -> Point {
        let b = self.schedule.beta_inv(self.t);
        Point::lincomb(b, &self.y, 1.0 - b, &self.x)
    }

    pub fn step(&mut self, g: &[f64]) -> Result<()> {
        check_dim(self.dim(), g.len())?;
        let b = self.schedule.beta_inv(self.t);
        let gamma = self.schedule.gamma(self.t);
        for (yi, gi) in self.y.iter_mut().zip(g) {
            *yi -= gamma * gi;
        }
        for (xi, yi) in self.x.iter_mut().zip(self.y.iter()) {
            *xi = b * yi + (1.0 - b) * *xi;
        }
        self.t += 1;
        Ok(())
    }
}

/// Pure form of [`AcsaState::step`].
pub fn acsa_step(state: &AcsaState, g: &[f64]) -> Result<AcsaState> {
    let mut next = state.clone();
    next.step(g)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_error(a: f64, target: f64, horizon: usize) -> f64 {
        let s = default_schedule(1.0, target.abs(), 0.0, horizon).unwrap();
        let mut st = AcsaState::new(1, s);
        for _ in 0..horizon {
            let q = st.query();
            st.step(&[a * (q[0] - target)]).unwrap();
        }
        0.5 * a * (st.x[0] - target).powi(2)
    }

    #[test]
    fn first_step_is_plain_gradient_step() {
        let s = default_schedule(2.0, 1.0, 0.0, 10).unwrap();
        let mut st = AcsaState::new(2, s);
        st.y = Point::from(vec![1.0, -1.0]);
        st.x = Point::from(vec![5.0, 5.0]);
        assert_eq!(st.query(), st.y);
        let g = [0.5, 0.25];
        let next = acsa_step(&st, &g).unwrap();
        let expect = Point::from(vec![1.0 - 0.125 * 0.5, -1.0 - 0.125 * 0.25]);
        assert_eq!(next.y, expect);
        assert_eq!(next.x, expect);
        assert_eq!(next.t, 1);
    }

    #[test]
    fn zero_gradient_only_mixes() {
        let s = default_schedule(1.0, 1.0, 0.0, 10).unwrap();
        let mut st = AcsaState::new(1, s);
        st.t = 3;
        st.y = Point::from(vec![2.0]);
        st.x = Point::from(vec![-1.0]);
        let next = acsa_step(&st, &[0.0]).unwrap();
        assert_eq!(next.y, st.y);
        let b = 0.5;
        assert_eq!(next.x[0], b * 2.0 - (1.0 - b));
        assert!(acsa_step(&st, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn schedule_shape() {
        let s = default_schedule(4.0, 1.0, 0.0, 100).unwrap();
        assert_eq!(s.noise_cap, f64::INFINITY);
        assert_eq!(s.gamma(3), 4.0 / 16.0);
        assert_eq!(s.beta_inv(0), 1.0);
        assert_eq!(s.beta_inv(3), 0.5);
        let n = default_schedule(1.0, 1.0, 1.0, 99).unwrap();
        assert!((n.noise_cap - 1e-3).abs() < 1e-15);
        assert!(default_schedule(0.0, 1.0, 1.0, 5).is_err());
        assert!(default_schedule(1.0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn noiseless_rate_is_quadratic() {
        // Ill-conditioned enough that the 1/T^2 regime is visible.
        let ratio = quadratic_error(1e-3, 1.0, 256) / quadratic_error(1e-3, 1.0, 128);
        assert!(ratio <= 0.35, "{ratio}");
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            quadratic_error(0.01, 2.0, 77).to_bits(),
            quadratic_error(0.01, 2.0, 77).to_bits()
        );
    }
}
