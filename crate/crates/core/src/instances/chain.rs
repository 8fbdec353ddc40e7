//! The arctan chain
//! `F(x) = -psi'(zeta) x_1 + psi(x_N) + sum_{i<N} psi(x_{i+1} - x_i)`
//! and the two zero-chain oracles built on it.

use super::psi::Psi;
use super::{Objective, StochasticOracle};
use crate::error::{check_dim, invalid, Result};
use crate::point::Point;
use crate::progress::prog;
use crate::rng::{derive_stream, RngKey};
use crate::types::{OracleDraw, Outcome};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainInstance {
    #[serde(rename = "H")]
    pub h: f64,
    pub beta: f64,
    pub zeta: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    pub delta: f64,
}

/// Which progress measure selects the term dropped from `F^-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProgMode {
    AlphaProg,
    ZeroProg,
}

/// The two flavours of low-progress suboptimality floor. `ThreeOutcome` goes with
/// the three-outcome oracle and `prog_alpha`, `TwoOutcome` with the two-outcome
/// oracle and `prog_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FloorVariant {
    #[serde(rename = "three_outcome")]
    ThreeOutcome,
    #[serde(rename = "two_outcome")]
    TwoOutcome,
}

/// A single additive term of `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Term {
    Linear,
    /// `psi(x_{i+1} - x_i)`, 1-based `i` in `1..N`.
    Link(usize),
}

impl ChainInstance {
    pub fn new(
        h: f64,
        beta: f64,
        zeta: f64,
        n: usize,
        alpha: f64,
        p: f64,
        delta: f64,
    ) -> Result<Self> {
        let inst = ChainInstance {
            h,
            beta,
            zeta,
            n,
            alpha,
            p,
            delta,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.h, self.beta, self.zeta, self.alpha, self.p, self.delta]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return invalid("chain parameters must be finite");
        }
        if self.n < 2 {
            return invalid(format!("chain length N must be >= 2, got {}", self.n));
        }
        if self.h <= 0.0 || self.beta <= 0.0 || self.zeta <= 0.0 {
            return invalid("H, beta and zeta must be > 0");
        }
        if self.alpha < 0.0 {
            return invalid("alpha must be >= 0");
        }
        // p = 0 is allowed: the advancing outcome is then never drawn.
        if !(0.0..=1.0).contains(&self.p) {
            return invalid(format!("p must lie in [0, 1], got {}", self.p));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return invalid(format!("delta must lie in [0, 1), got {}", self.delta));
        }
        Ok(())
    }

    pub fn psi(&self) -> Psi {
        Psi::new(self.h, self.beta)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n, x.len())?;
        Ok(self.value_unchecked(x))
    }

    fn value_unchecked(&self, x: &[f64]) -> f64 {
        let psi = self.psi();
        let n = self.n;
        let mut v = -psi.d1(self.zeta) * x[0] + psi.value(x[n - 1]);
        for i in 0..n - 1 {
            v += psi.value(x[i + 1] - x[i]);
        }
        v
    }

    fn gradient_without(&self, x: &[f64], skip: Option<Term>) -> Point {
        let psi = self.psi();
        let n = self.n;
        let mut g = vec![0.0; n];
        if skip != Some(Term::Linear) {
            g[0] = -psi.d1(self.zeta);
        }
        for i in 0..n - 1 {
            if skip == Some(Term::Link(i + 1)) {
                continue;
            }
            let d = psi.d1(x[i + 1] - x[i]);
            g[i + 1] += d;
            g[i] -= d;
        }
        g[n - 1] += psi.d1(x[n - 1]);
        Point::from(g)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Point> {
        check_dim(self.n, x.len())?;
        Ok(self.gradient_without(x, None))
    }

    /// `(F(x), grad F(x))`.
    pub fn eval(&self, x: &[f64]) -> Result<(f64, Point)> {
        check_dim(self.n, x.len())?;
        Ok((self.value_unchecked(x), self.gradient_without(x, None)))
    }

    /// Closed-form minimizer `x*_i = zeta (N - i + 1)` and optimum
    /// `N (psi(zeta) - zeta psi'(zeta))`.
    pub fn solution(&self) -> (Point, f64) {
        let x: Vec<f64> = (1..=self.n)
            .map(|i| self.zeta * (self.n - i + 1) as f64)
            .collect();
        (Point::from(x), self.f_star())
    }

    pub fn f_star(&self) -> f64 {
        let psi = self.psi();
        self.n as f64 * (psi.value(self.zeta) - self.zeta * psi.d1(self.zeta))
    }

    /// `||x*||^2 = zeta^2 (2N^3 + 3N^2 + N) / 6`.
    pub fn solution_norm_sq(&self) -> f64 {
        let n = self.n as f64;
        self.zeta * self.zeta * (2.0 * n * n * n + 3.0 * n * n + n) / 6.0
    }

    fn progress_of(&self, x: &[f64], mode: ProgMode) -> usize {
        match mode {
            ProgMode::AlphaProg => prog(x, self.alpha),
            ProgMode::ZeroProg => prog(x, 0.0),
        }
    }

    /// The term dropped from `F^-` at progress `j`. At `j = 0` there is no
    /// link below the frontier, so the linear term plays the role of the
    /// zeroth link; at `j = N` there is no link above it and nothing is
    /// dropped.
    fn frontier_term(&self, j: usize) -> Option<Term> {
        if j == 0 {
            Some(Term::Linear)
        } else if j < self.n {
            Some(Term::Link(j))
        } else {
            None
        }
    }

    /// Gradient of `F` with the frontier term removed.
    pub fn fminus_gradient(&self, x: &[f64], mode: ProgMode) -> Result<Point> {
        check_dim(self.n, x.len())?;
        let j = self.progress_of(x, mode);
        Ok(self.gradient_without(x, self.frontier_term(j)))
    }

    /// Two-outcome oracle: `grad F^-` with probability `1 - p`, otherwise the
    /// reweighted full gradient. Progress is measured with `prog_0`.
    pub fn two_point(&self, x: &[f64], key: RngKey) -> Result<OracleDraw> {
        check_dim(self.n, x.len())?;
        let advance = derive_stream(key).uniform() < self.p;
        let minus = self.gradient_without(x, self.frontier_term(prog(x, 0.0)));
        if !advance {
            return Ok(OracleDraw {
                z: Outcome::Z0,
                value: None,
                gradient: minus,
            });
        }
        let full = self.gradient_without(x, None);
        let w = (1.0 - self.p) / self.p;
        let g: Vec<f64> = full
            .iter()
            .zip(minus.iter())
            .map(|(f, m)| f + w * (f - m))
            .collect();
        Ok(OracleDraw {
            z: Outcome::Z1,
            value: None,
            gradient: Point::from(g),
        })
    }

    /// Three-outcome zeroth- and first-order oracle built from prefix
    /// truncations at `prog_alpha(x)` and `prog_alpha(x) + 1`.
    pub fn three_point(&self, x: &[f64], key: RngKey) -> Result<OracleDraw> {
        check_dim(self.n, x.len())?;
        let (p, delta) = (self.p, self.delta);
        let weights = [(1.0 - p) * (1.0 - delta), p * (1.0 - delta), delta];
        let z = derive_stream(key).categorical(&weights);
        let j = prog(x, self.alpha);
        let j1 = (j + 1).min(self.n);

        let lower = || {
            let t = truncate(x, j);
            (
                self.value_unchecked(&t),
                truncate(&self.gradient_without(&t, None), j),
            )
        };
        let upper = || {
            let t = truncate(x, j1);
            (
                self.value_unchecked(&t),
                truncate(&self.gradient_without(&t, None), j1),
            )
        };

        let draw = match z {
            0 => {
                let (f0, g0) = lower();
                OracleDraw {
                    z: Outcome::Z0,
                    value: Some(f0),
                    gradient: g0,
                }
            }
            1 => {
                let (_, g0) = lower();
                let (f1, g1) = upper();
                let g = Point::lincomb(1.0 / p, &g1, -(1.0 - p) / p, &g0);
                OracleDraw {
                    z: Outcome::Z1,
                    value: Some(f1),
                    gradient: g,
                }
            }
            _ => {
                let (f0, _) = lower();
                let (f1, g1) = upper();
                let (f, g) = self.eval(x)?;
                let c = (1.0 - delta) / delta;
                let value = f / delta - c * ((1.0 - p) * f0 + p * f1);
                let g = Point::lincomb(1.0 / delta, &g, -c, &g1);
                OracleDraw {
                    z: Outcome::Z2,
                    value: Some(value),
                    gradient: g,
                }
            }
        };
        Ok(draw)
    }

    /// `E||g - grad F||^2 <= (2(1-p)/p) sup psi'^2` for the two-outcome oracle.
    pub fn two_point_variance_bound(&self) -> f64 {
        if self.p >= 1.0 {
            return 0.0;
        }
        let l = self.psi().lipschitz();
        2.0 * (1.0 - self.p) / self.p * l * l
    }

    /// Gradient variance bound of the three-outcome oracle.
    pub fn three_point_variance_bound(&self) -> f64 {
        let (h, n) = (self.h, self.n as f64);
        let (p, delta) = (self.p, self.delta);
        let first = if p >= 1.0 {
            0.0
        } else {
            6.0 * h * (1.0 - p) / (self.beta * self.beta * p)
        };
        let second = if self.alpha == 0.0 {
            0.0
        } else {
            6.0 * n * h * h * self.alpha * self.alpha * (1.0 / p + 1.0 / delta)
        };
        first + second
    }

    /// Value variance bound `rho^2` of the three-outcome oracle.
    pub fn value_variance_bound(&self) -> f64 {
        if self.alpha == 0.0 {
            return 0.0;
        }
        let (h, n, a2) = (self.h, self.n as f64, self.alpha * self.alpha);
        12.0 * h * a2 / (self.beta * self.beta * self.delta)
            + 3.0 * n * n * h * h * a2 * a2 / self.delta
    }

    /// Guaranteed `F(x) - F*` for any `x` whose progress is at most `N/2`.
    /// The case split is `beta^2 > 4/(H zeta^2)`, which equals
    /// `4N^3/(H B^2)` when `zeta = B / N^{3/2}`.
    pub fn suboptimality_floor(&self, variant: FloorVariant) -> f64 {
        let n = self.n as f64;
        let b2 = self.beta * self.beta;
        let steep = b2 > 4.0 / (self.h * self.zeta * self.zeta);
        // H B^2 / N^2 written in terms of zeta: B^2 = zeta^2 N^3.
        let hb2_n2 = self.h * self.zeta * self.zeta * n;
        match (variant, steep) {
            (FloorVariant::ThreeOutcome, true) => n / (12.0 * b2),
            (FloorVariant::ThreeOutcome, false) => hb2_n2 / 64.0,
            (FloorVariant::TwoOutcome, true) => n / (6.0 * b2),
            (FloorVariant::TwoOutcome, false) => hb2_n2 / 48.0,
        }
    }
}

fn truncate(x: &[f64], len: usize) -> Point {
    let mut v = x.to_vec();
    for a in v.iter_mut().skip(len) {
        *a = 0.0;
    }
    Point::from(v)
}

impl Objective for ChainInstance {
    fn dim(&self) -> usize {
        self.n
    }

    fn value_grad(&self, x: &[f64]) -> Result<(f64, Point)> {
        self.eval(x)
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        ChainInstance::value(self, x)
    }
}

#[derive(Clone, Debug)]
pub struct TwoPointOracle(pub Arc<ChainInstance>);

impl StochasticOracle for TwoPointOracle {
    fn dim(&self) -> usize {
        self.0.n
    }

    fn draw(&self, x: &[f64], key: RngKey) -> Result<OracleDraw> {
        self.0.two_point(x, key)
    }

    fn variance_bound(&self) -> Option<f64> {
        Some(self.0.two_point_variance_bound())
    }
}

#[derive(Clone, Debug)]
pub struct ThreePointOracle(pub Arc<ChainInstance>);

impl StochasticOracle for ThreePointOracle {
    fn dim(&self) -> usize {
        self.0.n
    }

    fn draw(&self, x: &[f64], key: RngKey) -> Result<OracleDraw> {
        self.0.three_point(x, key)
    }

    fn variance_bound(&self) -> Option<f64> {
        Some(self.0.three_point_variance_bound())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::progress::prog;
    use crate::rng::derive_stream;
    use proptest::prelude::*;

    fn inst(n: usize, p: f64) -> ChainInstance {
        let (h, b) = (1.0, 1.0);
        let nf = n as f64;
        ChainInstance::new(
            h,
            2.0 * nf.powf(1.5) / b,
            b / nf.powf(1.5),
            n,
            1e-4,
            p,
            0.01,
        )
        .unwrap()
    }

    #[test]
    fn value_and_gradient_at_origin() {
        let c = inst(6, 0.3);
        let (v, g) = c.eval(&[0.0; 6]).unwrap();
        assert_eq!(v, 0.0);
        let mut expect = [0.0; 6];
        expect[0] = -c.psi().d1(c.zeta);
        assert_eq!(g.as_slice(), &expect[..]);
    }

    #[test]
    fn dimension_checked() {
        assert!(inst(4, 0.5).eval(&[0.0; 3]).is_err());
        assert!(inst(4, 0.5)
            .two_point(&[0.0; 5], RngKey::default())
            .is_err());
    }

    #[test]
    fn solution_is_stationary() {
        for n in [2, 5, 16, 64] {
            let c = inst(n, 0.5);
            let (xs, fs) = c.solution();
            let g = c.gradient(&xs).unwrap();
            assert!(
                g.norm() <= 1e-9 * c.psi().d1(c.zeta),
                "N = {n}: {}",
                g.norm()
            );
            let closed = -(n as f64) / (2.0 * c.beta * c.beta)
                * (c.h * c.beta * c.beta * c.zeta * c.zeta / 4.0).ln_1p();
            assert!((fs - closed).abs() <= 1e-10 * closed.abs());
            assert!((xs.norm_sq() - c.solution_norm_sq()).abs() <= 1e-12 * xs.norm_sq());
        }
    }

    #[test]
    fn small_solution_matches_gradient_descent() {
        // N = 2, H = B = beta = 1, zeta = 2^{-3/2}
        let zeta = 2f64.powf(-1.5);
        let c = ChainInstance::new(1.0, 1.0, zeta, 2, 0.0, 1.0, 0.0).unwrap();
        let mut x = Point::zeros(2);
        for _ in 0..200_000 {
            let g = c.gradient(&x).unwrap();
            if g.norm() < 1e-10 {
                break;
            }
            x.axpy(-3.0, &g);
        }
        let (xs, _) = c.solution();
        assert!(
            (x[0] - 2.0 * zeta).abs() < 1e-8 && (x[1] - zeta).abs() < 1e-8,
            "{x:?}"
        );
        assert!((xs.norm_sq() - 0.625).abs() < 1e-15);
    }

    #[test]
    fn fminus_at_origin_is_zero() {
        let c = inst(5, 0.5);
        let g = c.fminus_gradient(&[0.0; 5], ProgMode::ZeroProg).unwrap();
        assert_eq!(prog(&g, 0.0), 0);
    }

    #[test]
    fn fminus_leaves_tail_untouched() {
        let c = inst(10, 0.5);
        let mut x = vec![0.0; 10];
        for (i, v) in x.iter_mut().take(4).enumerate() {
            *v = 1.0 + i as f64;
        }
        for mode in [ProgMode::AlphaProg, ProgMode::ZeroProg] {
            let g = c.fminus_gradient(&x, mode).unwrap();
            assert!(g[5..].iter().all(|v| *v == 0.0));
            assert!(prog(&g, 0.0) <= 4);
        }
    }

    #[test]
    fn p_one_always_advances() {
        let c = inst(8, 1.0);
        let x = [0.3, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for s in 0..50 {
            let d = c.two_point(&x, RngKey::new(s, 0, 0, 0)).unwrap();
            assert_eq!(d.z, Outcome::Z1);
            assert_eq!(d.gradient, c.gradient(&x).unwrap());
        }
    }

    #[test]
    fn floor_case_split() {
        // beta = 2 N^{3/2} lands exactly on the boundary: second case
        let c = inst(16, 0.5);
        assert!((c.suboptimality_floor(FloorVariant::ThreeOutcome) - 1.0 / 16384.0).abs() < 1e-18);
        // beta^2 = 8 N^3 is strictly above
        let n = 16f64;
        let mut d = c;
        d.beta = (8.0 * n.powi(3)).sqrt();
        assert_eq!(
            d.suboptimality_floor(FloorVariant::TwoOutcome),
            n / (6.0 * d.beta * d.beta)
        );
        for beta in [0.1, 1.0, 10.0, 100.0, 1000.0] {
            let mut e = c;
            e.beta = beta;
            assert!(
                e.suboptimality_floor(FloorVariant::TwoOutcome)
                    >= e.suboptimality_floor(FloorVariant::ThreeOutcome)
            );
        }
    }

    fn prefix_point(n: usize, len: usize, seed: u64, scale: f64) -> Vec<f64> {
        let mut s = derive_stream(RngKey::new(seed, 99, 0, 0));
        (0..n)
            .map(|i| if i < len { scale * s.gaussian() } else { 0.0 })
            .collect()
    }

    proptest! {
        #[test]
        fn two_point_reveals_at_most_one(seed in 0u64..5000, len in 0usize..12) {
            let c = inst(12, 0.4);
            let x = prefix_point(12, len, seed, 0.1);
            let d = c.two_point(&x, RngKey::new(seed, 1, 2, 3)).unwrap();
            let bump = usize::from(d.z == Outcome::Z1);
            prop_assert!(prog(&d.gradient, 0.0) <= prog(&x, 0.0) + bump);
        }

        #[test]
        fn three_point_respects_chain(seed in 0u64..5000, len in 0usize..12) {
            let c = inst(12, 0.4);
            let x = prefix_point(12, len, seed, 0.01);
            let d = c.three_point(&x, RngKey::new(seed, 0, 0, 0)).unwrap();
            let j = prog(&x, c.alpha);
            match d.z {
                Outcome::Z0 => prop_assert!(prog(&d.gradient, 0.0) <= j),
                Outcome::Z1 => prop_assert!(prog(&d.gradient, 0.0) <= j + 1),
                _ => {}
            }
        }

        #[test]
        fn fminus_never_advances(seed in 0u64..5000, len in 0usize..10) {
            let c = inst(10, 0.5);
            let x = prefix_point(10, len, seed, 1.0);
            let g = c.fminus_gradient(&x, ProgMode::ZeroProg).unwrap();
            prop_assert!(prog(&g, 0.0) <= prog(&x, 0.0));
        }
    }
}
