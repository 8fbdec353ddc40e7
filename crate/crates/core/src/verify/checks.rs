//! Individual numerical checks. Each returns a [`CheckReport`].

use super::sampling::{chain_prefix_point, chain_radius};
use super::CheckReport;
use crate::error::Result;
use crate::instances::{ChainInstance, FloorVariant, Objective, Psi, StochasticOracle};
use crate::point::Point;
use crate::progress::prog;
use crate::rng::{derive_stream, RngKey};
use crate::types::Outcome;
use rayon::prelude::*;

/// Finite-difference gradient check with base step `1e-5 (1 + ||x||)`.
pub fn check_gradient_fd(
    name: &str,
    obj: &dyn Objective,
    points: &[Point],
    tol: f64,
) -> Result<CheckReport> {
    let errs: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let (f, g) = obj.value_grad(x)?;
            let h = 1e-5 * (1.0 + x.norm());
            let mut y = x.clone();
            let mut central = |i: usize, step: f64| -> Result<f64> {
                let xi = x[i];
                y[i] = xi + step;
                let up = obj.value(&y)?;
                y[i] = xi - step;
                let down = obj.value(&y)?;
                y[i] = xi;
                Ok((up - down) / (2.0 * step))
            };
            // One Richardson step on top of the plain central difference:
            // steep instances have curvature features narrower than h.
            let fd = (0..x.dim())
                .map(|i| Ok((4.0 * central(i, 0.5 * h)? - central(i, h)?) / 3.0))
                .collect::<Result<Vec<f64>>>()?;
            let diff = Point::from(fd).sub(&g).norm();
            // Scale floor so that stationary points do not divide by ~0:
            // the rounding error of a central difference is ~eps |F| / h.
            let floor = 1e-8 * (1.0 + f.abs()) / h;
            Ok(diff / g.norm().max(floor))
        })
        .collect::<Result<_>>()?;
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok(CheckReport::new(
        name,
        worst <= tol,
        worst,
        tol,
        points.len(),
        "max relative error of central differences".into(),
    ))
}

/// Sampled gradient-Lipschitz ratio against `h_bound`, plus midpoint
/// (strong) convexity with modulus `mu`.
pub fn check_regularity(
    name: &str,
    obj: &dyn Objective,
    h_bound: f64,
    mu: f64,
    pairs: &[(Point, Point)],
) -> Result<CheckReport> {
    let rows: Vec<(f64, bool)> = pairs
        .par_iter()
        .map(|(x, y)| {
            let (fx, gx) = obj.value_grad(x)?;
            let (fy, gy) = obj.value_grad(y)?;
            let d = x.sub(y);
            let dn = d.norm();
            let ratio = if dn > 0.0 {
                gx.sub(&gy).norm() / dn
            } else {
                0.0
            };
            let mid = obj.value(&Point::lincomb(0.5, x, 0.5, y))?;
            let slack = 1e-12 * (1.0 + fx.abs() + fy.abs());
            let convex = mid <= 0.5 * (fx + fy) - mu / 8.0 * dn * dn + slack;
            Ok((ratio, convex))
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let bad = rows.iter().filter(|r| !r.1).count();
    let bound = h_bound * (1.0 + 1e-9);
    Ok(CheckReport::new(
        name,
        worst <= bound && bad == 0,
        worst,
        bound,
        pairs.len(),
        format!("max gradient-Lipschitz ratio; {bad} midpoint convexity violations"),
    ))
}

#[derive(Clone, Copy, Debug)]
pub struct MomentOptions {
    pub draws: usize,
    pub seed: u64,
    /// Allowed deviation of the mean in standard errors.
    pub z_max: f64,
    /// Multiplicative slack on the variance bound.
    pub var_slack: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions {
            draws: 100_000,
            seed: 0,
            z_max: 4.0,
            var_slack: 1.05,
        }
    }
}

struct PointMoments {
    z_grad: f64,
    z_value: f64,
    variance: f64,
}

fn moments_at(
    obj: &dyn Objective,
    oracle: &dyn StochasticOracle,
    x: &Point,
    index: usize,
    opt: &MomentOptions,
) -> Result<PointMoments> {
    let (f, g) = obj.value_grad(x)?;
    let n = opt.draws as f64;
    let dim = x.dim();
    // Centered at the exact values so the sums do not lose precision.
    let mut s1 = vec![0.0; dim];
    let mut s2 = vec![0.0; dim];
    let mut peak = vec![0.0f64; dim];
    let (mut v1, mut v2, mut vpeak, mut have_value) = (0.0, 0.0, 0.0f64, false);
    let mut sq = 0.0;
    for d in 0..opt.draws {
        let draw = oracle.draw(x, RngKey::new(opt.seed, index as u64, 1, d as u64))?;
        let mut norm2 = 0.0;
        for i in 0..dim {
            let e = draw.gradient[i] - g[i];
            s1[i] += e;
            s2[i] += e * e;
            peak[i] = peak[i].max(draw.gradient[i].abs());
            norm2 += e * e;
        }
        sq += norm2;
        if let Some(v) = draw.value {
            have_value = true;
            let e = v - f;
            v1 += e;
            v2 += e * e;
            vpeak = vpeak.max(v.abs());
        }
    }
    // Coordinates on which every outcome agrees have only rounding noise, so
    // the standard error is floored at a rounding scale of the draws.
    let zscore = |a: f64, b: f64, scale: f64| {
        let mean = a / n;
        let var = (b / n - mean * mean).max(0.0) * n / (n - 1.0);
        let se = (var / n).sqrt().max(1e-13 * scale);
        if se > 0.0 {
            mean.abs() / se
        } else {
            0.0
        }
    };
    let z_grad = (0..dim)
        .map(|i| zscore(s1[i], s2[i], peak[i] + g[i].abs()))
        .fold(0.0, f64::max);
    let z_value = if have_value {
        zscore(v1, v2, vpeak + f.abs())
    } else {
        0.0
    };
    Ok(PointMoments {
        z_grad,
        z_value,
        variance: sq / n,
    })
}

/// Monte Carlo unbiasedness (gradient and, when present, value) and
/// variance at each point. Returns the two reports `<name>/unbiased` and
/// `<name>/variance`.
pub fn check_oracle_moments(
    name: &str,
    obj: &dyn Objective,
    oracle: &dyn StochasticOracle,
    points: &[Point],
    var_bound: f64,
    opt: &MomentOptions,
) -> Result<Vec<CheckReport>> {
    let rows: Vec<PointMoments> = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| moments_at(obj, oracle, x, i, opt))
        .collect::<Result<_>>()?;
    let z = rows
        .iter()
        .map(|r| r.z_grad.max(r.z_value))
        .fold(0.0, f64::max);
    let var = rows.iter().map(|r| r.variance).fold(0.0, f64::max);
    let samples = points.len() * opt.draws;
    let vb = var_bound * opt.var_slack;
    Ok(vec![
        CheckReport::new(
            &format!("{name}/unbiased"),
            z <= opt.z_max,
            z,
            opt.z_max,
            samples,
            format!(
                "max |mean - exact| in standard errors over {} points",
                points.len()
            ),
        ),
        CheckReport::new(
            &format!("{name}/variance"),
            var <= vb,
            var,
            vb,
            samples,
            format!(
                "max E||g - grad F||^2 against {var_bound:e} x {}",
                opt.var_slack
            ),
        ),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainOracle {
    TwoPoint,
    ThreePoint,
}

/// Zero-chain mechanics on every draw: answers reveal at most one new
/// coordinate and only on the advancing outcome, and (three-outcome oracle)
/// answers are unchanged when coordinates past the revealed prefix are
/// perturbed below the threshold.
pub fn check_zero_chain(
    name: &str,
    chain: &ChainInstance,
    kind: ChainOracle,
    draws: usize,
    seed: u64,
) -> Result<CheckReport> {
    let alpha = match kind {
        ChainOracle::TwoPoint => 0.0,
        ChainOracle::ThreePoint => chain.alpha,
    };
    let bad: Vec<usize> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut s = derive_stream(RngKey::new(seed, i as u64, 2, 0));
            let len = s.below(chain.n + 1);
            let x = chain_prefix_point(chain, len, 10.0 * chain_radius(chain), &mut s);
            let key = RngKey::new(seed, i as u64, 3, 0);
            let draw = match kind {
                ChainOracle::TwoPoint => chain.two_point(&x, key)?,
                ChainOracle::ThreePoint => chain.three_point(&x, key)?,
            };
            let j = prog(&x, alpha);
            let keep = match draw.z {
                Outcome::Z0 => j,
                Outcome::Z1 => j + 1,
                _ => return Ok(0),
            };
            let mut violations = usize::from(prog(&draw.gradient, 0.0) > keep);
            if kind == ChainOracle::ThreePoint && alpha > 0.0 && keep < chain.n {
                let mut y = x.clone();
                for v in y.iter_mut().skip(keep) {
                    *v = alpha * (2.0 * s.uniform() - 1.0) * 0.999;
                }
                let again = chain.three_point(&y, key)?;
                let same = again.z == draw.z
                    && again.value.map(f64::to_bits) == draw.value.map(f64::to_bits)
                    && again
                        .gradient
                        .iter()
                        .zip(draw.gradient.iter())
                        .all(|(a, b)| a.to_bits() == b.to_bits());
                violations += usize::from(!same);
            }
            Ok(violations)
        })
        .collect::<Result<_>>()?;
    let total: usize = bad.iter().sum();
    Ok(CheckReport::new(
        name,
        total == 0,
        total as f64,
        0.0,
        draws,
        "violations of the progress and prefix-dependence conditions".into(),
    ))
}

/// Low-progress points: the origin, truncations of `x*`, and random
/// prefixes of length at most `N/2` with magnitudes up to `10B` (plus a
/// sub-threshold tail in `ThreeOutcome` mode).
pub fn floor_points(
    chain: &ChainInstance,
    variant: FloorVariant,
    random: usize,
    seed: u64,
) -> Vec<Point> {
    let n = chain.n;
    let half = n / 2;
    let alpha = match variant {
        FloorVariant::ThreeOutcome => chain.alpha,
        FloorVariant::TwoOutcome => 0.0,
    };
    let (xs, _) = chain.solution();
    let mut pts = vec![Point::zeros(n), xs.truncated(half)];
    if alpha > 0.0 {
        let mut y = xs.truncated(half);
        for v in y.iter_mut().skip(half) {
            *v = alpha;
        }
        pts.push(y);
    }
    let mut sampler = *chain;
    sampler.alpha = alpha;
    let mut s = derive_stream(RngKey::new(seed, 0, 4, 0));
    for _ in 0..random {
        let len = s.below(half + 1);
        pts.push(chain_prefix_point(
            &sampler,
            len,
            10.0 * chain_radius(chain),
            &mut s,
        ));
    }
    pts
}

pub fn check_floor(
    name: &str,
    chain: &ChainInstance,
    variant: FloorVariant,
    points: &[Point],
) -> Result<CheckReport> {
    let floor = chain.suboptimality_floor(variant);
    let alpha = match variant {
        FloorVariant::ThreeOutcome => chain.alpha,
        FloorVariant::TwoOutcome => 0.0,
    };
    let f_star = chain.f_star();
    let mut worst = f64::INFINITY;
    let mut bad = 0;
    let mut skipped = 0;
    for x in points {
        if 2 * prog(x, alpha) > chain.n {
            skipped += 1;
            continue;
        }
        let gap = chain.value(x)? - f_star;
        worst = worst.min(gap / floor);
        bad += usize::from(gap < floor);
    }
    Ok(CheckReport::new(
        name,
        bad == 0 && skipped == 0,
        worst,
        1.0,
        points.len(),
        format!("min (F - F*) / floor; {bad} violations, {skipped} points above N/2"),
    ))
}

/// The pointwise third-derivative and Lipschitz bounds on `psi` over
/// `[-100, 100] / (sqrt(H) beta)`.
pub fn check_psi_bounds(h: f64, beta: f64, grid: usize) -> CheckReport {
    let psi = Psi::new(h, beta);
    let scale = 100.0 / (h.sqrt() * beta);
    let sh = h.sqrt();
    let rel = 1e-12;
    let mut bad = 0;
    let mut worst = 0.0f64;
    for i in 0..grid {
        let x = -scale + 2.0 * scale * i as f64 / (grid - 1).max(1) as f64;
        let (d1, d2, d3) = (psi.d1(x).abs(), psi.d2(x), psi.d3(x).abs());
        let bounds = [
            h * sh * beta / 12.0,
            2.0 * beta * d2.powf(1.5),
            sh * beta / 2.0 * d2,
        ];
        for b in bounds {
            if d3 > b * (1.0 + rel) {
                bad += 1;
            }
            if b > 0.0 {
                worst = worst.max(d3 / b);
            }
        }
        if d1 > psi.lipschitz() * (1.0 + rel) {
            bad += 1;
        }
    }
    CheckReport::new(
        "psi_bounds",
        bad == 0,
        worst,
        1.0,
        grid,
        format!("max ratio of |psi'''| to its bounds; {bad} violations"),
    )
}

/// Closed-form minimizer: norm within `B`, stationary, and optimum value
/// equal to `-(N / 2 beta^2) log(1 + H beta^2 zeta^2 / 4)`.
pub fn check_minimizer(name: &str, chain: &ChainInstance, radius: f64) -> Result<CheckReport> {
    let (xs, fs) = chain.solution();
    let g = chain.gradient(&xs)?.norm();
    let d1 = chain.psi().d1(chain.zeta).abs();
    let (b2, z2) = (chain.beta * chain.beta, chain.zeta * chain.zeta);
    let closed = -(chain.n as f64) / (2.0 * b2) * (chain.h * b2 * z2 / 4.0).ln_1p();
    let value = chain.value(&xs)?;
    let rel_value = ((value - closed) / closed)
        .abs()
        .max(((fs - closed) / closed).abs());
    let norm_ok = xs.norm() <= radius * (1.0 + 1e-12);
    let grad_ratio = g / d1;
    let passed = norm_ok && grad_ratio <= 1e-9 && rel_value <= 1e-10;
    Ok(CheckReport::new(
        name,
        passed,
        grad_ratio,
        1e-9,
        1,
        format!(
            "||grad F(x*)|| / psi'(zeta); ||x*|| = {:e} vs B = {radius:e}; value rel err {rel_value:e}",
            xs.norm()
        ),
    ))
}
