//! Deterministic test-point generators.

use crate::instances::ChainInstance;
use crate::point::Point;
use crate::rng::Stream;

fn log_uniform(s: &mut Stream, lo: f64, hi: f64) -> f64 {
    (lo.ln() + s.uniform() * (hi.ln() - lo.ln())).exp()
}

/// Radius implied by a chain built with `zeta = B / N^{3/2}`.
pub fn chain_radius(chain: &ChainInstance) -> f64 {
    chain.zeta * (chain.n as f64).powf(1.5)
}

/// A point supported (above `alpha`) on a random prefix, with a random
/// sub-threshold tail. Prefix magnitudes range over several orders.
pub fn chain_point(chain: &ChainInstance, s: &mut Stream) -> Point {
    let n = chain.n;
    let len = s.below(n + 1);
    chain_prefix_point(chain, len, 10.0 * chain_radius(chain), s)
}

/// Like [`chain_point`] with a fixed prefix length and magnitude cap.
pub fn chain_prefix_point(
    chain: &ChainInstance,
    len: usize,
    max_scale: f64,
    s: &mut Stream,
) -> Point {
    let lo = (chain.zeta / 10.0).min(max_scale / 2.0);
    let scale = log_uniform(s, lo, max_scale);
    let tail = chain.alpha > 0.0 && s.uniform() < 0.5;
    let v: Vec<f64> = (0..chain.n)
        .map(|i| {
            if i < len {
                (scale * s.gaussian()).clamp(-max_scale, max_scale)
            } else if tail {
                chain.alpha * (2.0 * s.uniform() - 1.0)
            } else {
                0.0
            }
        })
        .collect();
    Point::from(v)
}

/// Random direction with log-uniform norm in `[lo, hi]`.
pub fn shell_point(dim: usize, lo: f64, hi: f64, s: &mut Stream) -> Point {
    let norm = log_uniform(s, lo, hi);
    let mut v = Point::from(s.gaussian_vec(dim, 1.0));
    let r = v.norm();
    if r > 0.0 {
        v.scale_mut(norm / r);
    }
    v
}

/// Alternating-sign direction of unit norm; the top curvature direction of
/// the chain near the origin.
pub fn alternating(dim: usize) -> Point {
    let c = 1.0 / (dim as f64).sqrt();
    Point::from(
        (0..dim)
            .map(|i| if i % 2 == 0 { c } else { -c })
            .collect::<Vec<_>>(),
    )
}
