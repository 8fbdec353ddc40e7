//! Numerical certification of the analytic claims made about instances and
//! oracles. Every report is a pure function of (descriptor, params, seed).

mod checks;
mod sampling;

pub use checks::{
    check_floor, check_gradient_fd, check_minimizer, check_oracle_moments, check_psi_bounds,
    check_regularity, check_zero_chain, floor_points, ChainOracle, MomentOptions,
};
pub use sampling::{alternating, chain_point, chain_prefix_point, chain_radius, shell_point};

use crate::error::Result;
use crate::instances::{FloorVariant, InstanceDescriptor, InstanceKind, Problem};
use crate::point::Point;
use crate::rng::{derive_stream, RngKey};
use crate::types::ProblemParams;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub bound: f64,
    pub samples: usize,
    pub detail: String,
}

impl CheckReport {
    pub fn new(
        name: &str,
        passed: bool,
        observed: f64,
        bound: f64,
        samples: usize,
        detail: String,
    ) -> Self {
        CheckReport {
            name: name.to_string(),
            passed,
            observed,
            bound,
            samples,
            detail,
        }
    }
}

/// Writes one JSON object per line.
pub fn write_json_lines<W: Write>(reports: &[CheckReport], mut out: W) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Sample sizes for [`run_suite`]. The defaults are the full-strength
/// settings; tests shrink them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteOptions {
    pub fd_points: usize,
    pub pairs: usize,
    pub psi_grid: usize,
    pub moment_points: usize,
    pub moment_draws: usize,
    pub z_max: f64,
    pub var_slack: f64,
    pub chain_draws: usize,
    pub floor_points: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            fd_points: 100,
            pairs: 10_000,
            psi_grid: 100_000,
            moment_points: 20,
            moment_draws: 100_000,
            z_max: 4.0,
            var_slack: 1.05,
            chain_draws: 10_000,
            floor_points: 10_000,
        }
    }
}

impl SuiteOptions {
    pub fn quick() -> Self {
        SuiteOptions {
            fd_points: 20,
            pairs: 500,
            psi_grid: 10_000,
            moment_points: 4,
            moment_draws: 5_000,
            chain_draws: 500,
            floor_points: 500,
            ..Self::default()
        }
    }
}

/// Random evaluation points suited to the instance: prefix-supported points
/// for bare chains, shells straddling the clipping radius for clipped
/// chains, and shells around the solution radius otherwise.
pub fn sample_points(
    desc: &InstanceDescriptor,
    problem: &Problem,
    radius: f64,
    count: usize,
    seed: u64,
) -> Vec<Point> {
    let mut s = derive_stream(RngKey::new(seed, 0, 5, 0));
    let dim = problem.dim();
    (0..count)
        .map(|_| match (desc.kind, problem.chain, desc.rotation) {
            (InstanceKind::Chain | InstanceKind::ChainTwoPoint, Some(c), None) => {
                chain_point(&c, &mut s)
            }
            (InstanceKind::ClippedChain, Some(c), None) if s.uniform() < 0.5 => {
                chain_point(&c, &mut s)
            }
            (InstanceKind::ClippedChain, ..) => {
                shell_point(dim, 0.5 * radius, 8.0 * radius, &mut s)
            }
            _ => shell_point(dim, 1e-3 * radius, 10.0 * radius, &mut s),
        })
        .collect()
}

/// Points for finite differences. The step grows with `||x||` while chain
/// curvature features have fixed width `1 / (sqrt(H) beta)`, so chain points
/// stay within the solution radius.
pub fn fd_points(
    desc: &InstanceDescriptor,
    problem: &Problem,
    radius: f64,
    count: usize,
    seed: u64,
) -> Vec<Point> {
    let chain = match (problem.chain, desc.rotation) {
        (Some(c), None) => c,
        _ => return sample_points(desc, problem, radius, count, seed),
    };
    let mut s = derive_stream(RngKey::new(seed, 0, 7, 0));
    let cap = radius / (chain.n as f64).sqrt();
    (0..count)
        .map(|i| {
            if desc.kind == InstanceKind::ClippedChain && i % 2 == 1 {
                shell_point(chain.n, 0.5 * radius, 8.0 * radius, &mut s)
            } else {
                let len = s.below(chain.n + 1);
                chain_prefix_point(&chain, len, cap, &mut s)
            }
        })
        .collect()
}

pub fn regularity_pairs(
    points: &[Point],
    count: usize,
    radius: f64,
    seed: u64,
) -> Vec<(Point, Point)> {
    let mut s = derive_stream(RngKey::new(seed, 0, 6, 0));
    let dim = points.first().map_or(0, Point::dim);
    let alt = alternating(dim);
    (0..count)
        .map(|i| match i % 4 {
            // Top-curvature direction near the origin, where chain curvature peaks.
            0 => {
                let t = radius * 10f64.powf(-6.0 * s.uniform());
                (alt.scaled(t), alt.scaled(-t))
            }
            // Nearby pairs probe local curvature.
            1 => {
                let x = points[s.below(points.len())].clone();
                let r = x.norm().max(radius) * 10f64.powf(-1.0 - 4.0 * s.uniform());
                let y = x.add(&shell_point(dim, r, r, &mut s));
                (x, y)
            }
            _ => (
                points[s.below(points.len())].clone(),
                points[s.below(points.len())].clone(),
            ),
        })
        .collect()
}

/// Runs every check applicable to the instance. Regularity is measured
/// against the smoothness claimed in `pp`, so an instance whose own `H`
/// exceeds the claim fails.
pub fn run_suite(
    desc: &InstanceDescriptor,
    pp: &ProblemParams,
    seed: u64,
    opt: &SuiteOptions,
) -> Result<Vec<CheckReport>> {
    let problem = desc.build(pp)?;
    let resolved = desc.resolve(pp)?;
    let q = resolved.effective_params(pp)?;
    let kind = desc.kind;
    let obj = problem.objective.as_ref();
    let mut out = Vec::new();

    let fd_tol = if kind == InstanceKind::ClippedChain {
        1e-5
    } else {
        1e-6
    };
    let fd_pts = fd_points(desc, &problem, q.radius, opt.fd_points, seed);
    out.push(check_gradient_fd("gradient_fd", obj, &fd_pts, fd_tol)?);

    let h_claim = if kind == InstanceKind::ClippedChain {
        124.0 * pp.smoothness
    } else {
        pp.smoothness
    };
    let pool = sample_points(
        desc,
        &problem,
        q.radius,
        opt.pairs.clamp(1, 2_000),
        seed.wrapping_add(1),
    );
    let pairs = regularity_pairs(&pool, opt.pairs, q.radius, seed);
    out.push(check_regularity("regularity", obj, h_claim, 0.0, &pairs)?);

    if let Some(bound) = problem.oracle.variance_bound() {
        let pts = sample_points(
            desc,
            &problem,
            q.radius,
            opt.moment_points,
            seed.wrapping_add(2),
        );
        // Heavy-tailed outcomes need enough hits for the standard error to
        // be meaningful: aim for 100 of the rarest outcome, within 100x of
        // the configured draw count.
        let rarest = problem.chain.map_or(1.0, |c| match kind {
            InstanceKind::ChainTwoPoint => c.p.min(1.0 - c.p),
            _ => (c.p * (1.0 - c.delta))
                .min((1.0 - c.p) * (1.0 - c.delta))
                .min(c.delta),
        });
        let mut draws = opt.moment_draws;
        if rarest > 0.0 {
            let wanted = (100.0 / rarest).ceil().min(1e9) as usize;
            draws = draws.max(wanted.min(opt.moment_draws.saturating_mul(100)));
        }
        let mo = MomentOptions {
            draws,
            seed,
            z_max: opt.z_max,
            var_slack: opt.var_slack,
        };
        out.extend(check_oracle_moments(
            "oracle",
            obj,
            problem.oracle.as_ref(),
            &pts,
            bound,
            &mo,
        )?);
    }

    if let Some(chain) = problem.chain {
        out.push(check_psi_bounds(chain.h, chain.beta, opt.psi_grid));
        out.push(check_minimizer("minimizer", &chain, q.radius)?);
        let (oracle, variant) = match kind {
            InstanceKind::ChainTwoPoint => (ChainOracle::TwoPoint, FloorVariant::TwoOutcome),
            _ => (ChainOracle::ThreePoint, FloorVariant::ThreeOutcome),
        };
        out.push(check_zero_chain(
            "zero_chain",
            &chain,
            oracle,
            opt.chain_draws,
            seed,
        )?);
        let pts = floor_points(&chain, variant, opt.floor_points, seed);
        out.push(check_floor("floor", &chain, variant, &pts)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp() -> ProblemParams {
        ProblemParams::new(1.0, 1.0, 1.0, 2, 4, 2).unwrap()
    }

    #[test]
    fn quick_suite_passes_on_every_kind() {
        for kind in [
            InstanceKind::Chain,
            InstanceKind::ChainTwoPoint,
            InstanceKind::ClippedChain,
            InstanceKind::QuadraticPlus,
            InstanceKind::QuadraticMinus,
            InstanceKind::NoisyQuadratic,
        ] {
            let reports = run_suite(
                &InstanceDescriptor::of_kind(kind),
                &pp(),
                3,
                &SuiteOptions::quick(),
            )
            .unwrap();
            for r in &reports {
                assert!(r.passed, "{kind:?}: {r:?}");
            }
        }
    }

    #[test]
    fn understated_smoothness_fails() {
        let mut desc = InstanceDescriptor::of_kind(InstanceKind::Chain);
        desc.h = Some(1.0);
        let claim = ProblemParams {
            smoothness: 0.5,
            ..pp()
        };
        let reports = run_suite(&desc, &claim, 3, &SuiteOptions::quick()).unwrap();
        let reg = reports.iter().find(|r| r.name == "regularity").unwrap();
        assert!(!reg.passed, "{reg:?}");
    }

    #[test]
    fn json_lines_round_trip() {
        let r = check_psi_bounds(1.0, 2.0, 101);
        let mut buf = Vec::new();
        write_json_lines(&[r.clone(), r.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back: CheckReport = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn broken_gradient_is_caught() {
        use crate::instances::Objective;
        struct Wrong;
        impl Objective for Wrong {
            fn dim(&self) -> usize {
                2
            }
            fn value_grad(&self, x: &[f64]) -> Result<(f64, Point)> {
                Ok((
                    x[0] * x[0] + x[1] * x[1],
                    Point::from(vec![2.0 * x[0], x[1]]),
                ))
            }
        }
        let pts = vec![Point::from(vec![0.3, -0.7])];
        assert!(
            !check_gradient_fd("wrong", &Wrong, &pts, 1e-6)
                .unwrap()
                .passed
        );
    }
}
