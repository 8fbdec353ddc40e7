//! Monte Carlo check of how often the realized S-budget stays within the
//! analytic progress budget.

use super::engine::{run_spec, AlgorithmSpec, SimConfig};
use crate::algorithms::AlgorithmKind;
use crate::error::Result;
use crate::instances::progress_budget;
use crate::instances::{choose_chain_parameters, InstanceDescriptor, InstanceKind};
use crate::types::ProblemParams;
use rayon::prelude::*;

/// Largest S-budget of each of `runs` independent runs (seeds
/// `base_seed..base_seed + runs`) on the two-outcome chain with advance
/// probability `p`, under an algorithm that uses every machine.
pub fn s_budget_samples(
    pp: &ProblemParams,
    p: f64,
    runs: usize,
    base_seed: u64,
) -> Result<Vec<usize>> {
    let chain = choose_chain_parameters(pp)?;
    let mut d =
        InstanceDescriptor::from_chain(InstanceKind::ChainTwoPoint, &chain, pp.radius, pp.sigma);
    d.p = Some(p);
    d.alpha = Some(0.0);
    d.delta = Some(0.0);
    let problem = d.build(pp)?;
    let spec = AlgorithmSpec::from(AlgorithmKind::MinibatchSgd);
    (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let cfg = SimConfig::new(*pp, base_seed + i);
            Ok(run_spec(&spec, &problem, &cfg)?.max_s_budget)
        })
        .collect()
}

/// Fraction of runs whose largest S-budget is within
/// `progress_budget(pp, p)`.
pub fn empirical_progress_check(
    pp: &ProblemParams,
    p: f64,
    runs: usize,
    base_seed: u64,
) -> Result<f64> {
    let budget = progress_budget(pp, p)?;
    if runs == 0 {
        return Ok(1.0);
    }
    let samples = s_budget_samples(pp, p, runs, base_seed)?;
    Ok(samples.iter().filter(|s| **s <= budget).count() as f64 / runs as f64)
}
