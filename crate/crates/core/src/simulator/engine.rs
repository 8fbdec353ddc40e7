//! The round engine: `R` rounds, each with up to `K` sequential queries per
//! machine followed by a barrier.

use super::audit::{annotate_round, AuditReport, SBudgetAuditor, ZeroRespectingAuditor};
use crate::algorithms::{
    AlgorithmKind, DistributedAlgorithm, LocalSgd, MinibatchAcsa, MinibatchSgd, QueryHandle,
    SingleMachineAcsa,
};
use crate::error::Result;
use crate::instances::Problem;
use crate::types::{ProblemParams, RunResult, TraceEntry};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditFlags {
    #[serde(default)]
    pub zero_respecting: bool,
    #[serde(default)]
    pub s_budget: bool,
}

impl AuditFlags {
    pub const ALL: AuditFlags = AuditFlags {
        zero_respecting: true,
        s_budget: true,
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub pp: ProblemParams,
    pub seed: u64,
    #[serde(default)]
    pub record_trace: bool,
    #[serde(default)]
    pub audit: AuditFlags,
}

impl SimConfig {
    pub fn new(pp: ProblemParams, seed: u64) -> Self {
        SimConfig {
            pp,
            seed,
            record_trace: false,
            audit: AuditFlags::default(),
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn with_audits(mut self, audit: AuditFlags) -> Self {
        self.audit = audit;
        self
    }
}

/// Algorithm choice plus hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    /// SGD stepsize; ignored by the AC-SA variants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl From<AlgorithmKind> for AlgorithmSpec {
    fn from(kind: AlgorithmKind) -> Self {
        AlgorithmSpec { kind, eta: None }
    }
}

/// Run any algorithm against a problem.
pub fn run<A: DistributedAlgorithm>(
    alg: &A,
    problem: &Problem,
    cfg: &SimConfig,
) -> Result<RunResult> {
    let pp = cfg.pp;
    pp.validate()?;
    let dim = problem.dim();
    let oracle = problem.oracle.as_ref();
    let mut state = alg.init(dim);

    let mut zr = cfg
        .audit
        .zero_respecting
        .then(|| ZeroRespectingAuditor::new(dim));
    let mut sb = cfg.audit.s_budget.then(SBudgetAuditor::default);
    let mut trace = cfg.record_trace.then(Vec::new);

    let mut per_round_subopt = Vec::with_capacity(pp.rounds);
    let mut per_round_max_prog = Vec::with_capacity(pp.rounds);
    let (mut max_prog, mut max_s_budget, mut queries, mut carried) = (0, 0, 0, 0);

    for round in 0..pp.rounds {
        let machines: Vec<usize> = (0..pp.machines).filter(|m| alg.participates(*m)).collect();
        let outcomes: Vec<_> = machines
            .par_iter()
            .map(|&m| {
                let mut handle = QueryHandle::new(oracle, cfg.seed, m, round, pp.local_steps);
                let local = alg.local_round(&state, &mut handle)?;
                Ok((m, local, handle.into_records()))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut entries = Vec::new();
        let mut locals = Vec::with_capacity(outcomes.len());
        for (m, local, records) in outcomes {
            for rec in records {
                entries.push(TraceEntry {
                    machine: m,
                    round,
                    k: rec.k,
                    prog: problem.prog(&rec.query),
                    query: rec.query,
                    gradient: rec.draw.gradient,
                    z: Some(rec.draw.z),
                    s_budget: 0,
                });
            }
            locals.push((m, local));
        }
        carried += annotate_round(&mut entries, carried, dim)?;
        queries += entries.len();
        for e in &entries {
            max_prog = max_prog.max(e.prog);
            max_s_budget = max_s_budget.max(e.s_budget);
            if let Some(a) = zr.as_mut() {
                a.feed(e)?;
            }
            if let Some(a) = sb.as_mut() {
                a.feed(e)?;
            }
        }
        if let Some(t) = trace.as_mut() {
            t.extend(entries);
        }

        state = alg.communicate(state, locals)?;
        per_round_subopt.push(problem.subopt(&alg.output(&state))?);
        per_round_max_prog.push(max_prog);
    }

    let audit = (zr.is_some() || sb.is_some()).then(|| AuditReport {
        zero_respecting: zr.map(ZeroRespectingAuditor::finish),
        s_budget: sb.map(SBudgetAuditor::finish),
    });
    Ok(RunResult {
        per_round_subopt,
        per_round_max_prog,
        final_point: alg.output(&state),
        max_prog,
        max_s_budget,
        queries,
        trace,
        audit,
    })
}

/// Build the algorithm named by `spec` and run it.
pub fn run_spec(spec: &AlgorithmSpec, problem: &Problem, cfg: &SimConfig) -> Result<RunResult> {
    let pp = &cfg.pp;
    match spec.kind {
        AlgorithmKind::MinibatchAcsa => run(&MinibatchAcsa::new(pp)?, problem, cfg),
        AlgorithmKind::SingleMachineAcsa => run(&SingleMachineAcsa::new(pp)?, problem, cfg),
        AlgorithmKind::LocalSgd => run(&LocalSgd::new(pp, spec.eta)?, problem, cfg),
        AlgorithmKind::MinibatchSgd => run(&MinibatchSgd::new(pp, spec.eta)?, problem, cfg),
    }
}
