//! The `verify`, `run` and `dichotomy` commands as library functions.

use super::config::ExperimentConfig;
use crate::algorithms::{optimal_switch, AlgorithmKind};
use crate::error::{Error, Result};
use crate::instances::{progress_budget, InstanceDescriptor, InstanceKind};
use crate::simulator::{run_spec, write_trace_header, write_trace_rows, AlgorithmSpec, SimConfig};
use crate::types::{ProblemParams, RunResult};
use crate::verify::{run_suite, CheckReport, SuiteOptions};
use rayon::prelude::*;
use serde::Serialize;

pub const RUN_HEADER: &str = "run_id,algorithm,seed,M,K,R,H,B,sigma,round,suboptimality,max_prog";
pub const DICHOTOMY_HEADER: &str =
    "instance,K,minibatch_acsa,single_machine_acsa,winner,prediction,threshold";

/// One simulator run of an experiment grid.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub run_id: usize,
    pub algorithm: AlgorithmKind,
    pub seed: u64,
    pub pp: ProblemParams,
    pub result: RunResult,
    /// Analytic progress budget, when the instance is a chain.
    pub progress_budget: Option<usize>,
}

#[derive(Serialize)]
struct RunSummary<'a> {
    run_id: usize,
    algorithm: &'a str,
    seed: u64,
    final_suboptimality: f64,
    max_prog: usize,
    max_s_budget: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    progress_budget: Option<usize>,
}

impl RunRecord {
    pub fn summary_json(&self) -> String {
        let s = RunSummary {
            run_id: self.run_id,
            algorithm: self.algorithm.as_str(),
            seed: self.seed,
            final_suboptimality: self.result.final_subopt(),
            max_prog: self.result.max_prog,
            max_s_budget: self.result.max_s_budget,
            progress_budget: self.progress_budget,
        };
        serde_json::to_string(&s).expect("summary serializes")
    }
}

/// Runs `f` on a dedicated pool of `workers` threads (0 means the rayon
/// default). Results never depend on the worker count.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Suite reports for every configured seed.
pub fn verify_reports(cfg: &ExperimentConfig) -> Result<Vec<CheckReport>> {
    let opt = cfg.checks.unwrap_or_default();
    verify_with(&cfg.instance, &cfg.params, &cfg.seeds.expand(), &opt)
}

fn verify_with(
    desc: &InstanceDescriptor,
    pp: &ProblemParams,
    seeds: &[u64],
    opt: &SuiteOptions,
) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &seed in seeds {
        let mut reports = run_suite(desc, pp, seed, opt)?;
        if seeds.len() > 1 {
            for r in &mut reports {
                r.name = format!("{}@{seed}", r.name);
            }
        }
        out.extend(reports);
    }
    Ok(out)
}

/// Every (grid point, seed) run, ordered by `run_id`.
pub fn run_experiments(cfg: &ExperimentConfig, record_trace: bool) -> Result<Vec<RunRecord>> {
    let spec: AlgorithmSpec = cfg.algorithm.spec();
    let seeds = cfg.seeds.expand();
    let grid = cfg.grid()?;
    let jobs: Vec<(usize, ProblemParams, u64)> = grid
        .iter()
        .enumerate()
        .flat_map(|(g, pp)| {
            let per = seeds.len();
            seeds
                .iter()
                .enumerate()
                .map(move |(s, seed)| (g * per + s, *pp, *seed))
        })
        .collect();
    let problems = grid
        .iter()
        .map(|pp| cfg.instance.build(pp))
        .collect::<Result<Vec<_>>>()?;
    jobs.par_iter()
        .map(|&(run_id, pp, seed)| {
            let problem = &problems[run_id / seeds.len()];
            let mut sim = SimConfig::new(pp, seed);
            sim.record_trace = record_trace;
            let result = run_spec(&spec, problem, &sim)?;
            let budget = problem.chain.and_then(|c| progress_budget(&pp, c.p).ok());
            Ok(RunRecord {
                run_id,
                algorithm: spec.kind,
                seed,
                pp,
                result,
                progress_budget: budget,
            })
        })
        .collect()
}

/// Per-round rows under [`RUN_HEADER`], sorted by `(run_id, round)`.
pub fn run_csv(records: &[RunRecord]) -> String {
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.run_id);
    let mut s = String::from(RUN_HEADER);
    s.push('\n');
    for r in sorted {
        let pp = &r.pp;
        for (i, (sub, prog)) in r
            .result
            .per_round_subopt
            .iter()
            .zip(&r.result.per_round_max_prog)
            .enumerate()
        {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.run_id,
                r.algorithm,
                r.seed,
                pp.machines,
                pp.local_steps,
                pp.rounds,
                pp.smoothness,
                pp.radius,
                pp.sigma,
                i + 1,
                sub,
                prog
            ));
        }
    }
    s
}

/// Trace rows of every run that recorded one.
pub fn trace_csv_all(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_trace_header(&mut w)?;
    for r in records {
        if let Some(t) = &r.result.trace {
            write_trace_rows(
                &mut w,
                &r.run_id.to_string(),
                r.algorithm.as_str(),
                r.seed,
                t,
            )?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DichotomyRow {
    pub instance: String,
    pub k: usize,
    pub minibatch: f64,
    pub single_machine: f64,
    pub winner: AlgorithmKind,
    pub prediction: AlgorithmKind,
    pub threshold: f64,
}

impl DichotomyRow {
    /// Winner and prediction disagree while `K` is at least a factor 4 away
    /// from the threshold.
    pub fn clear_mismatch(&self) -> bool {
        let k = self.k as f64;
        self.winner != self.prediction && (k >= 4.0 * self.threshold || 4.0 * k <= self.threshold)
    }
}

/// `K* = sigma^2 R^3 / (H^2 B^2)`.
pub fn dichotomy_threshold(pp: &ProblemParams) -> f64 {
    let (h, b, s, r) = (pp.smoothness, pp.radius, pp.sigma, pp.rounds as f64);
    s * s * r * r * r / (h * h * b * b)
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median final suboptimality of both AC-SA variants for every `K` and
/// instance.
pub fn dichotomy(
    pp: &ProblemParams,
    k_values: &[usize],
    seeds: &[u64],
    instances: &[InstanceDescriptor],
) -> Result<Vec<DichotomyRow>> {
    const ALGS: [AlgorithmKind; 2] = [
        AlgorithmKind::MinibatchAcsa,
        AlgorithmKind::SingleMachineAcsa,
    ];
    let mut cells = Vec::new();
    for desc in instances {
        for &k in k_values {
            let q = ProblemParams {
                local_steps: k,
                ..*pp
            };
            q.validate()?;
            cells.push((k, q, desc.build(&q)?));
        }
    }
    let jobs: Vec<(usize, usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..ALGS.len()).flat_map(move |a| seeds.iter().map(move |s| (c, a, *s))))
        .collect();
    let finals: Vec<f64> = jobs
        .par_iter()
        .map(|&(c, a, seed)| {
            let (_, q, problem) = &cells[c];
            Ok(run_spec(&ALGS[a].into(), problem, &SimConfig::new(*q, seed))?.final_subopt())
        })
        .collect::<Result<_>>()?;

    let per = seeds.len();
    Ok(cells
        .iter()
        .enumerate()
        .map(|(c, (k, q, problem))| {
            let base = c * ALGS.len() * per;
            let mb = median(&mut finals[base..base + per].to_vec());
            let sm = median(&mut finals[base + per..base + 2 * per].to_vec());
            DichotomyRow {
                instance: problem.name.clone(),
                k: *k,
                minibatch: mb,
                single_machine: sm,
                winner: if mb <= sm { ALGS[0] } else { ALGS[1] },
                prediction: optimal_switch(q),
                threshold: dichotomy_threshold(q),
            }
        })
        .collect())
}

pub fn dichotomy_csv(rows: &[DichotomyRow]) -> String {
    let mut s = String::from(DICHOTOMY_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.instance, r.k, r.minibatch, r.single_machine, r.winner, r.prediction, r.threshold
        ));
    }
    s
}

/// The noisy quadratic always; the configured instance too when it is a
/// different kind.
pub fn dichotomy_instances(cfg: &ExperimentConfig) -> Vec<InstanceDescriptor> {
    let mut v = vec![InstanceDescriptor::of_kind(InstanceKind::NoisyQuadratic)];
    if cfg.instance.kind != InstanceKind::NoisyQuadratic {
        v.push(cfg.instance.clone());
    }
    v
}

/// `K` values: the sweep values when sweeping `K`, else the configured `K`.
pub fn dichotomy_k_values(cfg: &ExperimentConfig) -> Result<Vec<usize>> {
    match &cfg.sweep {
        Some(s) if s.param == "K" => Ok(s.values.iter().map(|v| *v as usize).collect()),
        Some(s) => Err(Error::Config(format!(
            "dichotomy sweeps K only, not {}",
            s.param
        ))),
        None => Ok(vec![cfg.params.local_steps]),
    }
}
