//! Minibatch and single-machine AC-SA, Local SGD and Minibatch SGD, each as
//! a pure round function plus a [`DistributedAlgorithm`] wrapper.

use super::acsa::{default_schedule, AcsaSchedule, AcsaState};
use super::distributed::{DistributedAlgorithm, QueryHandle};
use crate::error::{invalid, Error, Result};
use crate::point::Point;
use crate::types::ProblemParams;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    MinibatchAcsa,
    SingleMachineAcsa,
    LocalSgd,
    MinibatchSgd,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 4] = [
        AlgorithmKind::MinibatchAcsa,
        AlgorithmKind::SingleMachineAcsa,
        AlgorithmKind::LocalSgd,
        AlgorithmKind::MinibatchSgd,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmKind::MinibatchAcsa => "minibatch_acsa",
            AlgorithmKind::SingleMachineAcsa => "single_machine_acsa",
            AlgorithmKind::LocalSgd => "local_sgd",
            AlgorithmKind::MinibatchSgd => "minibatch_sgd",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Minibatch AC-SA when `K <= sigma^2 R^3 / (H^2 B^2)`, otherwise
/// single-machine AC-SA.
pub fn optimal_switch(pp: &ProblemParams) -> AlgorithmKind {
    let (h, b, s, r) = (pp.smoothness, pp.radius, pp.sigma, pp.rounds as f64);
    let threshold = s * s * r * r * r / (h * h * b * b);
    if pp.local_steps as f64 <= threshold {
        AlgorithmKind::MinibatchAcsa
    } else {
        AlgorithmKind::SingleMachineAcsa
    }
}

fn average(grads: &[Point], expected: usize) -> Result<Point> {
    if grads.len() != expected || expected == 0 {
        return Err(Error::GradientCount {
            expected,
            got: grads.len(),
        });
    }
    Ok(Point::mean(grads).expect("non-empty"))
}

/// One AC-SA step with the average of all `M K` gradients taken at the
/// shared query point.
pub fn minibatch_acsa_round(
    shared: &AcsaState,
    grads: &[Point],
    expected: usize,
) -> Result<AcsaState> {
    let g = average(grads, expected)?;
    super::acsa::acsa_step(shared, &g)
}

/// `K` sequential AC-SA steps, each with a fresh oracle answer.
pub fn single_machine_acsa_round(
    state: &AcsaState,
    mut oracle: impl FnMut(&Point) -> Result<Point>,
    steps: usize,
) -> Result<AcsaState> {
    let mut st = state.clone();
    for _ in 0..steps {
        let g = oracle(&st.query())?;
        st.step(&g)?;
    }
    Ok(st)
}

/// `K` local SGD steps from the shared iterate on one machine.
pub fn local_sgd_steps(
    start: &Point,
    mut oracle: impl FnMut(&Point) -> Result<Point>,
    steps: usize,
    eta: f64,
) -> Result<Point> {
    let mut w = start.clone();
    for _ in 0..steps {
        let g = oracle(&w)?;
        w.axpy(-eta, &g);
    }
    Ok(w)
}

/// Barrier of Local SGD: every machine restarts from the average iterate.
pub fn local_sgd_round(locals: &[Point]) -> Result<Point> {
    Point::mean(locals).ok_or(Error::GradientCount {
        expected: 1,
        got: 0,
    })
}

/// `w - eta * mean(grads)`.
pub fn minibatch_sgd_round(w: &Point, grads: &[Point], eta: f64, expected: usize) -> Result<Point> {
    let g = average(grads, expected)?;
    let mut next = w.clone();
    next.axpy(-eta, &g);
    Ok(next)
}

/// `eta = min{1/H, B/(sigma sqrt(KR))}`.
pub fn default_sgd_stepsize(pp: &ProblemParams) -> f64 {
    let inv_h = 1.0 / pp.smoothness;
    if pp.sigma == 0.0 {
        inv_h
    } else {
        inv_h.min(pp.radius / (pp.sigma * (pp.horizon() as f64).sqrt()))
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        invalid(format!("stepsize must be finite and > 0, got {eta}"))
    }
}

#[derive(Clone, Debug)]
pub struct MinibatchAcsa {
    pub schedule: AcsaSchedule,
    pub machines: usize,
    pub local_steps: usize,
}

impl MinibatchAcsa {
    /// `R` steps with minibatches of `MK`, noise `sigma / sqrt(MK)`.
    pub fn new(pp: &ProblemParams) -> Result<Self> {
        pp.validate()?;
        let mk = (pp.machines * pp.local_steps) as f64;
        let schedule = default_schedule(pp.smoothness, pp.radius, pp.sigma / mk.sqrt(), pp.rounds)?;
        Ok(MinibatchAcsa {
            schedule,
            machines: pp.machines,
            local_steps: pp.local_steps,
        })
    }
}

impl DistributedAlgorithm for MinibatchAcsa {
    type State = AcsaState;
    type Local = Vec<Point>;

    fn name(&self) -> &str {
        AlgorithmKind::MinibatchAcsa.as_str()
    }

    fn init(&self, dim: usize) -> AcsaState {
        AcsaState::new(dim, self.schedule)
    }

    fn local_round(&self, state: &AcsaState, oracle: &mut QueryHandle<'_>) -> Result<Vec<Point>> {
        let q = state.query();
        (0..self.local_steps).map(|_| oracle.query(&q)).collect()
    }

    fn communicate(&self, state: AcsaState, locals: Vec<(usize, Vec<Point>)>) -> Result<AcsaState> {
        let grads: Vec<Point> = locals.into_iter().flat_map(|(_, g)| g).collect();
        minibatch_acsa_round(&state, &grads, self.machines * self.local_steps)
    }

    fn output(&self, state: &AcsaState) -> Point {
        state.x.clone()
    }
}

#[derive(Clone, Debug)]
pub struct SingleMachineAcsa {
    pub schedule: AcsaSchedule,
    pub local_steps: usize,
}

impl SingleMachineAcsa {
    /// `KR` sequential steps on machine 0.
    pub fn new(pp: &ProblemParams) -> Result<Self> {
        pp.validate()?;
        let schedule = default_schedule(pp.smoothness, pp.radius, pp.sigma, pp.horizon())?;
        Ok(SingleMachineAcsa {
            schedule,
            local_steps: pp.local_steps,
        })
    }
}

impl DistributedAlgorithm for SingleMachineAcsa {
    type State = AcsaState;
    type Local = AcsaState;

    fn name(&self) -> &str {
        AlgorithmKind::SingleMachineAcsa.as_str()
    }

    fn init(&self, dim: usize) -> AcsaState {
        AcsaState::new(dim, self.schedule)
    }

    fn participates(&self, machine: usize) -> bool {
        machine == 0
    }

    fn local_round(&self, state: &AcsaState, oracle: &mut QueryHandle<'_>) -> Result<AcsaState> {
        single_machine_acsa_round(state, |q| oracle.query(q), self.local_steps)
    }

    fn communicate(&self, state: AcsaState, locals: Vec<(usize, AcsaState)>) -> Result<AcsaState> {
        Ok(locals
            .into_iter()
            .find(|(m, _)| *m == 0)
            .map(|(_, s)| s)
            .unwrap_or(state))
    }

    fn output(&self, state: &AcsaState) -> Point {
        state.x.clone()
    }
}

#[derive(Clone, Debug)]
pub struct LocalSgd {
    pub eta: f64,
    pub local_steps: usize,
}

impl LocalSgd {
    pub fn new(pp: &ProblemParams, eta: Option<f64>) -> Result<Self> {
        pp.validate()?;
        let eta = eta.unwrap_or_else(|| default_sgd_stepsize(pp));
        check_eta(eta)?;
        Ok(LocalSgd {
            eta,
            local_steps: pp.local_steps,
        })
    }
}

impl DistributedAlgorithm for LocalSgd {
    type State = Point;
    type Local = Point;

    fn name(&self) -> &str {
        AlgorithmKind::LocalSgd.as_str()
    }

    fn init(&self, dim: usize) -> Point {
        Point::zeros(dim)
    }

    fn local_round(&self, state: &Point, oracle: &mut QueryHandle<'_>) -> Result<Point> {
        local_sgd_steps(state, |w| oracle.query(w), self.local_steps, self.eta)
    }

    fn communicate(&self, _state: Point, locals: Vec<(usize, Point)>) -> Result<Point> {
        let pts: Vec<Point> = locals.into_iter().map(|(_, w)| w).collect();
        local_sgd_round(&pts)
    }

    fn output(&self, state: &Point) -> Point {
        state.clone()
    }
}

#[derive(Clone, Debug)]
pub struct MinibatchSgd {
    pub eta: f64,
    pub machines: usize,
    pub local_steps: usize,
}

impl MinibatchSgd {
    pub fn new(pp: &ProblemParams, eta: Option<f64>) -> Result<Self> {
        pp.validate()?;
        let eta = eta.unwrap_or_else(|| default_sgd_stepsize(pp));
        check_eta(eta)?;
        Ok(MinibatchSgd {
            eta,
            machines: pp.machines,
            local_steps: pp.local_steps,
        })
    }
}

impl DistributedAlgorithm for MinibatchSgd {
    type State = Point;
    type Local = Vec<Point>;

    fn name(&self) -> &str {
        AlgorithmKind::MinibatchSgd.as_str()
    }

    fn init(&self, dim: usize) -> Point {
        Point::zeros(dim)
    }

    fn local_round(&self, state: &Point, oracle: &mut QueryHandle<'_>) -> Result<Vec<Point>> {
        (0..self.local_steps).map(|_| oracle.query(state)).collect()
    }

    fn communicate(&self, state: Point, locals: Vec<(usize, Vec<Point>)>) -> Result<Point> {
        let grads: Vec<Point> = locals.into_iter().flat_map(|(_, g)| g).collect();
        minibatch_sgd_round(&state, &grads, self.eta, self.machines * self.local_steps)
    }

    fn output(&self, state: &Point) -> Point {
        state.clone()
    }
}
