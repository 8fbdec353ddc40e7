//! The contract between an intermittent-communication algorithm and the
//! simulator. During a round a machine sees only the state broadcast at the
//! last barrier and the answers to its own queries; the barrier then merges
//! the per-machine results.

use crate::error::{Error, Result};
use crate::instances::StochasticOracle;
use crate::point::Point;
use crate::rng::RngKey;
use crate::types::OracleDraw;

/// One oracle call made through a [`QueryHandle`].
#[derive(Clone, Debug, PartialEq)]
pub struct QueryRecord {
    pub k: usize,
    pub query: Point,
    pub draw: OracleDraw,
}

/// A machine's access to the oracle for one round; refuses the `K+1`-th call.
pub struct QueryHandle<'a> {
    oracle: &'a dyn StochasticOracle,
    seed: u64,
    machine: usize,
    round: usize,
    budget: usize,
    records: Vec<QueryRecord>,
}

impl<'a> QueryHandle<'a> {
    pub fn new(
        oracle: &'a dyn StochasticOracle,
        seed: u64,
        machine: usize,
        round: usize,
        budget: usize,
    ) -> Self {
        QueryHandle {
            oracle,
            seed,
            machine,
            round,
            budget,
            records: Vec::with_capacity(budget),
        }
    }

    pub fn machine(&self) -> usize {
        self.machine
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn used(&self) -> usize {
        self.records.len()
    }

    pub fn query(&mut self, x: &Point) -> Result<Point> {
        let k = self.records.len();
        if k >= self.budget {
            return Err(Error::QueryBudgetExceeded {
                machine: self.machine,
                round: self.round,
                budget: self.budget,
            });
        }
        let draw = self
            .oracle
            .draw(x, RngKey::query(self.seed, self.machine, self.round, k))?;
        let g = draw.gradient.clone();
        self.records.push(QueryRecord {
            k,
            query: x.clone(),
            draw,
        });
        Ok(g)
    }

    pub fn into_records(self) -> Vec<QueryRecord> {
        self.records
    }
}

pub trait DistributedAlgorithm: Send + Sync {
    /// State shared by all machines after a barrier.
    type State: Clone + Send + Sync;
    /// What a machine hands to the barrier.
    type Local: Send;

    fn name(&self) -> &str;

    fn init(&self, dim: usize) -> Self::State;

    /// Machines that do not participate make no queries.
    fn participates(&self, _machine: usize) -> bool {
        true
    }

    fn local_round(&self, state: &Self::State, oracle: &mut QueryHandle<'_>)
        -> Result<Self::Local>;

    /// Merge per-machine results, given in machine order.
    fn communicate(
        &self,
        state: Self::State,
        locals: Vec<(usize, Self::Local)>,
    ) -> Result<Self::State>;

    /// The algorithm's current answer `x_hat`.
    fn output(&self, state: &Self::State) -> Point;
}
