//! Accelerated and baseline distributed methods.

mod acsa;
mod distributed;
mod methods;
mod regularize;

pub use acsa::{acsa_step, default_schedule, AcsaSchedule, AcsaState};
pub use distributed::{DistributedAlgorithm, QueryHandle, QueryRecord};
pub use methods::{
    default_sgd_stepsize, local_sgd_round, local_sgd_steps, minibatch_acsa_round,
    minibatch_sgd_round, optimal_switch, single_machine_acsa_round, AlgorithmKind, LocalSgd,
    MinibatchAcsa, MinibatchSgd, SingleMachineAcsa,
};
pub use regularize::{choose_lambda, sc_reduction, Regularized};
