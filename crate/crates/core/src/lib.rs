//! Distributed stochastic convex optimization under intermittent
//! communication: hard instances with zero-chain oracles, accelerated and
//! baseline methods, a round-based simulator with progress audits, and a
//! numerical verification suite.

pub mod algorithms;
pub mod cli;
pub mod error;
pub mod instances;
pub mod point;
pub mod progress;
pub mod rng;
pub mod simulator;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use point::Point;
pub use rng::{derive_stream, RngKey, Stream};
pub use types::{OracleDraw, Outcome, ProblemParams, RunResult, TraceEntry};
