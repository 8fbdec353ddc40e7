use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("machine {machine} exceeded its {budget} queries in round {round}")]
    QueryBudgetExceeded {
        machine: usize,
        round: usize,
        budget: usize,
    },

    #[error("gradient count mismatch: expected {expected}, got {got}")]
    GradientCount { expected: usize, got: usize },

    #[error("trace entry ({machine}, {round}, {k}) has no outcome tag")]
    MissingOutcome {
        machine: usize,
        round: usize,
        k: usize,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
