use crate::optim::OptimizerState;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid label {value} at row {row}; labels must be -1 or +1")]
    InvalidLabel { row: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The iterate or gradient overflowed; `last_state` is the last finite state.
    #[error("iterate became non-finite at step {step}")]
    Overflow {
        step: u64,
        last_state: Box<OptimizerState>,
    },

    #[error("assumption violated: {0} (set the override flag to run anyway)")]
    AssumptionViolated(String),

    #[error("margin problem is infeasible: the constraints admit no w with <w, c_n> >= 1")]
    Infeasible,

    #[error("solver stagnated after {sweeps} sweeps with KKT residual {residual:e}")]
    Stagnation { sweeps: usize, residual: f64 },

    #[error("instance exceeds enumeration bounds: {0}")]
    TooLarge(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
