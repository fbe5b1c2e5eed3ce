use thiserror::Error;

use crate::tt::TensorTrain;

/// Errors produced anywhere in the surrogate stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("index {index:?} out of bounds for shape {shape:?}")]
    OutOfBounds { index: Vec<usize>, shape: Vec<usize> },

    #[error("singular pivot matrix{}", fmt_bond(*.bond))]
    SingularPivot { bond: Option<usize> },

    #[error("singular kernel: decay {0} must be strictly below 1")]
    SingularKernel(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pricer failed at multi-index {index:?}: {message}")]
    Pricer { index: Vec<usize>, message: String },

    #[error("evaluation budget of {budget} calls exhausted")]
    BudgetExhausted { budget: u64 },

    /// The cross sweep hit a singular intersection matrix that jitter could
    /// not repair. `partial` holds the train as it stood; it is not a valid
    /// approximation.
    #[error("cross approximation aborted at bond {bond}: singular intersection matrix")]
    CrossAborted { bond: usize, partial: Box<TensorTrain> },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("incompatible models: {0}")]
    Incompatible(String),

    #[error("invalid serialized data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_bond(bond: Option<usize>) -> String {
    match bond {
        Some(b) => format!(" at bond {b}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
