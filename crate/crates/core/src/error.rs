use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Exact enumeration or quadratic oracles refuse inputs above their size guard.
    #[error("input size {n} exceeds the limit {max}")]
    TooLarge { n: usize, max: usize },

    /// A simulated return time ran past its step cap.
    #[error("step cap of {cap} exceeded after {steps} steps")]
    CapExceeded { cap: u64, steps: u64 },

    /// Quadrature could not meet the tolerance within the evaluation budget.
    #[error(
        "tolerance not met within an evaluation budget of {budget} (error estimate {estimate:e})"
    )]
    BudgetExceeded { budget: usize, estimate: f64 },

    #[error("cannot parse permutation: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
