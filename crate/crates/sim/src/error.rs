use std::path::PathBuf;

use mallows_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("worker pool: {0}")]
    Pool(String),
}

pub type SimResult<T> = Result<T, SimError>;

impl SimError {
    /// 2 for bad arguments, 3 for exhausted caps or budgets, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Core(CoreError::CapExceeded { .. } | CoreError::BudgetExceeded { .. }) => 3,
            SimError::Core(_) | SimError::Config(_) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn config_err(msg: impl Into<String>) -> SimError {
    SimError::Config(msg.into())
}
