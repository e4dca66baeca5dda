use thiserror::Error;
use transmon_core::ModelError;
use transmon_diagnostics::DiagnosticsError;

pub type Result<T> = std::result::Result<T, SweepError>;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    Config(String),

    #[error("checkpoint was written for config {found}, this config hashes to {expected}")]
    ConfigMismatch { expected: String, found: String },

    #[error("corrupt checkpoint at line {line}: {reason}")]
    CorruptCheckpoint { line: usize, reason: String },

    #[error("results share {count} task keys, first {first}")]
    Overlap { count: usize, first: String },

    #[error("estimated peak memory {needed_gb:.2} GB per task exceeds the budget of {budget_gb:.2} GB")]
    MemoryBudget { needed_gb: f64, budget_gb: f64 },

    #[error("{failed} of {total} tasks failed at grid point ({i}, {j}); first error: {first_error}")]
    TooManyFailures {
        i: usize,
        j: usize,
        failed: usize,
        total: usize,
        first_error: String,
    },

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
