use thiserror::Error;
use transmon_core::ModelError;

pub type Result<T> = std::result::Result<T, DiagnosticsError>;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("need at least {needed} distinct levels, got {got}")]
    TooFewLevels { needed: usize, got: usize },

    #[error("all {count} levels are degenerate")]
    AllDegenerate { count: usize },

    #[error("levels are not ascending at index {index}")]
    Unsorted { index: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("reference has zero mass in bin {bin} where the sample does not")]
    SupportMismatch { bin: usize },

    #[error("need at least {needed} samples for {bins} bins, got {got}")]
    InsufficientSamples { needed: usize, got: usize, bins: usize },

    #[error("eigenvectors were not computed")]
    MissingVectors,

    #[error("expected {expected} levels, got {got}")]
    IncompleteLevels { expected: usize, got: usize },

    #[error("rescaled traces do not overlap for any exponent in the scan")]
    NoOverlap,

    #[error("empty multiplet")]
    EmptyMultiplet,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
