use thiserror::Error;
use transmon_core::ModelError;
use transmon_diagnostics::DiagnosticsError;
use transmon_sweep::SweepError;

pub type Result<T> = std::result::Result<T, CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Numerical(String),

    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Numerical(_) => EXIT_NUMERICAL,
            Self::Config(_) | Self::Io { .. } => EXIT_CONFIG,
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Self {
        let context = context.into();
        move |source| Self::Io { context, source }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NoConvergence { .. }
            | ModelError::CutoffTooSmall { .. }
            | ModelError::DegenerateDisorder { .. }
            | ModelError::BundleUnavailable { .. } => Self::Numerical(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<DiagnosticsError> for CliError {
    fn from(e: DiagnosticsError) -> Self {
        match e {
            DiagnosticsError::Model(m) => m.into(),
            DiagnosticsError::Parse { .. } | DiagnosticsError::InvalidInput(_) | DiagnosticsError::Io(_) => {
                Self::Config(e.to_string())
            }
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Model(m) => m.into(),
            SweepError::Diagnostics(d) => d.into(),
            SweepError::TooManyFailures { .. } => Self::Numerical(e.to_string()),
            SweepError::Io(source) => Self::Io { context: "sweep i/o".into(), source },
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Config(format!("invalid JSON: {e}"))
    }
}
