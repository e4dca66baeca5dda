use thiserror::Error;

pub type Result<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid transmon parameters: {0}")]
    InvalidParams(String),

    #[error(
        "charge cutoff n_max={n_max} too small: level {level} moved by {shift:.3e} GHz \
         when the cutoff grew by 4 (tolerance {tolerance:.1e} GHz)"
    )]
    CutoffTooSmall {
        n_max: usize,
        level: usize,
        shift: f64,
        tolerance: f64,
    },

    #[error("unknown lattice geometry `{0}`")]
    UnknownGeometry(String),

    #[error("malformed edge list, line {line}: {reason}")]
    MalformedEdgeFile { line: usize, reason: String },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("disorder sampling failed at site {site}: no draw with E_J/E_C >= {min_ratio} after {attempts} attempts")]
    DegenerateDisorder {
        site: usize,
        attempts: usize,
        min_ratio: f64,
    },

    #[error("invalid disorder model: {0}")]
    InvalidDisorder(String),

    #[error("basis has {size} states, above the cap of {cap}")]
    BasisTooLarge { size: usize, cap: usize },

    #[error("invalid basis request: {0}")]
    InvalidBasis(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver did not converge for a {dim}x{dim} matrix")]
    NoConvergence { dim: usize },

    #[error("bundle {k} is not representable in this basis: {reason}")]
    BundleUnavailable { k: usize, reason: String },

    #[error("cannot parse energy `{0}` (expected a number with optional GHz/MHz/kHz suffix)")]
    BadEnergy(String),
}
