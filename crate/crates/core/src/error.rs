use thiserror::Error;

/// Errors across the toolkit. Variants are grouped by how callers should
/// react: input mistakes (dimension, range, parse), numerical conditioning
/// (ill-conditioned kernel, corrupted distribution), and state validation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be an odd integer >= 3, got {n}")]
    InvalidDimension { n: u64 },

    #[error("{name} = {value} outside the grid range [-{ell}, {ell}]")]
    IndexOutOfRange {
        name: &'static str,
        value: i64,
        ell: i64,
    },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("level n = {n} outside [0, {max}]")]
    LevelOutOfRange { n: usize, max: usize },

    #[error("jet reciprocal requires a nonzero leading coefficient")]
    ZeroLeadingCoefficient,

    #[error("jet order {order} exceeds the supported maximum {max}")]
    JetOrderOverflow { order: usize, max: usize },

    #[error("nome must have positive imaginary part, got {value:e}")]
    NonPositiveNome { value: f64 },

    #[error("kernel value {value:e} at (eta, xi) = ({eta}, {xi}) is below the conditioning floor {floor:e}")]
    IllConditionedKernel {
        eta: i64,
        xi: i64,
        value: f64,
        floor: f64,
    },

    #[error("invalid distribution: {detail}")]
    InvalidDistribution { detail: String },

    #[error("inconsistent entropy reference: {detail}")]
    InconsistentReference { detail: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid state: {detail}")]
    InvalidState { detail: String },

    #[error("numerical consistency check failed: {detail}")]
    NumericalConsistency { detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by numerical conditioning rather than bad
    /// input; the CLI maps these to its dedicated exit code.
    pub fn is_conditioning(&self) -> bool {
        matches!(
            self,
            Error::IllConditionedKernel { .. }
                | Error::InvalidDistribution { .. }
                | Error::NumericalConsistency { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
