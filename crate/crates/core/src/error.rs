use thiserror::Error;

use crate::prodsys::GridPoint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("map is not completely positive: Choi eigenvalue {eigenvalue:.3e} below -{tol:.1e}")]
    NotCompletelyPositive { eigenvalue: f64, tol: f64 },

    #[error("Kraus family is not contractive: largest eigenvalue of sum T T* is {max_eigenvalue:.12}")]
    NotContractive { max_eigenvalue: f64 },

    #[error("Kraus families do not define the same map (Choi residual {residual:.3e})")]
    NotSameChannel { residual: f64 },

    #[error("maps do not commute (superoperator residual {residual:.3e})")]
    NotCommuting { residual: f64 },

    #[error("certificate failed: unitarity residual {unitarity:.3e}, intertwining residual {intertwining:.3e}")]
    CertificateFailure { unitarity: f64, intertwining: f64 },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("no diagonal intertwiner exists: cardinality criterion fails at {witnesses:?}")]
    NoIntertwiner { witnesses: Vec<(usize, usize)> },

    #[error("time parameter must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("size cap exceeded: {what} = {size} > {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },

    #[error("{point} lies outside the valid range {limit}")]
    OutOfHorizon { point: GridPoint, limit: GridPoint },

    #[error("dilation construction failed: Gram min eigenvalue {min_eigenvalue:.3e}")]
    ConstructionFailure { min_eigenvalue: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
