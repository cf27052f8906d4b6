use thiserror::Error;

use crate::solver::GroundState;

pub type Result<T, E = EvasionError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum EvasionError {
    #[error("prey and predator positions coincide; wedge heading is undefined")]
    CoincidentPositions,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point ({x}, {y}) lies outside the tabulated mesh")]
    OutOfDomain { x: f64, y: f64 },

    #[error("potential is not declared radially symmetric")]
    NotRadial,

    #[error("adaptive quadrature did not converge (estimate {estimate}, error {error})")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("inverse iteration did not converge in {max_iter} iterations")]
    NoConvergence {
        max_iter: usize,
        last: Box<GroundState>,
    },

    #[error("eigenvector changes sign at node {node}; not a ground state")]
    NotNodeless { node: usize },

    #[error("operator is not positive definite after shift (pivot {pivot})")]
    Factorization { pivot: usize },

    #[error("length mismatch: {left} estimates vs {right} realizations")]
    LengthMismatch { left: usize, right: usize },

    #[error("capture: prey and predator within {distance:e}")]
    CaptureEvent { distance: f64 },

    #[error("step index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("malformed table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl EvasionError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        EvasionError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
