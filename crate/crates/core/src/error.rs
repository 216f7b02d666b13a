use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigenvalue {eigenvalue} lies outside [0, 1]")]
    SpectrumOutOfRange { eigenvalue: f64 },

    #[error("function undefined at eigenvalue {eigenvalue}")]
    Domain { eigenvalue: f64 },

    #[error("largest singular value {sigma} exceeds 1")]
    NotContraction { sigma: f64 },

    #[error("not an orthogonal projector (deviation {deviation:e})")]
    NotProjector { deviation: f64 },

    #[error("projection chain is not nested at step {index} (deviation {deviation:e})")]
    NotNested { index: usize, deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge: estimate {estimate}, error {error:e} > tol {tol:e}")]
    Accuracy { estimate: f64, error: f64, tol: f64 },

    #[error("B has a boundary eigenvalue at {boundary} where the direction does not vanish (norm {norm:e})")]
    SingularDirection { boundary: f64, norm: f64 },

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
