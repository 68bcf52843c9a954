use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e}, tolerance {tolerance:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, tolerance: f64 },

    #[error("symmetric eigensolver did not converge within {sweeps} sweeps")]
    EigenNonConvergence { sweeps: usize },

    #[error("parameter outside domain: {0}")]
    Domain(String),

    #[error("means differ; translate the target onto the base mean before taking the log map")]
    UnequalMeans,

    #[error("pair not covered by the curvature case table: {0}")]
    UnsupportedPair(String),

    #[error("tangent pair is not orthonormal in the base metric (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("tangent vectors are linearly dependent in the base metric")]
    DependentTangents,

    #[error("geodesic circle leaves the positive definite cone; max admissible radius {max_admissible:e}")]
    RadiusTooLarge { max_admissible: f64 },

    #[error("covariance is not diagonalized by the given frame (residual {residual:e})")]
    NotInFamily { residual: f64 },

    #[error("invalid discrete measure: {0}")]
    InvalidMeasure(String),

    #[error("oracle regime violation: {0}")]
    Regime(String),

    #[error("transport solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
