use thiserror::Error;

pub type Result<T, E = WeylError> = std::result::Result<T, E>;

/// Errors raised by construction-time validation and numerical evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeylError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (max residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("function is not finite at eigenvalue {eigenvalue}")]
    Domain { eigenvalue: f64 },
    #[error("matrix is singular or ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("pole at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("evaluation point {re} + {im}i lies on the real axis")]
    RealAxis { re: f64, im: f64 },
    #[error("function is not strict: Im F(i) has smallest eigenvalue {min_eigenvalue:e}")]
    NotStrict { min_eigenvalue: f64 },
    #[error("invalid sandwich factor: {0}")]
    InvalidSandwich(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
