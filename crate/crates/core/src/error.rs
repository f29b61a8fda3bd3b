use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector of length {0} cannot be reshaped into a square matrix")]
    NonSquareLength(usize),

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("matrix is not Hermitian: |M - M^dag|_F = {residual:e} exceeds {tolerance:e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("metric is not symmetric: |M - M^dag|_F = {residual:e} exceeds {tolerance:e}")]
    NotSymmetric { residual: f64, tolerance: f64 },

    #[error(
        "matrix is not positive definite: minimum eigenvalue {min_eigenvalue:e} <= {tolerance:e}"
    )]
    NotPositiveDefinite { min_eigenvalue: f64, tolerance: f64 },

    #[error("metric does not commute with the basis conjugation: max |Im| = {max_imag:e}")]
    NotRealEntries { max_imag: f64 },

    #[error("metric condition number {condition:e} exceeds {limit:e}")]
    IllConditionedMetric { condition: f64, limit: f64 },

    #[error("Hamiltonian is not quasi-Hermitian for this metric: residual {residual:e} exceeds {tolerance:e}")]
    NotQuasiHermitian { residual: f64, tolerance: f64 },

    #[error("bi-orthogonality violated at pairs {pairs:?}")]
    BiorthogonalityFailure { pairs: Vec<(usize, usize)> },

    #[error("omega^2 - 4 alpha beta = {discriminant} is not positive; spectrum is not real")]
    NonRealRegime { discriminant: f64 },

    #[error("omega = alpha + beta is a pole of the metric exponent")]
    EtaPole,

    #[error("effective mass is not positive and real: {0}")]
    InvalidMass(String),

    #[error("Kronecker form requested at dimension {dim}, limit is {limit}")]
    KronTooLarge { dim: usize, limit: usize },

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
