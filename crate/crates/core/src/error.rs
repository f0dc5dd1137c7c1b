use thiserror::Error;

/// Errors raised by the metrology toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("not unitary (max deviation from identity {0:e})")]
    NotUnitary(f64),

    #[error("state not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("eigensolver did not converge")]
    EigenFailure,

    #[error("site {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("sites must be distinct, got {0:?}")]
    RepeatedSites(Vec<usize>),

    #[error("{n_sites} sites exceed the dense cap of {cap}")]
    DenseCapExceeded { n_sites: usize, cap: usize },

    #[error("parameter index {index} out of range for {d} parameters")]
    ParameterIndex { index: usize, d: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("inconsistent marginals (max deviation {0:e})")]
    InconsistentMarginals(f64),

    #[error("matrix is rank deficient; null directions {null_directions:?}")]
    RankDeficient { null_directions: Vec<Vec<f64>> },

    #[error("attainability condition violated: |<[L_{k},L_{l}]>| = {magnitude:e}")]
    NotAttainable { k: usize, l: usize, magnitude: f64 },

    #[error("vectors are linearly dependent (Schur complement min eigenvalue {0:e})")]
    LinearlyDependent(f64),

    #[error("POVM invalid: {0}")]
    InvalidPovm(String),

    #[error("N not divisible by 3")]
    NotDivisibleByThree(usize),

    #[error("N must be even, got {0}")]
    OddSites(usize),

    #[error("normalization bracket is non-positive ({0})")]
    NonPositiveNormalization(f64),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
