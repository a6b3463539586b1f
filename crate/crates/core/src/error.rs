use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two families: input/contract violations and
/// numerical failures. [`Error::is_numeric`] tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix family does not commute (deviation {deviation:e})")]
    NotCommuting { deviation: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry encountered")]
    NonFinite,
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("columns are not orthonormal (deviation {deviation:e})")]
    NotIsometry { deviation: f64 },
    #[error("family is not simultaneously diagonalizable in weak SVD")]
    NotSimultaneouslyDiagonalizable,
    #[error("ensemble state {index} is not diagonal in the given basis (off-diagonal mass {mass:e})")]
    NotDiagonalInBasis { index: usize, mass: f64 },
    #[error("matrix is not a complex Hadamard matrix")]
    NotHadamard,
    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },
    #[error("expected {expected} Hadamard matrices, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("iteration cap exceeded in {0}")]
    ConvergenceFailure(&'static str),
    #[error("weak SVD construction failed after {attempts} attempts (best residual {residual:e})")]
    ConstructionFailure { attempts: usize, residual: f64 },
}

impl Error {
    /// True for failures of a numerical routine, as opposed to invalid input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure(_) | Error::ConstructionFailure { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
