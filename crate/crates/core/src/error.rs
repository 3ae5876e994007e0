use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-range input (shape, dimension, parameter domain).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A Choi matrix carried an eigenvalue below the negative rank tolerance.
    #[error("operation is not completely positive: Choi eigenvalue {eigenvalue:e}")]
    NotCompletelyPositive { eigenvalue: f64 },

    /// The probability `(I|E|rho)` is too small for the nonlinear normalization.
    #[error("zero-probability operation: Tr E(rho) = {probability:e}")]
    ZeroProbability { probability: f64 },

    /// A symbol or operator polynomial outside the analytically supported family.
    #[error("unsupported form: {0}")]
    UnsupportedForm(String),

    /// A gate matrix had imaginary entries above tolerance.
    #[error("operation does not preserve Hermiticity: imaginary residue {residue:e}")]
    NotRealOperation { residue: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
