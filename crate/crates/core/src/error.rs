use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The QR iteration stalled. `converged` holds the eigenvalues that did
    /// deflate before the failure, rounded to double precision.
    #[error("QR iteration failed to converge at index {index} after {iterations} iterations ({} eigenvalues converged)", converged.len())]
    ConvergenceFailure {
        index: usize,
        iterations: usize,
        converged: Vec<Complex64>,
    },

    #[error("inverse iteration did not reach relative residual {tolerance:e} (best {residual:e}) for shift {shift}")]
    RefinementFailure {
        shift: Complex64,
        residual: f64,
        tolerance: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
