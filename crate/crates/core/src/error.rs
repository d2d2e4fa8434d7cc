use thiserror::Error;

/// Errors raised by the quantum kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state kinds differ (pure vs mixed)")]
    KindMismatch,

    #[error("outcome {index} has probability {probability:e}, below the collapse floor")]
    ZeroProbabilityOutcome { index: usize, probability: f64 },

    #[error("outcome index {index} out of range (0..{len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

pub type Result<T, E = QuantumError> = std::result::Result<T, E>;
