use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported spin quantum number {spin} on site `{label}` (expected 1/2 or 3/2)")]
    UnsupportedSpin { label: String, spin: f64 },

    #[error("register dimension {dim} exceeds the cap of {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operation requires a diagonal Hamiltonian")]
    NotDiagonal,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("integration step {step:e} us too large: 2*pi*|H|*step = {product:.4} must stay below {bound}")]
    StepTooLarge { step: f64, product: f64, bound: f64 },

    #[error("register shape mismatch: {0}")]
    RegisterShape(String),

    #[error("outcome `{outcome}` has zero probability ({probability:e})")]
    ZeroProbabilityOutcome { outcome: String, probability: f64 },

    #[error("unknown site `{0}`")]
    UnknownSite(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("numerical invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
