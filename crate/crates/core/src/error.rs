use thiserror::Error;

/// Errors raised by the library and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("intensity is negative: min {min:.3e} at t = {at:.6}")]
    NegativeIntensity { min: f64, at: f64 },

    #[error("quadrature did not converge: {coarse} vs {fine}")]
    QuadratureNotConverged { coarse: f64, fine: f64 },

    #[error("index {requested} exceeds available coefficient range {available}")]
    IndexOutOfRange { requested: usize, available: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("search cap k_cap = {k_cap} does not bracket the oracle dimension")]
    KCapTooSmall { k_cap: usize },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 3,
            Error::Invariant(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
