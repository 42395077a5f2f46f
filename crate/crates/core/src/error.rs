use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Scenario/schema problems: unknown fields, missing sections, bad grids.
    #[error("configuration error: {0}")]
    Config(String),

    /// Model parameter invariant violations (non-positive masses, ...).
    #[error("invalid parameter: {0}")]
    Params(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Covariance matrix failing symmetry or the uncertainty relation.
    #[error("non-physical covariance: {0}")]
    NonPhysical(String),

    #[error("drift matrix is not Hurwitz: eigenvalue {re:e}{im:+e}i has non-negative real part")]
    NonHurwitz { re: f64, im: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code convention: 2 for config errors, 1 for runtime
    /// (numerical/physicality/IO) failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::Params(_) | Error::Json(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
