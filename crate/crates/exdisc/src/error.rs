use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("incompatible realization: {0}")]
    IncompatibleRealization(String),

    #[error("singular or indefinite factorization: {0}")]
    SingularFactorization(String),

    #[error("invalid boundary symbol: {0}")]
    InvalidSymbol(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("series too short: {0}")]
    SeriesTooShort(String),

    #[error("weighted symmetry violated: defect {defect:.3e} exceeds {tol:.3e}")]
    SymmetryViolated { defect: f64, tol: f64 },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
