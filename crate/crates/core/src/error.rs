use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("dimension d = {0} is too small, need d >= 2")]
    DimensionTooSmall(usize),
    #[error("d = {0} is not prime; the MUB construction needs a prime dimension")]
    NotPrime(usize),
    #[error("kappa = {kappa} is out of range: {reason}")]
    KappaOutOfRange { kappa: f64, reason: String },
    #[error("degenerate parameter: {0}")]
    Degenerate(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("measurement family violates its defining relations: {0}")]
    InvalidFamily(String),
    #[error("invalid rotation: {0}")]
    InvalidRotation(String),
    #[error("invalid witness recipe: {0}")]
    InvalidSpec(String),
    #[error("Q^T Q is not bounded by the identity (largest eigenvalue {0:.6})")]
    QNotContractive(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable kebab-case name of the variant, used in structured CLI errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::NotHermitian { .. } => "not-hermitian",
            Error::DimensionTooSmall(_) => "dimension-too-small",
            Error::NotPrime(_) => "not-prime",
            Error::KappaOutOfRange { .. } => "kappa-out-of-range",
            Error::Degenerate(_) => "degenerate",
            Error::InvalidBasis(_) => "invalid-basis",
            Error::InvalidFamily(_) => "invalid-family",
            Error::InvalidRotation(_) => "invalid-rotation",
            Error::InvalidSpec(_) => "invalid-spec",
            Error::QNotContractive(_) => "q-not-contractive",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
