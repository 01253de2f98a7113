use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid potential shape: {0}")]
    InvalidShape(String),

    #[error("value {value} outside evaluable range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("no bound state at coupling v = {coupling}: {evidence}")]
    NoBoundState { coupling: f64, evidence: String },

    #[error("eigenvalue did not converge: {reason} (residual {residual:.3e})")]
    Convergence { reason: String, residual: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("shape is repulsive everywhere, no coupling binds")]
    NoBinding,

    #[error("spectral data is not concave at points {triple:?}")]
    NonConcave { triple: [(f64, f64); 3] },

    #[error("spectral data is not strictly monotone near v = {at}")]
    NonMonotone { at: f64 },

    #[error("wavefunction is not normalized: norm = {norm:.12}")]
    Unnormalized { norm: f64 },

    #[error("extremum not bracketed: {0}")]
    Unbracketed(String),

    #[error("inversion stage {stage} failed at coupling {coupling}: {cause}")]
    Inversion {
        stage: usize,
        coupling: f64,
        cause: String,
    },

    #[error("iterate at stage {stage} is not monotone: f drops by {drop:.3e} at r = {at}")]
    Admissibility { stage: usize, at: f64, drop: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
