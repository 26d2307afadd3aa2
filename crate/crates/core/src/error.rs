use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid soliton parameters: {0}")]
    InvalidParams(String),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("warping function psi = {psi:e} at r = {r} is at or below the tip threshold")]
    TipSingularity { r: f64, psi: f64 },

    #[error("non-finite result while evaluating {0}")]
    NonFinite(&'static str),

    #[error("state has no second derivative of psi")]
    MissingSecondDerivative,

    #[error("no sign change of the event function on [{0}, {1}]")]
    NoSignChange(f64, f64),

    #[error("r = {r} lies outside the covered span [{lo}, {hi}]")]
    OutOfSpan { r: f64, lo: f64, hi: f64 },

    #[error("tip mode needs a positive fiber scalar curvature, got rbar = {0}")]
    NonPositiveRbar(f64),

    #[error("degenerate interval: {0}")]
    DegenerateInterval(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
