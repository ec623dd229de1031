use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One (grid size, value) pair from a refinement sequence.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Refinement {
    pub nodes: usize,
    pub value: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("point lies on the singular axis of the {gauge} gauge; evaluate in the {suggested} gauge instead")]
    Chart { gauge: &'static str, suggested: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency fault: {0}")]
    Consistency(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("channel {channel}: holonomy parameter {lambda} is within {tol:e} of an integer (e^(2πiλ) = 1)")]
    Genericity { channel: usize, lambda: f64, tol: f64 },

    #[error("angular isotropy violated at r = {r}: residual {residual:e} exceeds {tol:e}")]
    Symmetry { r: f64, residual: f64, tol: f64 },

    #[error("quadrature did not converge: error estimate {error_estimate:e} exceeds {tol:e} (history: {history:?})")]
    Convergence { error_estimate: f64, tol: f64, history: Vec<Refinement> },

    #[error("tail bound unavailable: {0}")]
    TailUnavailable(String),

    #[error(
        "u-integral did not converge for λ = {lambda}: quadrature {quadrature:e}, tails {tail:e}, tolerance {tol:e}"
    )]
    SeriesNonConvergence { lambda: f64, quadrature: f64, tail: f64, tol: f64 },

    #[error("index assembly mismatch: Ind(bulk + grav - eta) = {assembled}, closed formula = {closed}, |diff| = {diff:e} > {tol:e}")]
    Cancellation { assembled: f64, closed: f64, diff: f64, tol: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in the CLI error stream.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Chart { .. } => "chart",
            Error::Domain(_) => "domain",
            Error::Consistency(_) => "consistency",
            Error::InvalidSpec(_) => "validation",
            Error::Genericity { .. } => "genericity",
            Error::Symmetry { .. } => "symmetry",
            Error::Convergence { .. } => "convergence",
            Error::TailUnavailable(_) => "tail",
            Error::SeriesNonConvergence { .. } => "series",
            Error::Cancellation { .. } => "cancellation",
            Error::Io(_) => "io",
            Error::Json(_) => "parse",
        }
    }
}
