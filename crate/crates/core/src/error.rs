use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("moment quadrature diverges for k = {k}: z(w) vanishes on the unit circle")]
    QuadratureDivergence { k: usize },

    #[error("critical potential: {0}")]
    Criticality(String),

    #[error("supercritical: t0 = {t0} exceeds the critical area t_c = {t_c}")]
    Supercritical { t0: f64, t_c: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e}, worst site {worst_site})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        worst_site: usize,
        last_iterate: Vec<f64>,
    },

    #[error("invalid boundary data: {0}")]
    InvalidBoundary(String),

    #[error("shooting bracket failure: {0}")]
    BracketFailure(String),

    #[error("integration failure at nu = {at}: {reason}")]
    IntegrationFailure { at: f64, reason: String },

    #[error("solution has no zero on its grid")]
    NoZero,

    #[error("insufficient samples: {got} configurations, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag, used in CLI error documents and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::QuadratureDivergence { .. } => "quadrature_divergence",
            Error::Criticality(_) => "criticality",
            Error::Supercritical { .. } => "supercritical",
            Error::NoConvergence { .. } => "no_convergence",
            Error::InvalidBoundary(_) => "invalid_boundary",
            Error::BracketFailure(_) => "bracket_failure",
            Error::IntegrationFailure { .. } => "integration_failure",
            Error::NoZero => "no_zero",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
