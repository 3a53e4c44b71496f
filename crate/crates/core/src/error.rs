use thiserror::Error;

/// Errors produced anywhere in the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate state: ({m},{n}) subtraction from an unsqueezed vacuum is the zero vector")]
    DegenerateState { m: u32, n: u32 },

    #[error("subtraction order ({m},{n}) exceeds the supported ceiling of {max}")]
    OrderTooLarge { m: u32, n: u32, max: u32 },

    #[error("truncation failure: needed more than {cap} Fock levels")]
    TruncationFailure { cap: usize },

    #[error("unphysical covariance matrix: smallest symplectic eigenvalue {d_minus} < 1/2")]
    UnphysicalCovariance { d_minus: f64 },

    #[error("closed form available only for min(m,n) <= 5, got min(m,n) = {m}")]
    UnsupportedOrder { m: u32 },

    #[error("effective quadratic form is not positive definite (kappa = {kappa})")]
    NotPositiveDefinite { kappa: f64 },

    #[error("quadrature insufficient: doubling radial nodes moved the result by {delta:e}")]
    QuadratureInsufficient { delta: f64 },

    #[error("invalid quadrature scheme: {0}")]
    InvalidScheme(String),

    #[error("numerical consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::DegenerateState { .. } => "degenerate_state",
            Error::OrderTooLarge { .. } => "order_too_large",
            Error::TruncationFailure { .. } => "truncation_failure",
            Error::UnphysicalCovariance { .. } => "unphysical_covariance",
            Error::UnsupportedOrder { .. } => "unsupported_order",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::QuadratureInsufficient { .. } => "quadrature_insufficient",
            Error::InvalidScheme(_) => "invalid_scheme",
            Error::Consistency(_) => "consistency",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
