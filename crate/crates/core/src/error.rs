use thiserror::Error;

/// Unified error type for solver construction and evaluation failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid construction: {0}")]
    Invalid(String),

    #[error("unsorted input: {0}")]
    Unsorted(String),

    #[error("non-convex input: {0}")]
    NonConvex(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("evaluation outside the represented region: {0}")]
    OutOfDomain(String),

    #[error("query into a vacuum region: {0}")]
    Vacuum(String),

    #[error("requested time precedes the system time ({system} > {requested})")]
    TimeReversed { system: f64, requested: f64 },

    #[error("finite-time blowup at t = {t_critical} (requested t = {requested})")]
    Blowup { t_critical: f64, requested: f64 },

    #[error("sample domain too small: {0}")]
    DomainTooSmall(String),

    #[error("invalid stochastic law: {0}")]
    InvalidLaw(String),
}

pub type Result<T> = std::result::Result<T, Error>;
