use thiserror::Error;

/// Errors raised by the numerical routines, samplers and experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("divergent series: {0}")]
    Divergence(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("truncation failure: realized tail {tail:e} still above {eps:e} after {cap} sticks")]
    TruncationFailure { cap: usize, tail: f64, eps: f64 },

    #[error("series did not converge within {terms} terms: {what}")]
    SeriesDivergence { terms: usize, what: String },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("condition violated: {0}")]
    ConditionViolated(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("quadrature did not reach tolerance: estimate {value:e}, error {error:e}")]
    Quadrature { value: f64, error: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
