use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions. The best estimate is kept
    /// so callers can decide whether it is good enough.
    #[error(
        "quadrature tolerance not met after {subdivisions} subdivisions \
         (estimate {estimate}, error estimate {error_estimate:e})"
    )]
    ToleranceNotMet {
        estimate: Complex64,
        error_estimate: f64,
        subdivisions: usize,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
