use thiserror::Error;

/// Errors raised by the library layer.
///
/// The variants map onto the CLI exit codes: `Domain` and `Contract` are
/// usage/configuration failures, `Numerical` is a tolerance failure and
/// `Resource` a resource bound.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input outside the mathematical domain of an operation.
    #[error("domain error: {field} = {value} ({reason})")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A documented precondition or approximation regime was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: error estimate {estimate:e} > requested {requested:e} after {panels} panels")]
    Numerical {
        estimate: f64,
        requested: f64,
        panels: usize,
    },

    /// A computation would exceed a hard resource bound.
    #[error("resource bound exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            field,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

pub(crate) fn non_negative(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            field,
            value,
            reason: "must be finite and non-negative",
        })
    }
}
