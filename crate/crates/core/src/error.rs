//! Error type shared by every numerical module.

use thiserror::Error;

/// Failures raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("{function}: argument outside supported domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function}: no convergence after {iterations} iterations (last estimate {estimate:e})")]
    NonConvergence {
        function: &'static str,
        iterations: usize,
        estimate: f64,
    },

    #[error("measure weight singular at x = {at}")]
    SingularPoint { at: f64 },

    #[error("non-integrable singularity at the origin (local exponent {exponent})")]
    NonIntegrable { exponent: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sigma = {sigma} is too close to the edge of the sampled grid")]
    GridEdge { sigma: f64 },

    #[error("quadrature box too small: boundary weight {boundary:e} exceeds {limit:e}")]
    BoxTooSmall { boundary: f64, limit: f64 },

    #[error("dispersion became negative ({value:e}) at sigma = {sigma}")]
    NegativeDispersion { sigma: f64, value: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
