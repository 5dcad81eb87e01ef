//! Crate-wide error type.
//!
//! Numerical routines here never return NaN/Inf silently; anything that
//! leaves the supported domain or fails to converge is reported as an
//! explicit variant so callers (and the CLI) can map it to a diagnostic.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A result escaped the representable range (|exponent·log base| too large).
    #[error("overflow: {0}")]
    Overflow(String),

    /// Configuration violates a documented floor or bound.
    #[error("config error: {0}")]
    Config(String),

    /// Batch operations need at least one element.
    #[error("empty batch")]
    EmptyBatch,

    /// A sampled precondition (monotonicity, sign, slope bound) failed.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Adaptive quadrature exhausted its panel budget above tolerance.
    #[error("quadrature did not converge: error estimate {achieved:.3e} > tolerance {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    /// Requested lattice enumeration exceeds the cell budget.
    #[error("region too large: {cells} cells exceeds budget {budget}")]
    RegionTooLarge { cells: u64, budget: u64 },

    /// Direct exponential sum over more than the supported term count.
    #[error("interval too long: {terms:.3e} terms")]
    IntervalTooLong { terms: f64 },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn overflow(msg: impl Into<String>) -> Self {
        Error::Overflow(msg.into())
    }
}
