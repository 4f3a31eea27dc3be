//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by parameter validation and the recursion engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model parameter violates its domain constraint.
    #[error("invalid parameter `{name}`: {constraint} (got {value})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// The second-moment recursion lost numerical validity (error variance
    /// underflowed to zero, or the cross-covariance broke Cauchy-Schwarz by
    /// more than rounding noise).
    #[error("numeric degeneracy at step {step}: {detail}")]
    NumericDegeneracy { step: usize, detail: String },

    /// A simulation or sweep configuration is inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The distortion target was not reached within the step budget.
    #[error("distortion target not reached within {max_steps} steps")]
    NonTermination { max_steps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
