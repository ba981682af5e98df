//! Crate-wide error type.

use serde::Serialize;
use thiserror::Error;

/// Certificate attached to an infeasibility verdict: the least-violating
/// point the search found, with its constraint slacks.
#[derive(Debug, Clone, Serialize)]
pub struct InfeasibilityCertificate {
    /// Best candidate contract in utility space.
    pub best_x: Vec<f64>,
    /// IR slack at the candidate (negative means violated).
    pub ir_slack: f64,
    /// Per-deviation IC slacks at the candidate.
    pub ic_slacks: Vec<f64>,
    /// Largest constraint violation (positive).
    pub worst_violation: f64,
}

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Operation is only defined for finite positive intensities.
    #[error("operation not defined at the lambda={0} endpoint")]
    Endpoint(&'static str),

    /// The constraint set admits no point within tolerance; carries the best
    /// violation certificate found by the multi-start search.
    #[error("infeasible: worst constraint violation {}", .0.worst_violation)]
    Infeasible(InfeasibilityCertificate),

    /// A stated precondition of an operation failed.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::Invalid(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        CoreError::Precondition(msg.into())
    }
}
