// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = OttoError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum OttoError {
    /// A precondition of an operation was not met by its inputs.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("value outside the operation's domain: {0}")]
    Domain(String),

    #[error("limit cycle did not converge after {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// The cycle map has more than one fixed point, e.g. with all rates zero.
    #[error("cycle map has no unique fixed point (smallest contraction gap {gap:.3e})")]
    NonUniqueFixedPoint { gap: f64 },

    #[error("bath with zero rate has no unique stationary state")]
    NoUniqueStationaryState,

    /// The operating point does not satisfy ⟨W⟩ < 0 and ⟨Q_h⟩ > 0.
    #[error("operating point outside the engine regime: {0}")]
    OutsideEngine(String),

    #[error("relative fluctuation undefined for zero mean")]
    ZeroMean,

    #[error("probability {0:.3e} is negative beyond roundoff")]
    NegativeProbability(f64),

    #[error("target efficiency {target} is not below gross efficiency {gross}")]
    EmptyPumpBudget { gross: f64, target: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl OttoError {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        OttoError::ContractViolation(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        OttoError::InvalidConfig(msg.into())
    }

    /// True for failures of the fixed-point solver.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            OttoError::NonConvergence { .. } | OttoError::NonUniqueFixedPoint { .. }
        )
    }
}
