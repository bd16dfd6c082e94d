// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Driven strokes between the cold and hot Hamiltonians.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::config::CycleConfig;
use crate::error::{OttoError, Result};
use crate::quantum::linalg::{c, exp_minus_i_hermitian, identity2, pauli_x, pauli_y};
use crate::quantum::ComplexMatrix2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stroke {
    /// `H_c → H_h`.
    Compression,
    /// `H_h → H_c`.
    Expansion,
}

/// `−(ω_c/2) σ_x`.
pub fn cold_hamiltonian(cfg: &CycleConfig) -> ComplexMatrix2 {
    pauli_x() * c(-0.5 * cfg.omega_c, 0.0)
}

/// `−(ω_h/2) σ_y`.
pub fn hot_hamiltonian(cfg: &CycleConfig) -> ComplexMatrix2 {
    pauli_y() * c(-0.5 * cfg.omega_h, 0.0)
}

fn interpolated(stroke: Stroke, s: f64, omega_c: f64, omega_h: f64) -> ComplexMatrix2 {
    let theta = FRAC_PI_2 * s;
    let (sin, cos) = theta.sin_cos();
    let (omega, ax, ay) = match stroke {
        Stroke::Compression => (omega_c * (1.0 - s) + omega_h * s, cos, sin),
        Stroke::Expansion => (omega_h * (1.0 - s) + omega_c * s, sin, cos),
    };
    (pauli_x() * c(ax, 0.0) + pauli_y() * c(ay, 0.0)) * c(-0.5 * omega, 0.0)
}

/// Instantaneous drive Hamiltonian at time `t ∈ [0, τ_drive]`.
///
/// `θ = πt/(2τ)` rotates the field from the cold axis to the hot one while
/// the gap is interpolated linearly.
pub fn drive_hamiltonian(stroke: Stroke, t: f64, cfg: &CycleConfig) -> Result<ComplexMatrix2> {
    let tau = cfg.tau_drive;
    if !(0.0..=tau).contains(&t) {
        return Err(OttoError::contract(format!(
            "drive time {t} outside [0, {tau}]"
        )));
    }
    let s = if tau == 0.0 { 0.0 } else { t / tau };
    Ok(interpolated(stroke, s, cfg.omega_c, cfg.omega_h))
}

/// Ordered product `Π_k exp(−i H(t_k) dt)` with midpoint times
/// `t_k = (k + ½) dt`.
pub fn propagate_time_dependent<F>(hamiltonian: F, duration: f64, n_steps: usize) -> ComplexMatrix2
where
    F: Fn(f64) -> ComplexMatrix2,
{
    if duration == 0.0 || n_steps == 0 {
        return identity2();
    }
    let dt = duration / n_steps as f64;
    let mut u = identity2();
    for k in 0..n_steps {
        let h = hamiltonian((k as f64 + 0.5) * dt);
        u = exp_minus_i_hermitian(&h, dt) * u;
    }
    u
}

/// Stroke propagator with `cfg.n_steps_drive` midpoint substeps.
/// A zero-duration stroke is the identity.
pub fn propagate_unitary(stroke: Stroke, cfg: &CycleConfig) -> ComplexMatrix2 {
    propagate_unitary_with_steps(stroke, cfg, cfg.n_steps_drive)
}

pub fn propagate_unitary_with_steps(
    stroke: Stroke,
    cfg: &CycleConfig,
    n_steps: usize,
) -> ComplexMatrix2 {
    let tau = cfg.tau_drive;
    let (wc, wh) = (cfg.omega_c, cfg.omega_h);
    propagate_time_dependent(|t| interpolated(stroke, t / tau, wc, wh), tau, n_steps)
}
