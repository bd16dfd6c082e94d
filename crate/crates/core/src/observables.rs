// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Scalar performance, fluctuation, coherence and resource diagnostics.

use serde::{Deserialize, Serialize};

use crate::cycle::bath::population_state;
use crate::cycle::{CornerSet, CycleConfig, CycleEnergetics};
use crate::dbn::DbnSummary;
use crate::error::{OttoError, Result};
use crate::quantum::{dephase, relative_entropy, von_neumann_entropy, ComplexMatrix2, DensityMatrix};

/// `η = −⟨W⟩/⟨Q_h⟩`; defined only for `⟨Q_h⟩ > 0`.
pub fn efficiency(mean_work: f64, mean_qh: f64) -> Result<f64> {
    if !(mean_qh > 0.0) {
        return Err(OttoError::OutsideEngine(format!(
            "efficiency needs mean Q_h > 0, got {mean_qh:e}"
        )));
    }
    Ok(-mean_work / mean_qh)
}

/// `φ = σ/|mean|`.
pub fn relative_fluctuation(sigma: f64, mean: f64) -> Result<f64> {
    if mean == 0.0 {
        return Err(OttoError::ZeroMean);
    }
    Ok(sigma / mean.abs())
}

/// `R = |mean|/σ`, infinite for a sharp observable.
pub fn reliability(sigma: f64, mean: f64) -> Result<f64> {
    Ok(1.0 / relative_fluctuation(sigma, mean)?)
}

/// `F = P/φ_P`.
pub fn power_stability_score(power: f64, phi_p: f64) -> Result<f64> {
    if !(phi_p > 0.0) {
        return Err(OttoError::Domain(format!("phi_P must be positive, got {phi_p}")));
    }
    Ok(power / phi_p)
}

/// `ω_h(1 − 2p_e^c) + ω_c(1 − 2p_e^h)`; negative where nonadiabatic
/// friction lowers the work cost.
pub fn friction_classifier(pe_c: f64, pe_h: f64, omega_c: f64, omega_h: f64) -> f64 {
    omega_h * (1.0 - 2.0 * pe_c) + omega_c * (1.0 - 2.0 * pe_h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrictionSide {
    Negative,
    Zero,
    Positive,
}

impl FrictionSide {
    pub fn of(pe_c: f64, pe_h: f64, omega_c: f64, omega_h: f64) -> Self {
        let s = friction_classifier(pe_c, pe_h, omega_c, omega_h);
        if s < 0.0 {
            FrictionSide::Negative
        } else if s > 0.0 {
            FrictionSide::Positive
        } else {
            FrictionSide::Zero
        }
    }
}

/// Point on the friction-zero line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionBoundary {
    pub pe_h: f64,
    /// False when `pe_h` falls outside `[0, 1]`.
    pub physical: bool,
}

/// `p_e^h = ½[1 + (ω_h/ω_c)(1 − 2p_e^c)]`.
pub fn friction_zero_boundary(pe_c: f64, omega_c: f64, omega_h: f64) -> Result<FrictionBoundary> {
    if !(omega_c > 0.0 && omega_h > 0.0) {
        return Err(OttoError::Domain("gaps must be positive".into()));
    }
    let pe_h = 0.5 * (1.0 + omega_h / omega_c * (1.0 - 2.0 * pe_c));
    Ok(FrictionBoundary {
        pe_h,
        physical: (0.0..=1.0).contains(&pe_h),
    })
}

/// `C = S(Δ_H ρ) − S(ρ)`.
pub fn coherence_rel(rho: &DensityMatrix, h: &ComplexMatrix2) -> Result<f64> {
    let c = von_neumann_entropy(&dephase(rho, h)?) - von_neumann_entropy(rho);
    Ok(c.max(0.0))
}

/// `C + D` with `D = S(Δ_H ρ ‖ ref)`; `+∞` on a support violation.
pub fn coherence_plus_athermality(
    rho: &DensityMatrix,
    h: &ComplexMatrix2,
    reference: &DensityMatrix,
) -> Result<f64> {
    let d = relative_entropy(&dephase(rho, h)?, reference).value();
    Ok(coherence_rel(rho, h)? + d)
}

/// Change of `C + D` across the two bath strokes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundDelta {
    pub hot: f64,
    pub cold: f64,
}

impl BoundDelta {
    /// True when either delta is not a finite number (support violation).
    pub fn flagged(&self) -> bool {
        !self.hot.is_finite() || !self.cold.is_finite()
    }
}

/// `Δ_hot = [C+D](ρ3) − [C+D](ρ2)` and `Δ_cold = [C+D](ρ5) − [C+D](ρ4)`,
/// with references `diag(1 − p_e, p_e)` in the local energy basis.
pub fn bound_delta(corners: &CornerSet, cfg: &CycleConfig) -> Result<BoundDelta> {
    let h_hot = corners.hamiltonians[1];
    let h_cold = corners.hamiltonians[3];
    let ref_h = population_state(&h_hot, cfg.pe_h)?;
    let ref_c = population_state(&h_cold, cfg.pe_c)?;
    let s = &corners.states;
    let f = |rho: &DensityMatrix, h: &ComplexMatrix2, r: &DensityMatrix| {
        coherence_plus_athermality(rho, h, r)
    };
    Ok(BoundDelta {
        hot: f(&s[2], &h_hot, &ref_h)? - f(&s[1], &h_hot, &ref_h)?,
        cold: f(&s[4], &h_cold, &ref_c)? - f(&s[3], &h_cold, &ref_c)?,
    })
}

/// `η_tot = −⟨W⟩/(⟨Q_h⟩ + W_pump)`.
pub fn resource_efficiency(mean_work: f64, mean_qh: f64, w_pump: f64) -> Result<f64> {
    if !(w_pump >= 0.0) {
        return Err(OttoError::Domain(format!("pump work must be non-negative, got {w_pump}")));
    }
    let denom = mean_qh + w_pump;
    if !(denom > 0.0) {
        return Err(OttoError::OutsideEngine(format!(
            "resource efficiency needs Q_h + W_pump > 0, got {denom:e}"
        )));
    }
    Ok(-mean_work / denom)
}

/// Largest `W_pump/⟨Q_h⟩` keeping `η_tot ≥ eta_target`: `η_gross/η_target − 1`.
pub fn pump_threshold(eta_gross: f64, eta_target: f64) -> Result<f64> {
    if !(eta_target > 0.0) || eta_target >= eta_gross {
        return Err(OttoError::EmptyPumpBudget {
            gross: eta_gross,
            target: eta_target,
        });
    }
    Ok(eta_gross / eta_target - 1.0)
}

/// Full set of scalar diagnostics at one operating point.
///
/// Quantities that are undefined at the point (e.g. efficiency with
/// `⟨Q_h⟩ ≤ 0`) are stored as NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub mean_work: f64,
    pub sigma_work: f64,
    pub mean_qh: f64,
    pub sigma_qh: f64,
    pub mean_qc: f64,
    pub sigma_qc: f64,
    pub eta: f64,
    pub eta_reg_sigma: f64,
    pub power: f64,
    pub sigma_power: f64,
    pub phi_p: f64,
    pub reliability_p: f64,
    pub score_f: f64,
    pub engine_flag: bool,
    pub coh_rel_rho3: f64,
    pub bound_hot: f64,
    pub bound_cold: f64,
}

impl ObservableRecord {
    /// Means from the coherent cycle, widths from the DBN distribution.
    pub fn new(
        exact: &CycleEnergetics,
        dbn: &DbnSummary,
        tau_cycle: f64,
        coh_rel_rho3: f64,
        bounds: BoundDelta,
    ) -> Self {
        let w = exact.mean_work;
        let qh = exact.mean_qh;
        let power = -w / tau_cycle;
        let sigma_power = dbn.sigma_work / tau_cycle;
        let eta = efficiency(w, qh).unwrap_or(f64::NAN);
        let eta_reg_sigma = if qh > 0.0 { dbn.sigma_work / qh } else { f64::NAN };
        let phi_p = relative_fluctuation(sigma_power, power).unwrap_or(f64::NAN);
        let reliability_p = if phi_p.is_nan() { f64::NAN } else { 1.0 / phi_p };
        let score_f = power_stability_score(power, phi_p).unwrap_or(f64::NAN);
        ObservableRecord {
            mean_work: w,
            sigma_work: dbn.sigma_work,
            mean_qh: qh,
            sigma_qh: dbn.sigma_qh,
            mean_qc: exact.mean_qc,
            sigma_qc: dbn.sigma_qc,
            eta,
            eta_reg_sigma,
            power,
            sigma_power,
            phi_p,
            reliability_p,
            score_f,
            engine_flag: exact.is_engine(),
            coh_rel_rho3,
            bound_hot: bounds.hot,
            bound_cold: bounds.cold,
        }
    }

    /// `φ_W = σ_W/|⟨W⟩|`.
    pub fn phi_work(&self) -> f64 {
        self.sigma_work / self.mean_work.abs()
    }

    /// `φ_{η_reg} = σ(η_reg)/η`.
    pub fn phi_eta_reg(&self) -> f64 {
        self.eta_reg_sigma / self.eta.abs()
    }
}
