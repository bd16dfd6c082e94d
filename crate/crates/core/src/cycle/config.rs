// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{OttoError, Result};

/// Stationary bath populations used by the two reference working points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Both baths below half filling.
    Positive,
    /// Hot bath with excited population above one half.
    Inverted,
}

impl Regime {
    /// `(pe_c, pe_h)` of the finite-time working point.
    pub fn populations(self) -> (f64, f64) {
        match self {
            Regime::Positive => (0.25, 0.35),
            Regime::Inverted => (0.40, 0.80),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Positive => "positive",
            Regime::Inverted => "inverted",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = OttoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(Regime::Positive),
            "inverted" => Ok(Regime::Inverted),
            other => Err(OttoError::config(format!(
                "unknown regime {other:?} (expected positive or inverted)"
            ))),
        }
    }
}

/// Physical and numerical parameters of one Otto cycle (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CycleConfig {
    pub omega_c: f64,
    pub omega_h: f64,
    pub pe_c: f64,
    pub pe_h: f64,
    pub gamma_c: f64,
    pub gamma_h: f64,
    pub tau_drive: f64,
    pub tau_h: f64,
    pub tau_c: f64,
    pub n_steps_drive: usize,
    /// Only used for trajectory dumps; isochores are applied as exact channels.
    pub n_steps_iso: usize,
    pub fixed_point_tol: f64,
    pub max_cycle_iters: usize,
}

impl Default for CycleConfig {
    fn default() -> Self {
        let (pe_c, pe_h) = Regime::Inverted.populations();
        CycleConfig {
            omega_c: 0.0157,
            omega_h: 0.0314,
            pe_c,
            pe_h,
            gamma_c: 1e-3,
            gamma_h: 1e-3,
            tau_drive: 20.0,
            tau_h: 100.0,
            tau_c: 100.0,
            n_steps_drive: 500,
            n_steps_iso: 400,
            fixed_point_tol: 1e-12,
            max_cycle_iters: 100_000,
        }
    }
}

impl CycleConfig {
    pub fn with_regime(mut self, regime: Regime) -> Self {
        (self.pe_c, self.pe_h) = regime.populations();
        self
    }

    pub fn with_populations(mut self, pe_c: f64, pe_h: f64) -> Self {
        self.pe_c = pe_c;
        self.pe_h = pe_h;
        self
    }

    pub fn with_times(mut self, tau_drive: f64, tau_iso: f64) -> Self {
        self.tau_drive = tau_drive;
        self.tau_h = tau_iso;
        self.tau_c = tau_iso;
        self
    }

    /// `τ_cyc = 2τ_drive + τ_h + τ_c`.
    pub fn tau_cycle(&self) -> f64 {
        2.0 * self.tau_drive + self.tau_h + self.tau_c
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_c", self.omega_c),
            ("omega_h", self.omega_h),
            ("pe_c", self.pe_c),
            ("pe_h", self.pe_h),
            ("gamma_c", self.gamma_c),
            ("gamma_h", self.gamma_h),
            ("tau_drive", self.tau_drive),
            ("tau_h", self.tau_h),
            ("tau_c", self.tau_c),
            ("fixed_point_tol", self.fixed_point_tol),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(OttoError::config(format!("{name} must be finite, got {v}")));
            }
        }
        if !(self.omega_h > self.omega_c && self.omega_c > 0.0) {
            return Err(OttoError::config(format!(
                "gaps must satisfy omega_h > omega_c > 0 (got omega_c = {}, omega_h = {})",
                self.omega_c, self.omega_h
            )));
        }
        for (name, p) in [("pe_c", self.pe_c), ("pe_h", self.pe_h)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(OttoError::config(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        for (name, v) in [
            ("gamma_c", self.gamma_c),
            ("gamma_h", self.gamma_h),
            ("tau_drive", self.tau_drive),
            ("tau_h", self.tau_h),
            ("tau_c", self.tau_c),
        ] {
            if v < 0.0 {
                return Err(OttoError::config(format!("{name} = {v} must be non-negative")));
            }
        }
        if self.n_steps_drive == 0 || self.n_steps_iso == 0 {
            return Err(OttoError::config("step counts must be positive"));
        }
        if self.fixed_point_tol <= 0.0 {
            return Err(OttoError::config("fixed_point_tol must be positive"));
        }
        if self.max_cycle_iters == 0 {
            return Err(OttoError::config("max_cycle_iters must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = CycleConfig::default();
        cfg.validate().unwrap();
        assert_eq!((cfg.pe_c, cfg.pe_h), (0.40, 0.80));
        assert_eq!(cfg.tau_cycle(), 240.0);
    }

    #[test]
    fn rejects_bad_values() {
        let base = CycleConfig::default();
        let mut cfg = base;
        cfg.omega_c = cfg.omega_h;
        assert!(cfg.validate().is_err());
        let cfg = base.with_populations(0.4, 1.2);
        assert!(cfg.validate().is_err());
        let cfg = base.with_times(-1.0, 10.0);
        assert!(cfg.validate().is_err());
        let mut cfg = base;
        cfg.fixed_point_tol = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn serde_rejects_unknown_keys() {
        let ok: CycleConfig = serde_json::from_str(r#"{"pe_c": 0.25}"#).unwrap();
        assert_eq!(ok.pe_c, 0.25);
        assert_eq!(ok.pe_h, 0.80);
        assert!(serde_json::from_str::<CycleConfig>(r#"{"pe_x": 0.25}"#).is_err());
    }

    #[test]
    fn regime_parsing() {
        assert_eq!("positive".parse::<Regime>().unwrap(), Regime::Positive);
        assert!("hot".parse::<Regime>().is_err());
    }
}
