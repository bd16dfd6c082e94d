// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::cycle::Regime;
use crate::error::{OttoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// One grid axis; endpoints are reproduced exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Self {
        Axis {
            name: name.to_string(),
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(name: &str, min: f64, max: f64, count: usize) -> Self {
        Axis {
            name: name.to_string(),
            min,
            max,
            count,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(OttoError::config(format!("axis {} needs at least 2 points", self.name)));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min >= self.max {
            return Err(OttoError::config(format!(
                "axis {} needs finite bounds with min < max (got {}, {})",
                self.name, self.min, self.max
            )));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(OttoError::config(format!(
                "log axis {} needs positive bounds",
                self.name
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let s = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + s * (self.max - self.min),
                    Spacing::Log => {
                        let (a, b) = (self.min.log10(), self.max.log10());
                        10f64.powf(a + s * (b - a))
                    }
                }
            })
            .collect()
    }

    /// Index of the grid value closest to `x` (in log distance for log axes).
    pub fn nearest_index(&self, x: f64) -> usize {
        let vals = self.values();
        let dist = |v: f64| match self.spacing {
            Spacing::Linear => (v - x).abs(),
            Spacing::Log => (v.ln() - x.ln()).abs(),
        };
        (0..vals.len())
            .min_by(|&a, &b| dist(vals[a]).total_cmp(&dist(vals[b])))
            .unwrap_or(0)
    }
}

/// Default drive-time axis: 80 log points on `[20, 5000]`.
pub fn tau_drive_axis() -> Axis {
    Axis::log("tau_drive", 20.0, 5000.0, 80)
}

/// Default isochore axis: 100 log points on `[5, 5e4]`.
pub fn tau_iso_axis() -> Axis {
    Axis::log("tau_iso", 5.0, 5e4, 100)
}

/// Default population axes `(pe_c, pe_h)` for a regime.
pub fn population_axes(regime: Regime, count: usize) -> (Axis, Axis) {
    let pe_c = Axis::linear("pe_c", 0.05, 0.48, count);
    let hi = match regime {
        Regime::Positive => 0.48,
        Regime::Inverted => 0.98,
    };
    (pe_c, Axis::linear("pe_h", 0.05, hi, count))
}

pub const DEFAULT_POPULATION_COUNT: usize = 39;

/// Isochore duration used for the ideal-reset population scans.
pub const DEFAULT_RESET_TAU_ISO: f64 = 12_500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    PopulationPlane,
    TimePlane,
    TauDriveLine,
    BoundScan,
}

/// Outer axes of a scan plus, for population scans, the inner drive-time
/// search axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: ScanKind,
    pub axes: Vec<Axis>,
    pub search: Option<Axis>,
}

impl GridSpec {
    pub fn time_plane(tau_drive: Axis, tau_iso: Axis) -> Self {
        GridSpec {
            kind: ScanKind::TimePlane,
            axes: vec![tau_drive, tau_iso],
            search: None,
        }
    }

    pub fn population_plane(pe_c: Axis, pe_h: Axis, tau_drive: Axis) -> Self {
        GridSpec {
            kind: ScanKind::PopulationPlane,
            axes: vec![pe_c, pe_h],
            search: Some(tau_drive),
        }
    }

    pub fn tau_drive_line(tau_drive: Axis) -> Self {
        GridSpec {
            kind: ScanKind::TauDriveLine,
            axes: vec![tau_drive],
            search: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(OttoError::config("grid has no axes"));
        }
        for a in self.axes.iter().chain(self.search.iter()) {
            a.validate()?;
        }
        Ok(())
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn cardinality(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Row-major multi-index of flat index `k`.
    pub fn unravel(&self, mut k: usize) -> Vec<usize> {
        let shape = self.shape();
        let mut idx = vec![0; shape.len()];
        for d in (0..shape.len()).rev() {
            idx[d] = k % shape[d];
            k /= shape[d];
        }
        idx
    }
}
