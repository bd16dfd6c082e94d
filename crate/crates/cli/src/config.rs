// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! TOML run configuration and `--set key=value` overrides.

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use otto_dbn::cycle::{CycleConfig, Regime};
use otto_dbn::scan::grid::{self, DEFAULT_POPULATION_COUNT, DEFAULT_RESET_TAU_ISO};
use otto_dbn::scan::{Axis, Spacing};
use otto_dbn::tpm::TpmCycle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl AxisConfig {
    fn from_axis(a: Axis) -> Self {
        AxisConfig {
            min: a.min,
            max: a.max,
            count: a.count,
            spacing: a.spacing,
        }
    }

    pub fn axis(&self, name: &str) -> Axis {
        Axis {
            name: name.to_string(),
            min: self.min,
            max: self.max,
            count: self.count,
            spacing: self.spacing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridsConfig {
    pub tau_drive: AxisConfig,
    pub tau_iso: AxisConfig,
    pub pe_c: AxisConfig,
    pub pe_h_positive: AxisConfig,
    pub pe_h_inverted: AxisConfig,
    /// Isochore duration of the ideal-reset population scans.
    pub reset_tau_iso: f64,
    /// Fixed isochore duration of the DBN-TPM drive-time scan.
    pub tpm_tau_iso: f64,
    pub tpm_cycle: TpmCycle,
    /// Violation threshold of the bound maps.
    pub bound_tol: f64,
}

impl Default for GridsConfig {
    fn default() -> Self {
        let (pe_c, pe_h_positive) = grid::population_axes(Regime::Positive, DEFAULT_POPULATION_COUNT);
        let (_, pe_h_inverted) = grid::population_axes(Regime::Inverted, DEFAULT_POPULATION_COUNT);
        GridsConfig {
            tau_drive: AxisConfig::from_axis(grid::tau_drive_axis()),
            tau_iso: AxisConfig::from_axis(grid::tau_iso_axis()),
            pe_c: AxisConfig::from_axis(pe_c),
            pe_h_positive: AxisConfig::from_axis(pe_h_positive),
            pe_h_inverted: AxisConfig::from_axis(pe_h_inverted),
            reset_tau_iso: DEFAULT_RESET_TAU_ISO,
            tpm_tau_iso: 100.0,
            tpm_cycle: TpmCycle::Dephased,
            bound_tol: 1e-10,
        }
    }
}

impl GridsConfig {
    pub fn pe_h(&self, regime: Regime) -> Axis {
        match regime {
            Regime::Positive => self.pe_h_positive.axis("pe_h"),
            Regime::Inverted => self.pe_h_inverted.axis("pe_h"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub cycle: CycleConfig,
    pub grids: GridsConfig,
    /// Output root; `--out` and `OTTO_DBN_OUT` take precedence.
    pub output: String,
    /// Worker threads; 0 uses every logical core.
    pub workers: usize,
    /// Reserved; every pipeline is deterministic.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cycle: CycleConfig::default(),
            grids: GridsConfig::default(),
            output: "out".to_string(),
            workers: 0,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Applies one `dotted.key=value` override. The key must already exist.
    pub fn apply_override(&mut self, spec: &str) -> anyhow::Result<()> {
        let (key, raw) = spec
            .split_once('=')
            .ok_or_else(|| anyhow!("override {spec:?} is not of the form key=value"))?;
        let key = key.trim();
        let mut root = toml::Value::try_from(&*self)?;
        let mut slot = &mut root;
        for part in key.split('.') {
            slot = slot
                .get_mut(part)
                .ok_or_else(|| anyhow!("unknown configuration key {key:?}"))?;
        }
        let new = parse_value(raw.trim());
        *slot = match (&*slot, new) {
            (toml::Value::Float(_), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
            (toml::Value::Table(_), _) => bail!("{key:?} is a table; set one of its fields instead"),
            (_, v) => v,
        };
        *self = root
            .try_into()
            .with_context(|| format!("invalid value for {key:?}: {raw:?}"))?;
        Ok(())
    }
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::default();
        let back: RunConfig = toml::from_str(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(c.grids.tau_drive.count, 80);
        assert_eq!(c.grids.tau_iso.count, 100);
        assert_eq!(c.cycle.gamma_h, 1e-3);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
        assert!(toml::from_str::<RunConfig>("[cycle]\npe_x = 0.1").is_err());
        let mut c = RunConfig::default();
        assert!(c.apply_override("cycle.pe_x=0.1").is_err());
        assert!(c.apply_override("cycle.pe_c").is_err());
    }

    #[test]
    fn overrides_parse_and_coerce() {
        let mut c = RunConfig::default();
        c.apply_override("cycle.pe_c=0.4").unwrap();
        c.apply_override("cycle.tau_drive = 35").unwrap();
        c.apply_override("grids.tau_drive.count=5").unwrap();
        c.apply_override("grids.tpm_cycle=coherent").unwrap();
        c.apply_override("grids.tau_iso.spacing=\"linear\"").unwrap();
        assert_eq!(c.cycle.pe_c, 0.4);
        assert_eq!(c.cycle.tau_drive, 35.0);
        assert_eq!(c.grids.tau_drive.count, 5);
        assert_eq!(c.grids.tpm_cycle, TpmCycle::Coherent);
        assert_eq!(c.grids.tau_iso.spacing, Spacing::Linear);
        assert!(c.apply_override("grids.tau_drive.count=many").is_err());
        assert!(c.apply_override("grids=1").is_err());
    }
}
