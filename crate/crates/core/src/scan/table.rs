// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use crate::cycle::CycleConfig;
use crate::observables::ObservableRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    NonConverged,
    Failed,
}

impl CellStatus {
    pub fn name(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::NonConverged => "non_converged",
            CellStatus::Failed => "failed",
        }
    }
}

/// One evaluated grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub index: Vec<usize>,
    pub pe_c: f64,
    pub pe_h: f64,
    pub tau_drive: f64,
    pub tau_h: f64,
    pub tau_c: f64,
    pub tau_cycle: f64,
    pub status: CellStatus,
    pub iterations: usize,
    pub record: ObservableRecord,
    /// Relative deviation of the DBN means from the exact ones, `[W, Q_h, Q_c]`.
    pub dbn_deviation: [f64; 3],
    /// `⟨W⟩ + ⟨Q_h⟩ + ⟨Q_c⟩`.
    pub first_law: f64,
    pub friction: f64,
    /// Error text for non-ok cells.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl ScanRow {
    pub fn is_engine(&self) -> bool {
        self.status == CellStatus::Ok && self.record.engine_flag
    }

    pub const HEADER: [&'static str; 33] = [
        "i",
        "j",
        "pe_c",
        "pe_h",
        "tau_drive",
        "tau_h",
        "tau_c",
        "tau_cycle",
        "status",
        "iterations",
        "engine_flag",
        "W",
        "sigma_W",
        "Qh",
        "sigma_Qh",
        "Qc",
        "sigma_Qc",
        "eta",
        "sigma_eta_reg",
        "P",
        "sigma_P",
        "phi_P",
        "R_P",
        "S_F",
        "coh_rel_rho3",
        "delta_bound_hot",
        "delta_bound_cold",
        "dbn_dev_W",
        "dbn_dev_Qh",
        "dbn_dev_Qc",
        "first_law",
        "friction",
        "phi_W",
    ];

    pub fn csv_fields(&self) -> Vec<String> {
        let f = |x: f64| format!("{x:e}");
        let r = &self.record;
        let idx = |d: usize| self.index.get(d).map(|i| i.to_string()).unwrap_or_default();
        vec![
            idx(0),
            idx(1),
            f(self.pe_c),
            f(self.pe_h),
            f(self.tau_drive),
            f(self.tau_h),
            f(self.tau_c),
            f(self.tau_cycle),
            self.status.name().to_string(),
            self.iterations.to_string(),
            (r.engine_flag as u8).to_string(),
            f(r.mean_work),
            f(r.sigma_work),
            f(r.mean_qh),
            f(r.sigma_qh),
            f(r.mean_qc),
            f(r.sigma_qc),
            f(r.eta),
            f(r.eta_reg_sigma),
            f(r.power),
            f(r.sigma_power),
            f(r.phi_p),
            f(r.reliability_p),
            f(r.score_f),
            f(r.coh_rel_rho3),
            f(r.bound_hot),
            f(r.bound_cold),
            f(self.dbn_deviation[0]),
            f(self.dbn_deviation[1]),
            f(self.dbn_deviation[2]),
            f(self.first_law),
            f(self.friction),
            f(r.phi_work()),
        ]
    }
}

/// Record with every field NaN and the engine flag off.
pub fn nan_record() -> ObservableRecord {
    let n = f64::NAN;
    ObservableRecord {
        mean_work: n,
        sigma_work: n,
        mean_qh: n,
        sigma_qh: n,
        mean_qc: n,
        sigma_qc: n,
        eta: n,
        eta_reg_sigma: n,
        power: n,
        sigma_power: n,
        phi_p: n,
        reliability_p: n,
        score_f: n,
        engine_flag: false,
        coh_rel_rho3: n,
        bound_hot: n,
        bound_cold: n,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the canonical JSON of base config and grid.
    pub config_hash: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub wall_seconds: f64,
    pub workers: usize,
    pub total_iterations: u64,
    pub max_iterations: usize,
    pub non_ok_cells: usize,
    pub crate_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub grid: GridSpec,
    pub base: CycleConfig,
    pub rows: Vec<ScanRow>,
    pub provenance: Provenance,
}

impl ScanTable {
    pub fn shape(&self) -> Vec<usize> {
        self.grid.shape()
    }

    /// Row at a multi-index (row-major).
    pub fn at(&self, index: &[usize]) -> Option<&ScanRow> {
        let shape = self.shape();
        if index.len() != shape.len() || index.iter().zip(&shape).any(|(i, n)| i >= n) {
            return None;
        }
        let k = index.iter().zip(&shape).fold(0, |acc, (i, n)| acc * n + i);
        self.rows.get(k)
    }

    pub fn engine_rows(&self) -> impl Iterator<Item = (usize, &ScanRow)> {
        self.rows.iter().enumerate().filter(|(_, r)| r.is_engine())
    }

    pub fn max_dbn_deviation(&self) -> [f64; 3] {
        let mut m = [0.0f64; 3];
        for r in self.rows.iter().filter(|r| r.status == CellStatus::Ok) {
            for d in 0..3 {
                if r.dbn_deviation[d].is_finite() {
                    m[d] = m[d].max(r.dbn_deviation[d]);
                }
            }
        }
        m
    }

    pub fn max_first_law(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.status == CellStatus::Ok)
            .map(|r| r.first_law.abs())
            .fold(0.0, f64::max)
    }
}
