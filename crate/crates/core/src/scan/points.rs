// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::table::{CellStatus, ScanRow, ScanTable};
use crate::observables::ObservableRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub label: String,
    /// Flat row index in the table.
    pub row: usize,
    pub index: Vec<usize>,
    pub pe_c: f64,
    pub pe_h: f64,
    pub tau_drive: f64,
    pub tau_iso: f64,
    pub tau_cycle: f64,
    pub record: ObservableRecord,
}

impl OperatingPoint {
    fn from_row(label: &str, row: usize, r: &ScanRow) -> Self {
        OperatingPoint {
            label: label.to_string(),
            row,
            index: r.index.clone(),
            pe_c: r.pe_c,
            pe_h: r.pe_h,
            tau_drive: r.tau_drive,
            tau_iso: r.tau_h,
            tau_cycle: r.tau_cycle,
            record: r.record,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoints {
    pub mw: OperatingPoint,
    pub mp: OperatingPoint,
    pub me: OperatingPoint,
    pub ms: OperatingPoint,
    pub to: OperatingPoint,
}

impl OperatingPoints {
    pub fn all(&self) -> [&OperatingPoint; 5] {
        [&self.mw, &self.mp, &self.me, &self.ms, &self.to]
    }

    pub fn get(&self, label: &str) -> Option<&OperatingPoint> {
        self.all().into_iter().find(|p| p.label == label)
    }
}

/// Engine row maximizing `key`; ties go to the shorter cycle, then to the
/// lower grid index. Non-finite keys are skipped.
fn argmax(table: &ScanTable, key: impl Fn(&ObservableRecord) -> f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, r) in table.engine_rows() {
        let v = key(&r.record);
        if !v.is_finite() {
            continue;
        }
        let take = match best {
            None => true,
            Some((b, bv)) => v > bv || (v == bv && r.tau_cycle < table.rows[b].tau_cycle),
        };
        if take {
            best = Some((k, v));
        }
    }
    best.map(|(k, _)| k)
}

/// MW, MP, ME, MS and TO over the engine rows; `None` when the table has no
/// engine point.
pub fn extract_operating_points(table: &ScanTable) -> Option<OperatingPoints> {
    let pick = |label: &str, key: &dyn Fn(&ObservableRecord) -> f64| {
        argmax(table, key).map(|k| OperatingPoint::from_row(label, k, &table.rows[k]))
    };
    Some(OperatingPoints {
        mw: pick("MW", &|r| r.mean_work.abs())?,
        mp: pick("MP", &|r| r.power)?,
        me: pick("ME", &|r| r.eta)?,
        ms: pick("MS", &|r| -r.phi_p)?,
        to: pick("TO", &|r| r.score_f)?,
    })
}

/// Relative coherence after the hot stroke: engine-region extrema and values
/// at MP and ME.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceMarkers {
    pub max: f64,
    pub max_row: usize,
    pub min: f64,
    pub min_row: usize,
    pub at_mp: f64,
    pub at_me: f64,
}

pub fn coherence_markers(table: &ScanTable, points: &OperatingPoints) -> Option<CoherenceMarkers> {
    let k = argmax(table, |r| r.coh_rel_rho3)?;
    let m = argmax(table, |r| -r.coh_rel_rho3)?;
    Some(CoherenceMarkers {
        max: table.rows[k].record.coh_rel_rho3,
        max_row: k,
        min: table.rows[m].record.coh_rel_rho3,
        min_row: m,
        at_mp: points.mp.record.coh_rel_rho3,
        at_me: points.me.record.coh_rel_rho3,
    })
}

/// Binary violation maps of the bath-stroke `C + D` deltas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundMaps {
    pub shape: Vec<usize>,
    pub tol: f64,
    /// 1 where `Δ > tol` (or the delta is infinite), per row.
    pub hot: Vec<u8>,
    pub cold: Vec<u8>,
    pub engine: Vec<bool>,
    /// Engine cells with a non-engine neighbour or on the grid edge.
    pub band: Vec<bool>,
    /// Axis coordinates of the band cells.
    pub contour: Vec<Vec<f64>>,
    pub violations_hot: usize,
    pub violations_cold: usize,
    /// Largest engine-point deltas, `[hot, cold]`.
    pub max_engine: [f64; 2],
    pub max_band: [f64; 2],
    pub max_interior: [f64; 2],
}

impl BoundMaps {
    pub fn clean(&self) -> bool {
        self.violations_hot == 0 && self.violations_cold == 0
    }
}

fn violates(delta: f64, tol: f64) -> u8 {
    (delta > tol || delta == f64::INFINITY) as u8
}

pub fn bound_scan(table: &ScanTable, tol: f64) -> BoundMaps {
    let shape = table.shape();
    let (n0, n1) = (shape[0], shape.get(1).copied().unwrap_or(1));
    let engine: Vec<bool> = table.rows.iter().map(|r| r.is_engine()).collect();
    let at = |i: isize, j: isize| -> Option<bool> {
        if i < 0 || j < 0 || i as usize >= n0 || j as usize >= n1 {
            None
        } else {
            Some(engine[i as usize * n1 + j as usize])
        }
    };
    let mut band = vec![false; table.rows.len()];
    for i in 0..n0 {
        for j in 0..n1 {
            let k = i * n1 + j;
            if !engine[k] {
                continue;
            }
            let (i, j) = (i as isize, j as isize);
            let mut nb = vec![at(i - 1, j), at(i + 1, j)];
            if n1 > 1 {
                nb.extend([at(i, j - 1), at(i, j + 1)]);
            }
            band[k] = nb.iter().any(|n| *n != Some(true));
        }
    }
    let axes: Vec<Vec<f64>> = table.grid.axes.iter().map(|a| a.values()).collect();
    let fold = |pred: &dyn Fn(usize) -> bool| {
        let mut m = [f64::NEG_INFINITY; 2];
        for (k, r) in table.rows.iter().enumerate() {
            if pred(k) {
                m[0] = m[0].max(r.record.bound_hot);
                m[1] = m[1].max(r.record.bound_cold);
            }
        }
        m
    };
    let ok = |r: &ScanRow| r.status == CellStatus::Ok;
    let hot: Vec<u8> = table
        .rows
        .iter()
        .map(|r| if ok(r) { violates(r.record.bound_hot, tol) } else { 0 })
        .collect();
    let cold: Vec<u8> = table
        .rows
        .iter()
        .map(|r| if ok(r) { violates(r.record.bound_cold, tol) } else { 0 })
        .collect();
    BoundMaps {
        contour: (0..table.rows.len())
            .filter(|&k| band[k])
            .map(|k| {
                let idx = &table.rows[k].index;
                idx.iter().enumerate().map(|(d, &i)| axes[d][i]).collect()
            })
            .collect(),
        violations_hot: hot.iter().map(|&v| v as usize).sum(),
        violations_cold: cold.iter().map(|&v| v as usize).sum(),
        max_engine: fold(&|k| engine[k]),
        max_band: fold(&|k| band[k]),
        max_interior: fold(&|k| engine[k] && !band[k]),
        shape,
        tol,
        hot,
        cold,
        engine,
        band,
    }
}
