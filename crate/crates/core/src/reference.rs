// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Embedded reference values for the published operating-point tables and
//! side-by-side comparison against computed scans.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cycle::Regime;
use crate::numeric::relative_discrepancy;
use crate::observables::ObservableRecord;
use crate::scan::{CoherenceMarkers, OperatingPoint, OperatingPoints, ScanTable};

const REFERENCE_JSON: &str = include_str!("../data/reference.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceData {
    pub version: u32,
    pub table1: PopulationTable,
    pub table2: TimeTable,
    pub table3: CoherenceTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationTable {
    pub tol: f64,
    pub rows: Vec<PopulationRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationRow {
    pub regime: String,
    /// Operating points that coincide at this cell; values are compared at the first.
    pub labels: Vec<String>,
    pub pe_c: f64,
    pub pe_h: f64,
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeTable {
    pub tol: f64,
    /// Allowed coordinate offset in grid cells.
    pub cells: usize,
    pub regime: String,
    pub rows: Vec<TimeRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeRow {
    pub label: String,
    pub tau_drive: f64,
    pub tau_iso: f64,
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceTable {
    pub tol: f64,
    pub rows: Vec<CoherenceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceRow {
    pub regime: String,
    pub max: f64,
    pub at_mp: f64,
    pub at_me: f64,
}

pub fn reference() -> &'static ReferenceData {
    static DATA: OnceLock<ReferenceData> = OnceLock::new();
    DATA.get_or_init(|| serde_json::from_str(REFERENCE_JSON).expect("embedded reference data is valid"))
}

/// One computed-vs-reference entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub table: String,
    pub row: String,
    pub quantity: String,
    pub reference: f64,
    pub computed: f64,
    /// Relative deviation, or cell distance for coordinates.
    pub deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Comparison {
    fn relative(table: &str, row: &str, quantity: &str, reference: f64, computed: f64, tol: f64) -> Self {
        let deviation = relative_discrepancy(computed, reference);
        Comparison {
            table: table.to_string(),
            row: row.to_string(),
            quantity: quantity.to_string(),
            reference,
            computed,
            deviation,
            tol,
            pass: deviation <= tol,
        }
    }
}

pub fn all_pass(c: &[Comparison]) -> bool {
    !c.is_empty() && c.iter().all(|x| x.pass)
}

/// Record value under a reference key; work is compared in magnitude.
pub fn quantity(r: &ObservableRecord, key: &str) -> Option<f64> {
    Some(match key {
        "W" => r.mean_work.abs(),
        "sigma_W" => r.sigma_work,
        "eta" => r.eta,
        "sigma_eta_reg" => r.eta_reg_sigma,
        "P" => r.power,
        "phi_P" => r.phi_p,
        _ => return None,
    })
}

fn defining_quantity(label: &str) -> &'static str {
    match label {
        "MW" => "W",
        "MP" => "P",
        "ME" => "eta",
        "MS" => "phi_P",
        _ => "P",
    }
}

fn point<'a>(points: Option<&'a OperatingPoints>, label: &str) -> Option<&'a OperatingPoint> {
    points.and_then(|p| p.get(label))
}

fn compare_values(
    table: &str,
    row: &str,
    values: &BTreeMap<String, f64>,
    at: Option<&OperatingPoint>,
    tol: f64,
) -> Vec<Comparison> {
    values
        .iter()
        .map(|(k, &v)| {
            let computed = at.and_then(|p| quantity(&p.record, k)).unwrap_or(f64::NAN);
            Comparison::relative(table, row, k, v, computed, tol)
        })
        .collect()
}

/// Ideal-reset population-scan table for one regime.
pub fn compare_table1(regime: Regime, points: Option<&OperatingPoints>) -> Vec<Comparison> {
    let t = &reference().table1;
    let mut out = Vec::new();
    for row in t.rows.iter().filter(|r| r.regime == regime.name()) {
        let name = row.labels.join("=");
        out.extend(compare_values("table1", &name, &row.values, point(points, &row.labels[0]), t.tol));
        // coinciding labels must reach the same optimum value
        for label in &row.labels[1..] {
            let q = defining_quantity(label);
            let computed = point(points, label)
                .and_then(|p| quantity(&p.record, q))
                .unwrap_or(f64::NAN);
            out.push(Comparison::relative("table1", &name, &format!("{q}@{label}"), row.values[q], computed, t.tol));
        }
    }
    out
}

/// Finite-time table: values within tolerance and coordinates within the
/// allowed number of grid cells.
pub fn compare_table2(table: &ScanTable, points: Option<&OperatingPoints>) -> Vec<Comparison> {
    let t = &reference().table2;
    let mut out = Vec::new();
    for row in &t.rows {
        let at = point(points, &row.label);
        out.extend(compare_values("table2", &row.label, &row.values, at, t.tol));
        for (d, (name, reference)) in [("tau_drive", row.tau_drive), ("tau_iso", row.tau_iso)].into_iter().enumerate() {
            let (computed, deviation) = match (at, table.grid.axes.get(d)) {
                (Some(p), Some(axis)) => {
                    let want = axis.nearest_index(reference) as f64;
                    let got = p.index[d] as f64;
                    (axis.values()[p.index[d]], (want - got).abs())
                }
                _ => (f64::NAN, f64::NAN),
            };
            out.push(Comparison {
                table: "table2".into(),
                row: row.label.clone(),
                quantity: format!("{name}_cells"),
                reference,
                computed,
                deviation,
                tol: t.cells as f64,
                pass: deviation <= t.cells as f64,
            });
        }
    }
    out
}

/// Post-hot-stroke coherence markers of a time scan.
pub fn compare_table3(regime: Regime, markers: Option<&CoherenceMarkers>) -> Vec<Comparison> {
    let t = &reference().table3;
    let mut out = Vec::new();
    for row in t.rows.iter().filter(|r| r.regime == regime.name()) {
        let m = |f: fn(&CoherenceMarkers) -> f64| markers.map(f).unwrap_or(f64::NAN);
        out.push(Comparison::relative("table3", regime.name(), "max", row.max, m(|c| c.max), t.tol));
        out.push(Comparison::relative("table3", regime.name(), "at_MP", row.at_mp, m(|c| c.at_mp), t.tol));
        out.push(Comparison::relative("table3", regime.name(), "at_ME", row.at_me, m(|c| c.at_me), t.tol));
    }
    out
}
