// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps over the population and time planes.
//!
//! Cells are independent limit-cycle solves run on a rayon pool; results are
//! collected in grid order regardless of completion order, so a scan is
//! deterministic for any worker count.

pub mod grid;
pub mod io;
pub mod points;
pub mod table;

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::cycle::bath::bath_channel;
use crate::cycle::drive::propagate_unitary_with_steps;
use crate::cycle::{exact_cycle_energetics, find_limit_cycle, Bath, CornerSet, CycleConfig, CycleEnergetics, Stroke, StrokeMaps};
use crate::dbn::{path_distribution, DbnResult, DbnSummary};
use crate::error::{OttoError, Result};
use crate::numeric::relative_discrepancy;
use crate::observables::{bound_delta, coherence_rel, friction_classifier, BoundDelta, ObservableRecord};
use crate::quantum::{ComplexMatrix2, Superoperator};

pub use grid::{Axis, GridSpec, ScanKind, Spacing};
pub use points::{
    bound_scan, coherence_markers, extract_operating_points, BoundMaps, CoherenceMarkers, OperatingPoint,
    OperatingPoints,
};
pub use table::{CellStatus, Provenance, ScanRow, ScanTable};

/// Everything computed at one operating point.
#[derive(Debug, Clone)]
pub struct PointEvaluation {
    pub cfg: CycleConfig,
    pub maps: StrokeMaps,
    pub corners: CornerSet,
    pub exact: CycleEnergetics,
    pub dbn: DbnResult,
    pub summary: DbnSummary,
    pub bounds: BoundDelta,
    pub record: ObservableRecord,
}

impl PointEvaluation {
    pub fn dbn_deviation(&self) -> [f64; 3] {
        [
            relative_discrepancy(self.summary.mean_work, self.exact.mean_work),
            relative_discrepancy(self.summary.mean_qh, self.exact.mean_qh),
            relative_discrepancy(self.summary.mean_qc, self.exact.mean_qc),
        ]
    }

    pub fn row(&self, index: Vec<usize>) -> ScanRow {
        let c = &self.cfg;
        ScanRow {
            index,
            pe_c: c.pe_c,
            pe_h: c.pe_h,
            tau_drive: c.tau_drive,
            tau_h: c.tau_h,
            tau_c: c.tau_c,
            tau_cycle: c.tau_cycle(),
            status: CellStatus::Ok,
            iterations: self.corners.iterations,
            record: self.record,
            dbn_deviation: self.dbn_deviation(),
            first_law: self.exact.first_law_sum(),
            friction: friction_classifier(c.pe_c, c.pe_h, c.omega_c, c.omega_h),
            message: None,
        }
    }
}

/// Full evaluation on prebuilt stroke maps.
pub fn evaluate_with_maps(cfg: &CycleConfig, maps: StrokeMaps) -> Result<PointEvaluation> {
    let corners = find_limit_cycle(cfg, &maps)?;
    let exact = exact_cycle_energetics(&corners);
    let dbn = path_distribution(&corners, &maps)?;
    let summary = dbn.distribution.summary()?;
    let bounds = bound_delta(&corners, cfg)?;
    let coh = coherence_rel(&corners.states[2], &corners.hamiltonians[2])?;
    let record = ObservableRecord::new(&exact, &summary, cfg.tau_cycle(), coh, bounds);
    Ok(PointEvaluation {
        cfg: *cfg,
        maps,
        corners,
        exact,
        dbn,
        summary,
        bounds,
        record,
    })
}

pub fn evaluate_point(cfg: &CycleConfig) -> Result<PointEvaluation> {
    evaluate_with_maps(cfg, StrokeMaps::build(cfg)?)
}

fn failed_row(cfg: &CycleConfig, index: Vec<usize>, err: &OttoError) -> ScanRow {
    let status = if err.is_convergence_failure() {
        CellStatus::NonConverged
    } else {
        CellStatus::Failed
    };
    let iterations = match err {
        OttoError::NonConvergence { iterations, .. } => *iterations,
        _ => 0,
    };
    ScanRow {
        index,
        pe_c: cfg.pe_c,
        pe_h: cfg.pe_h,
        tau_drive: cfg.tau_drive,
        tau_h: cfg.tau_h,
        tau_c: cfg.tau_c,
        tau_cycle: cfg.tau_cycle(),
        status,
        iterations,
        record: table::nan_record(),
        dbn_deviation: [f64::NAN; 3],
        first_law: f64::NAN,
        friction: friction_classifier(cfg.pe_c, cfg.pe_h, cfg.omega_c, cfg.omega_h),
        message: Some(err.to_string()),
    }
}

/// Worker-pool settings; `workers = 0` uses the rayon default (logical cores).
#[derive(Debug, Clone, Copy, Default)]
pub struct ScanOptions {
    pub workers: usize,
}

impl ScanOptions {
    pub fn with_workers(workers: usize) -> Self {
        ScanOptions { workers }
    }

    fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<(T, usize)> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| OttoError::config(format!("cannot start worker pool: {e}")))?;
        let n = pool.current_num_threads();
        Ok((pool.install(f), n))
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// SHA-256 hex digest of the canonical JSON of `(base, grid, extra)`.
pub fn config_hash(base: &CycleConfig, grid: &GridSpec, extra: &serde_json::Value) -> String {
    let json = serde_json::to_string(&(base, grid, extra)).unwrap_or_default();
    Sha256::digest(json.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn assemble(
    grid: GridSpec,
    base: CycleConfig,
    extra: serde_json::Value,
    rows: Vec<ScanRow>,
    started: f64,
    clock: Instant,
    workers: usize,
) -> ScanTable {
    debug_assert_eq!(rows.len(), grid.cardinality());
    let provenance = Provenance {
        config_hash: config_hash(&base, &grid, &extra),
        started_unix: started,
        finished_unix: unix_now(),
        wall_seconds: clock.elapsed().as_secs_f64(),
        workers,
        total_iterations: rows.iter().map(|r| r.iterations as u64).sum(),
        max_iterations: rows.iter().map(|r| r.iterations).max().unwrap_or(0),
        non_ok_cells: rows.iter().filter(|r| r.status != CellStatus::Ok).count(),
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    ScanTable {
        grid,
        base,
        rows,
        provenance,
    }
}

type UnitaryPair = (ComplexMatrix2, ComplexMatrix2);

fn drive_cache(base: &CycleConfig, tau_drive: &[f64]) -> Vec<UnitaryPair> {
    tau_drive
        .par_iter()
        .map(|&td| {
            let cfg = CycleConfig {
                tau_drive: td,
                ..*base
            };
            let n = cfg.n_steps_drive;
            (
                propagate_unitary_with_steps(Stroke::Compression, &cfg, n),
                propagate_unitary_with_steps(Stroke::Expansion, &cfg, n),
            )
        })
        .collect()
}

fn bath_pair(cfg: &CycleConfig) -> Result<(Superoperator, Superoperator)> {
    Ok((bath_channel(Bath::Hot, cfg)?, bath_channel(Bath::Cold, cfg)?))
}

/// Scan over `(τ_drive, τ_iso)` with `τ_h = τ_c = τ_iso` at the base
/// populations.
pub fn time_scan(base: &CycleConfig, tau_drive: &Axis, tau_iso: &Axis, opts: &ScanOptions) -> Result<ScanTable> {
    let grid = GridSpec::time_plane(tau_drive.clone(), tau_iso.clone());
    grid.validate()?;
    base.validate()?;
    let (td, ti) = (tau_drive.values(), tau_iso.values());
    let started = unix_now();
    let clock = Instant::now();
    let (rows, workers) = opts.run(|| -> Result<Vec<ScanRow>> {
        let unitaries = drive_cache(base, &td);
        let baths: Vec<_> = ti
            .par_iter()
            .map(|&t| bath_pair(&(*base).with_times(base.tau_drive, t)))
            .collect::<Result<_>>()?;
        Ok((0..grid.cardinality())
            .into_par_iter()
            .map(|k| {
                let index = grid.unravel(k);
                let (i, j) = (index[0], index[1]);
                let cfg = (*base).with_times(td[i], ti[j]);
                let (hot, cold) = baths[j];
                StrokeMaps::from_parts(&cfg, &unitaries[i].0, &unitaries[i].1, hot, cold)
                    .and_then(|maps| evaluate_with_maps(&cfg, maps))
                    .map(|e| e.row(index.clone()))
                    .unwrap_or_else(|e| failed_row(&cfg, index, &e))
            })
            .collect())
    })?;
    Ok(assemble(grid, *base, serde_json::Value::Null, rows?, started, clock, workers))
}

/// Scan along `τ_drive` at fixed `τ_h = τ_c = tau_iso`.
pub fn drive_line_scan(base: &CycleConfig, tau_drive: &Axis, tau_iso: f64, opts: &ScanOptions) -> Result<ScanTable> {
    let grid = GridSpec::tau_drive_line(tau_drive.clone());
    grid.validate()?;
    base.validate()?;
    let td = tau_drive.values();
    let started = unix_now();
    let clock = Instant::now();
    let (rows, workers) = opts.run(|| {
        td.par_iter()
            .enumerate()
            .map(|(i, &t)| {
                let cfg = (*base).with_times(t, tau_iso);
                evaluate_point(&cfg)
                    .map(|e| e.row(vec![i]))
                    .unwrap_or_else(|e| failed_row(&cfg, vec![i], &e))
            })
            .collect::<Vec<_>>()
    })?;
    let extra = serde_json::json!({ "tau_iso": tau_iso });
    Ok(assemble(grid, *base, extra, rows, started, clock, workers))
}

/// Index of the best drive time at fixed populations: the largest power among
/// engine points, or among all converged points when none is an engine.
/// Earlier (shorter) drive times win ties.
fn best_drive_index(
    cfg: &CycleConfig,
    td: &[f64],
    unitaries: &[UnitaryPair],
    hot: &Superoperator,
    cold: &Superoperator,
) -> Option<usize> {
    let mut best_engine: Option<(usize, f64)> = None;
    let mut best_any: Option<(usize, f64)> = None;
    for (i, &t) in td.iter().enumerate() {
        let c = CycleConfig {
            tau_drive: t,
            ..*cfg
        };
        let Ok(maps) = StrokeMaps::from_parts(&c, &unitaries[i].0, &unitaries[i].1, *hot, *cold) else {
            continue;
        };
        let Ok(corners) = find_limit_cycle(&c, &maps) else {
            continue;
        };
        let e = exact_cycle_energetics(&corners);
        let p = -e.mean_work / c.tau_cycle();
        let better = |b: &Option<(usize, f64)>| b.is_none_or(|(_, q)| p > q);
        if e.is_engine() && better(&best_engine) {
            best_engine = Some((i, p));
        }
        if better(&best_any) {
            best_any = Some((i, p));
        }
    }
    best_engine.or(best_any).map(|(i, _)| i)
}

/// Evaluation at the drive time from `tau_drive` with the largest power,
/// engine points first.
pub fn optimize_drive(cfg: &CycleConfig, tau_drive: &Axis) -> Result<PointEvaluation> {
    tau_drive.validate()?;
    cfg.validate()?;
    let td = tau_drive.values();
    let unitaries = drive_cache(cfg, &td);
    let (hot, cold) = bath_pair(cfg)?;
    let best = best_drive_index(cfg, &td, &unitaries, &hot, &cold).ok_or(OttoError::NonConvergence {
        iterations: cfg.max_cycle_iters,
        residual: f64::NAN,
    })?;
    let c = CycleConfig {
        tau_drive: td[best],
        ..*cfg
    };
    let maps = StrokeMaps::from_parts(&c, &unitaries[best].0, &unitaries[best].1, hot, cold)?;
    evaluate_with_maps(&c, maps)
}

/// Scan over `(p_e^c, p_e^h)` at fixed `τ_h = τ_c = tau_iso`; each cell is
/// evaluated at the drive time from `tau_drive` that maximizes the power.
pub fn population_scan(
    base: &CycleConfig,
    pe_c: &Axis,
    pe_h: &Axis,
    tau_drive: &Axis,
    tau_iso: f64,
    opts: &ScanOptions,
) -> Result<ScanTable> {
    let grid = GridSpec::population_plane(pe_c.clone(), pe_h.clone(), tau_drive.clone());
    grid.validate()?;
    base.validate()?;
    let (pc, ph, td) = (pe_c.values(), pe_h.values(), tau_drive.values());
    let started = unix_now();
    let clock = Instant::now();
    let (rows, workers) = opts.run(|| {
        let unitaries = drive_cache(base, &td);
        (0..grid.cardinality())
            .into_par_iter()
            .map(|k| {
                let index = grid.unravel(k);
                let cfg = (*base)
                    .with_populations(pc[index[0]], ph[index[1]])
                    .with_times(td[0], tau_iso);
                let result = (|| -> Result<ScanRow> {
                    cfg.validate()?;
                    let (hot, cold) = bath_pair(&cfg)?;
                    let best = best_drive_index(&cfg, &td, &unitaries, &hot, &cold).ok_or({
                        OttoError::NonConvergence {
                            iterations: cfg.max_cycle_iters,
                            residual: f64::NAN,
                        }
                    })?;
                    let c = CycleConfig {
                        tau_drive: td[best],
                        ..cfg
                    };
                    let maps = StrokeMaps::from_parts(&c, &unitaries[best].0, &unitaries[best].1, hot, cold)?;
                    Ok(evaluate_with_maps(&c, maps)?.row(index.clone()))
                })();
                result.unwrap_or_else(|e| failed_row(&cfg, index, &e))
            })
            .collect::<Vec<_>>()
    })?;
    let extra = serde_json::json!({ "tau_iso": tau_iso });
    Ok(assemble(grid, *base, extra, rows, started, clock, workers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::Regime;

    #[test]
    fn small_time_scan_is_complete_and_deterministic() {
        let base = CycleConfig::default().with_regime(Regime::Inverted);
        let td = Axis::log("tau_drive", 20.0, 200.0, 3);
        let ti = Axis::log("tau_iso", 50.0, 5000.0, 4);
        let a = time_scan(&base, &td, &ti, &ScanOptions::with_workers(1)).unwrap();
        let b = time_scan(&base, &td, &ti, &ScanOptions::with_workers(3)).unwrap();
        assert_eq!(a.rows.len(), 12);
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.provenance.config_hash, b.provenance.config_hash);
        assert!(a.rows.iter().all(|r| r.status == CellStatus::Ok));
        assert!(a.max_first_law() < 1e-10);
        assert_eq!(a.at(&[1, 2]).unwrap().index, vec![1, 2]);
    }

    #[test]
    fn non_convergence_is_flagged_not_fatal() {
        let mut base = CycleConfig::default().with_regime(Regime::Inverted);
        base.max_cycle_iters = 3;
        let td = Axis::log("tau_drive", 20.0, 40.0, 2);
        let ti = Axis::log("tau_iso", 5.0, 5e4, 2);
        let t = time_scan(&base, &td, &ti, &ScanOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 4);
        let bad: Vec<_> = t.rows.iter().filter(|r| r.status == CellStatus::NonConverged).collect();
        assert!(!bad.is_empty());
        assert!(bad.iter().all(|r| !r.is_engine() && r.record.mean_work.is_nan()));
        assert_eq!(t.provenance.non_ok_cells, bad.len());
    }

    #[test]
    fn positive_diagonal_is_not_an_engine() {
        let base = CycleConfig::default();
        let td = Axis::log("tau_drive", 20.0, 5000.0, 8);
        let p = Axis::linear("pe", 0.1, 0.4, 4);
        let t = population_scan(&base, &p, &p, &td, 12_500.0, &ScanOptions::default()).unwrap();
        for i in 0..4 {
            assert!(!t.at(&[i, i]).unwrap().is_engine(), "diagonal cell {i}");
        }
        // cold-bath population well below the hot one is an engine
        assert!(t.at(&[0, 3]).unwrap().is_engine());
    }
}
