// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

use serde_json::json;

use otto_dbn::cycle::{CycleConfig, Regime};
use otto_dbn::numeric::spearman;
use otto_dbn::observables::friction_zero_boundary;
use otto_dbn::reference::{all_pass, compare_table1, compare_table2, compare_table3, Comparison};
use otto_dbn::scan::{
    bound_scan, coherence_markers, drive_line_scan, evaluate_point, extract_operating_points, optimize_drive,
    population_scan, time_scan, OperatingPoints, ScanRow, ScanTable,
};
use otto_dbn::tpm::{dbn_tpm_scan, ComparisonRecord, TpmCycle};
use otto_dbn::validation::{run_validation, Fault, ValidationOptions};

use crate::context::{Context, Failure};
use crate::{ScanArg, Target};

const BOTH: [Regime; 2] = [Regime::Positive, Regime::Inverted];

fn regimes(ctx: &Context) -> Vec<Regime> {
    ctx.regime.map(|r| vec![r]).unwrap_or_else(|| BOTH.to_vec())
}

fn population_table(ctx: &Context, regime: Regime) -> Result<ScanTable, Failure> {
    let g = &ctx.cfg.grids;
    Ok(population_scan(
        &ctx.cfg.cycle,
        &g.pe_c.axis("pe_c"),
        &g.pe_h(regime),
        &g.tau_drive.axis("tau_drive"),
        g.reset_tau_iso,
        &ctx.scan_options(),
    )?)
}

fn time_table(ctx: &Context, base: &CycleConfig) -> Result<ScanTable, Failure> {
    let g = &ctx.cfg.grids;
    Ok(time_scan(
        base,
        &g.tau_drive.axis("tau_drive"),
        &g.tau_iso.axis("tau_iso"),
        &ctx.scan_options(),
    )?)
}

fn regime_cycle(ctx: &Context, regime: Regime) -> CycleConfig {
    ctx.cfg.cycle.with_regime(regime)
}

/// Table plus extracted points, with a short report on stdout.
fn write_scan(ctx: &mut Context, stem: &str, table: &ScanTable) -> Result<Option<OperatingPoints>, Failure> {
    ctx.write_table(&format!("{stem}.csv"), table)?;
    let points = extract_operating_points(table);
    let engine = table.engine_rows().count();
    let message = if points.is_none() { Some("no engine points") } else { None };
    ctx.write_json(
        &format!("{stem}_points.json"),
        &json!({ "points": points, "engine_cells": engine, "cells": table.rows.len(), "message": message }),
    )?;
    println!(
        "{stem}: {} cells, {engine} engine, {} not converged, {:.1} s",
        table.rows.len(),
        table.provenance.non_ok_cells,
        table.provenance.wall_seconds
    );
    match &points {
        Some(p) => {
            for q in p.all() {
                println!(
                    "  {:<2} pe=({:.3}, {:.3}) tau_drive={:<8.4} tau_iso={:<8.4} W={:+.4e} P={:.4e} eta={:.4} phi_P={:.4}",
                    q.label, q.pe_c, q.pe_h, q.tau_drive, q.tau_iso, q.record.mean_work, q.record.power, q.record.eta, q.record.phi_p
                );
            }
        }
        None => println!("  no engine points"),
    }
    Ok(points)
}

fn report_comparisons(ctx: &mut Context, stem: &str, comps: &[Comparison]) -> Result<(), Failure> {
    ctx.write_json(&format!("{stem}_comparison.json"), comps)?;
    for c in comps {
        println!(
            "  {} {:<8} {:<16} computed {:<12.5e} reference {:<12.5e} deviation {:.3e} (tol {}) {}",
            c.table,
            c.row,
            c.quantity,
            c.computed,
            c.reference,
            c.deviation,
            c.tol,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}

/// Under `--strict`: non-converged cells exit 3, failed comparisons exit 4.
fn strict_checks(ctx: &Context, tables: &[&ScanTable], comps: &[Comparison]) -> Result<(), Failure> {
    if !ctx.strict {
        return Ok(());
    }
    let bad: usize = tables.iter().map(|t| t.provenance.non_ok_cells).sum();
    if bad > 0 {
        return Err(Failure::Convergence(format!("{bad} cells did not converge")));
    }
    if !comps.is_empty() && !all_pass(comps) {
        let n = comps.iter().filter(|c| !c.pass).count();
        return Err(Failure::Strict(format!("{n} of {} comparisons out of tolerance", comps.len())));
    }
    Ok(())
}

pub fn reproduce(ctx: &mut Context, target: Target) -> Result<(), Failure> {
    let name = format!("{target:?}").to_lowercase();
    let mut tables = Vec::new();
    let mut comps = Vec::new();
    match target {
        Target::Table1 | Target::Fig2 => {
            for r in regimes(ctx) {
                let t = population_table(ctx, r)?;
                let points = write_scan(ctx, &format!("{name}_{}_population", r.name()), &t)?;
                if target == Target::Table1 {
                    comps.extend(compare_table1(r, points.as_ref()));
                }
                tables.push(t);
            }
            if target == Target::Fig2 {
                let c = &ctx.cfg.cycle;
                let rows = (0..=100)
                    .map(|k| {
                        let pe_c = k as f64 / 100.0;
                        let b = friction_zero_boundary(pe_c, c.omega_c, c.omega_h)?;
                        Ok(vec![pe_c, b.pe_h, b.physical as u8 as f64])
                    })
                    .collect::<Result<Vec<_>, otto_dbn::OttoError>>()?;
                ctx.write_numeric_csv("fig2_friction_boundary.csv", &["pe_c", "pe_h", "physical"], rows)?;
            }
        }
        Target::Table2 | Target::Fig3 | Target::Fig5 | Target::Fig8 => {
            let r = match target {
                Target::Fig5 => Regime::Positive,
                _ => Regime::Inverted,
            };
            let t = time_table(ctx, &regime_cycle(ctx, r))?;
            let points = write_scan(ctx, &format!("{name}_{}_time", r.name()), &t)?;
            if target == Target::Table2 {
                comps.extend(compare_table2(&t, points.as_ref()));
            }
            if target == Target::Fig8 {
                bound_outputs(ctx, &t)?;
            }
            tables.push(t);
        }
        Target::Table3 | Target::Fig6 => {
            let mut markers = Vec::new();
            for r in regimes(ctx) {
                let t = time_table(ctx, &regime_cycle(ctx, r))?;
                let points = write_scan(ctx, &format!("{name}_{}_time", r.name()), &t)?;
                let m = points.as_ref().and_then(|p| coherence_markers(&t, p));
                let coords = |k: usize| {
                    let row: &ScanRow = &t.rows[k];
                    json!({ "tau_drive": row.tau_drive, "tau_iso": row.tau_h, "index": row.index })
                };
                markers.push(json!({
                    "regime": r.name(),
                    "markers": m,
                    "max_at": m.map(|m| coords(m.max_row)),
                    "min_at": m.map(|m| coords(m.min_row)),
                    "mp_at": points.as_ref().map(|p| coords(p.mp.row)),
                    "me_at": points.as_ref().map(|p| coords(p.me.row)),
                }));
                if target == Target::Table3 {
                    comps.extend(compare_table3(r, m.as_ref()));
                }
                tables.push(t);
            }
            ctx.write_json(&format!("{name}_coherence_markers.json"), &markers)?;
        }
        Target::Fig7 => {
            let base = regime_cycle(ctx, Regime::Inverted);
            tpm_outputs(ctx, "fig7_dbn_tpm", &base, None)?;
        }
    }
    if !comps.is_empty() {
        report_comparisons(ctx, &name, &comps)?;
    }
    ctx.finish(&format!("reproduce_{name}"), &format!("reproduce {name}"))?;
    let refs: Vec<&ScanTable> = tables.iter().collect();
    strict_checks(ctx, &refs, &comps)
}

fn bound_outputs(ctx: &mut Context, table: &ScanTable) -> Result<(), Failure> {
    let maps = bound_scan(table, ctx.cfg.grids.bound_tol);
    let rows = table
        .rows
        .iter()
        .enumerate()
        .map(|(k, r)| {
            vec![
                r.index[0] as f64,
                r.index.get(1).copied().unwrap_or(0) as f64,
                r.tau_drive,
                r.tau_h,
                maps.engine[k] as u8 as f64,
                maps.band[k] as u8 as f64,
                r.record.bound_hot,
                r.record.bound_cold,
                maps.hot[k] as f64,
                maps.cold[k] as f64,
            ]
        })
        .collect();
    ctx.write_numeric_csv(
        "fig8_bounds.csv",
        &["i", "j", "tau_drive", "tau_iso", "engine_flag", "band", "delta_hot", "delta_cold", "violation_hot", "violation_cold"],
        rows,
    )?;
    ctx.write_numeric_csv("fig8_contour.csv", &["tau_drive", "tau_iso"], maps.contour.clone())?;
    ctx.write_json(
        "fig8_summary.json",
        &json!({
            "tol": maps.tol,
            "violations_hot": maps.violations_hot,
            "violations_cold": maps.violations_cold,
            "max_engine": maps.max_engine,
            "max_band": maps.max_band,
            "max_interior": maps.max_interior,
        }),
    )?;
    println!(
        "  bound maps: {} hot and {} cold violations, max delta over band {:?}, interior {:?}",
        maps.violations_hot, maps.violations_cold, maps.max_band, maps.max_interior
    );
    if ctx.strict && !maps.clean() {
        return Err(Failure::Strict("bound violations present".into()));
    }
    Ok(())
}

fn tpm_outputs(ctx: &mut Context, stem: &str, base: &CycleConfig, variant: Option<TpmCycle>) -> Result<(), Failure> {
    let g = ctx.cfg.grids.clone();
    let variant = variant.unwrap_or(g.tpm_cycle);
    let grid = g.tau_drive.axis("tau_drive");
    grid.validate()?;
    let records = dbn_tpm_scan(base, &grid.values(), g.tpm_tau_iso, variant)?;
    ctx.write_numeric_csv(
        &format!("{stem}.csv"),
        &ComparisonRecord::HEADER,
        records.iter().map(|r| r.values().to_vec()).collect(),
    )?;
    let n = records.len();
    let third = (n / 3).max(1);
    let d: Vec<f64> = records.iter().map(|r| r.delta_tpm_dbn).collect();
    let coh: Vec<f64> = records.iter().map(|r| r.coh_rel_rho3).collect();
    let max = |s: &[f64]| s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let summary = json!({
        "tpm_cycle": variant,
        "tau_iso": g.tpm_tau_iso,
        "points": n,
        "max_delta_dbn_exact": max(&records.iter().map(|r| r.delta_dbn_exact).collect::<Vec<_>>()),
        "delta_tpm_dbn_first": d.first(),
        "delta_tpm_dbn_last": d.last(),
        "ratio_first_last": d.first().zip(d.last()).map(|(a, b)| a / b),
        "max_short_third": max(&d[..third]),
        "max_long_third": max(&d[n - third..]),
        "spearman_delta_coherence": spearman(&d, &coh),
    });
    ctx.write_json(&format!("{stem}_summary.json"), &summary)?;
    println!("{stem}: {}", serde_json::to_string_pretty(&summary).unwrap_or_default());
    Ok(())
}

pub fn point(ctx: &mut Context, optimize: bool) -> Result<(), Failure> {
    let cfg = ctx.cfg.cycle;
    let eval = if optimize {
        optimize_drive(&cfg, &ctx.cfg.grids.tau_drive.axis("tau_drive"))
    } else {
        evaluate_point(&cfg)
    };
    let eval = match eval {
        Ok(e) => e,
        Err(e @ otto_dbn::OttoError::NonUniqueFixedPoint { .. }) => {
            return Err(Failure::Convergence(format!(
                "degenerate fixed point: the cycle map does not contract ({e}); \
                 check that at least one bath has a positive rate and duration"
            )));
        }
        Err(e) => return Err(e.into()),
    };
    let out = json!({
        "config": eval.cfg,
        "tau_star": if optimize { Some(eval.cfg.tau_drive) } else { None },
        "tau_cycle": eval.cfg.tau_cycle(),
        "record": eval.record,
        "energetics": eval.exact,
        "dbn_summary": eval.summary,
        "dbn_deviation": eval.dbn_deviation(),
        "bounds": eval.bounds,
        "iterations": eval.corners.iterations,
        "residual": eval.corners.residual,
    });
    ctx.write_json("point.json", &out)?;
    let paths = ctx.out_path().join("point_paths.csv");
    eval.dbn
        .distribution
        .write_csv(std::io::BufWriter::new(std::fs::File::create(&paths)?))?;
    println!("{}", serde_json::to_string_pretty(&out).unwrap_or_default());
    ctx.finish("point", "point")
}

pub fn scan(ctx: &mut Context, kind: ScanArg) -> Result<(), Failure> {
    let (stem, table) = match kind {
        ScanArg::Population => {
            let r = ctx.regime.unwrap_or(if ctx.cfg.cycle.pe_h > 0.5 {
                Regime::Inverted
            } else {
                Regime::Positive
            });
            (format!("scan_population_{}", r.name()), population_table(ctx, r)?)
        }
        ScanArg::Time => ("scan_time".to_string(), time_table(ctx, &ctx.cfg.cycle.clone())?),
        ScanArg::DriveLine => {
            let c = &ctx.cfg;
            let t = drive_line_scan(&c.cycle, &c.grids.tau_drive.axis("tau_drive"), c.cycle.tau_h, &ctx.scan_options())?;
            ("scan_drive_line".to_string(), t)
        }
    };
    write_scan(ctx, &stem, &table)?;
    if table.grid.axes.len() == 2 {
        let maps = bound_scan(&table, ctx.cfg.grids.bound_tol);
        ctx.write_json(&format!("{stem}_bounds.json"), &maps)?;
    }
    ctx.finish(&stem, &format!("scan {kind:?}").to_lowercase())?;
    strict_checks(ctx, &[&table], &[])
}

pub fn validate(ctx: &mut Context, step_multiplier: usize, fault: Option<Fault>) -> Result<(), Failure> {
    if step_multiplier == 0 {
        return Err(Failure::Usage("step multiplier must be at least 1".into()));
    }
    let report = run_validation(&ValidationOptions {
        step_multiplier,
        fault,
    });
    ctx.write_json("validate_report.json", &report)?;
    for c in &report.checks {
        println!(
            "{} {:<24} {:<20} {:.3e} <= {:.1e}{}",
            if c.passed { "pass" } else { "FAIL" },
            c.check,
            c.case,
            c.value,
            c.threshold,
            c.detail.as_deref().map(|d| format!("  ({d})")).unwrap_or_default()
        );
    }
    let failed = report.failures().count();
    println!("{} checks, {failed} failed", report.checks.len());
    ctx.finish("validate", "validate")?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Validation(format!("{failed} checks failed")))
    }
}

pub fn tpm_compare(ctx: &mut Context, variant: Option<TpmCycle>) -> Result<(), Failure> {
    let base = ctx.cfg.cycle;
    tpm_outputs(ctx, "tpm_compare", &base, variant)?;
    ctx.finish("tpm_compare", "tpm-compare")
}
