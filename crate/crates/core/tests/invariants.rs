// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Property tests over random operating points.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use otto_dbn::cycle::{exact_cycle_energetics, find_limit_cycle, CycleConfig, Regime, StrokeMaps};
use otto_dbn::dbn::path_distribution;
use otto_dbn::scan::{time_scan, Axis, ScanOptions};
use otto_dbn::validation::{coherence_free_maps, dbn_tpm_gap};

fn point() -> impl Strategy<Value = CycleConfig> {
    (0.02f64..0.98, 0.02f64..0.98, 5.0f64..3000.0, 5.0f64..20000.0).prop_map(|(pe_c, pe_h, td, ti)| {
        CycleConfig::default().with_populations(pe_c, pe_h).with_times(td, ti)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stroke_maps_are_cptp(cfg in point()) {
        let maps = StrokeMaps::build(&cfg).unwrap();
        for m in maps.in_order() {
            prop_assert!(m.is_cptp(), "tp error {:.3e}, choi min {:.3e}", m.trace_preservation_error(), m.choi_min_eigenvalue());
        }
        prop_assert!(maps.cycle_map().is_cptp());
    }

    #[test]
    fn first_law_closes(cfg in point()) {
        let maps = StrokeMaps::build(&cfg).unwrap();
        let corners = find_limit_cycle(&cfg, &maps).unwrap();
        let e = exact_cycle_energetics(&corners);
        prop_assert!(e.first_law_sum().abs() <= 1e-10, "residual {:.3e}", e.first_law_sum());
        prop_assert!(corners.residual <= 1e-10);
    }

    #[test]
    fn dbn_reproduces_exact_means(cfg in point()) {
        let maps = StrokeMaps::build(&cfg).unwrap();
        let corners = find_limit_cycle(&cfg, &maps).unwrap();
        let e = exact_cycle_energetics(&corners);
        let d = path_distribution(&corners, &maps).unwrap();
        let s = d.distribution.summary().unwrap();
        // absolute, on the energy scale: relative gaps blow up where a mean crosses zero
        let scale = 1e-10 * cfg.omega_h;
        prop_assert!((s.mean_work - e.mean_work).abs() <= scale);
        prop_assert!((s.mean_qh - e.mean_qh).abs() <= scale);
        prop_assert!((s.mean_qc - e.mean_qc).abs() <= scale);
        prop_assert!((s.normalization - 1.0).abs() <= 1e-14);
        prop_assert!(d.distribution.paths.iter().all(|p| p.prob >= 0.0));
        if e.is_engine() {
            prop_assert!((s.mean_work - e.mean_work).abs() <= 1e-10 * e.mean_work.abs());
        }
    }

    #[test]
    fn diagonal_cycles_agree_with_tpm(
        cfg in point(),
        swap in any::<[bool; 2]>(),
        phases in prop::array::uniform4(-3.2f64..3.2),
    ) {
        let maps = coherence_free_maps(&cfg, swap, phases).unwrap();
        let gap = dbn_tpm_gap(&cfg, &maps).unwrap();
        prop_assert!(gap <= 1e-12, "gap {gap:.3e}");
    }
}

#[test]
fn inverted_points_with_random_seed_agree_too() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let cfg = CycleConfig::default()
            .with_populations(rng.random_range(0.05..0.48), rng.random_range(0.52..0.98))
            .with_times(rng.random_range(1.0..100.0), rng.random_range(1.0..1000.0));
        let swap = [rng.random(), rng.random()];
        let phases = std::array::from_fn(|_| rng.random_range(-3.2..3.2));
        let maps = coherence_free_maps(&cfg, swap, phases).unwrap();
        assert!(dbn_tpm_gap(&cfg, &maps).unwrap() <= 1e-12);
    }
}

fn small_axes(n: usize) -> (Axis, Axis) {
    (Axis::log("tau_drive", 20.0, 5000.0, n), Axis::log("tau_iso", 5.0, 5e4, n))
}

#[test]
fn scans_are_deterministic_and_complete() {
    let base = CycleConfig::default().with_regime(Regime::Inverted);
    let (td, ti) = small_axes(7);
    let a = time_scan(&base, &td, &ti, &ScanOptions::with_workers(1)).unwrap();
    let b = time_scan(&base, &td, &ti, &ScanOptions::with_workers(4)).unwrap();
    assert_eq!(a.rows.len(), a.grid.cardinality());
    assert_eq!(a.rows.len(), 49);
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.provenance.config_hash, b.provenance.config_hash);
}

/// A grid that contains a coarser one reproduces its cells exactly and can
/// only improve on its optima.
#[test]
fn refinement_is_monotone() {
    for regime in [Regime::Positive, Regime::Inverted] {
        let base = CycleConfig::default().with_regime(regime);
        let (td, ti) = small_axes(10);
        let (tdf, tif) = small_axes(19);
        let coarse = time_scan(&base, &td, &ti, &ScanOptions::default()).unwrap();
        let fine = time_scan(&base, &tdf, &tif, &ScanOptions::default()).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let c = coarse.at(&[i, j]).unwrap();
                let f = fine.at(&[2 * i, 2 * j]).unwrap();
                assert!((c.tau_drive - f.tau_drive).abs() <= 1e-9 * c.tau_drive);
                assert!((c.record.mean_work - f.record.mean_work).abs() <= 1e-12 * c.record.mean_work.abs().max(1e-12));
            }
        }
        let best = |t: &otto_dbn::scan::ScanTable, key: fn(&otto_dbn::scan::ScanRow) -> f64| {
            t.engine_rows().map(|(_, r)| key(r)).fold(f64::NEG_INFINITY, f64::max)
        };
        for key in [
            (|r: &otto_dbn::scan::ScanRow| r.record.power) as fn(&_) -> f64,
            |r| r.record.eta,
            |r| -r.record.mean_work,
            |r| -r.record.phi_p,
        ] {
            assert!(best(&fine, key) >= best(&coarse, key));
        }
    }
}
