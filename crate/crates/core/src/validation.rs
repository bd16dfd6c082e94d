// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Invariant battery run by `otto-dbn validate`.
//!
//! Every check is evaluated on a fixed set of configurations, so the report
//! is deterministic. A fault can be injected into the hot bath to make sure
//! the checks actually bite.

use serde::{Deserialize, Serialize};

use crate::cycle::bath::{generator_with_rates, population_state};
use crate::cycle::limit::{find_limit_cycle, CornerSet};
use crate::cycle::{exact_cycle_energetics, Bath, BathRates, CycleConfig, Regime, StrokeMaps};
use crate::cycle::bath::{bath_channel, bath_rates};
use crate::dbn::{path_distribution, Observable, PathDistribution};
use crate::error::{OttoError, Result};
use crate::numeric::relative_discrepancy;
use crate::observables::{bound_delta, friction_classifier, friction_zero_boundary, ObservableRecord};
use crate::quantum::linalg::{c, eig_hermitian, max_abs_diff, outer};
use crate::quantum::superop::channel_exponential;
use crate::quantum::{ComplexMatrix2, DensityMatrix, Superoperator};
use crate::tpm::build_tpm_chain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Hot bath built with `Γ↑ → −Γ↑`.
    FlipUpRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    /// Multiplies both step counts.
    pub step_multiplier: usize,
    pub fault: Option<Fault>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            step_multiplier: 1,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub case: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub options: ValidationOptions,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// `(check, case, passed)` triples, for comparing verdicts across runs.
    pub fn verdicts(&self) -> Vec<(String, String, bool)> {
        self.checks
            .iter()
            .map(|c| (c.check.clone(), c.case.clone(), c.passed))
            .collect()
    }
}

pub const TOL_FIRST_LAW: f64 = 1e-10;
pub const TOL_DBN_AVERAGE: f64 = 1e-10;
pub const TOL_BOUND: f64 = 1e-10;
pub const TOL_IDENTITY: f64 = 1e-12;
pub const TOL_STATIONARY: f64 = 1e-10;

/// Named configurations covering both regimes, short and long strokes.
pub fn battery() -> Vec<(&'static str, CycleConfig)> {
    let pos = CycleConfig::default().with_regime(Regime::Positive);
    let inv = CycleConfig::default().with_regime(Regime::Inverted);
    vec![
        ("positive_short", pos.with_times(20.0, 100.0)),
        ("positive_slow", pos.with_times(5000.0, 100.0)),
        ("inverted_fast", inv.with_times(20.0, 574.9)),
        ("inverted_efficient", inv.with_times(35.0, 206.6)),
        ("inverted_stable", inv.with_times(2666.0, 16373.0)),
        ("inverted_short_iso", inv.with_times(100.0, 5.0)),
        ("inverted_reset", inv.with_populations(0.48, 0.98).with_times(20.0, 12_500.0)),
    ]
}

fn check(check: &str, case: &str, value: f64, threshold: f64) -> CheckResult {
    CheckResult {
        check: check.to_string(),
        case: case.to_string(),
        value,
        threshold,
        passed: value <= threshold,
        detail: None,
    }
}

fn errored(check_name: &str, case: &str, threshold: f64, err: &OttoError) -> CheckResult {
    CheckResult {
        detail: Some(err.to_string()),
        passed: false,
        ..check(check_name, case, f64::NAN, threshold)
    }
}

/// Stroke maps with the optional fault applied to the hot bath.
pub fn battery_maps(cfg: &CycleConfig, fault: Option<Fault>) -> Result<StrokeMaps> {
    let mut maps = StrokeMaps::build(cfg)?;
    if fault == Some(Fault::FlipUpRate) {
        let r = bath_rates(Bath::Hot, cfg);
        let flipped = BathRates { up: -r.up, down: r.down };
        maps.hot = channel_exponential(&generator_with_rates(&maps.h_hot, flipped)?, cfg.tau_h)?;
    }
    Ok(maps)
}

fn cptp_violation(m: &Superoperator) -> f64 {
    m.trace_preservation_error().max(-m.choi_min_eigenvalue())
}

/// Distance of the bath's implied stationary population from `[0, 1]`, or
/// the fixed-point residual of the channel at that population.
fn stationarity_violation(h: &ComplexMatrix2, rates: BathRates, channel: &Superoperator) -> Result<f64> {
    let total = rates.total();
    if !(total > 0.0) {
        return Ok(f64::INFINITY);
    }
    let p = rates.up / total;
    if !(0.0..=1.0).contains(&p) {
        return Ok(p.max(-p).max((p - 1.0).abs()));
    }
    let ss = population_state(h, p)?;
    Ok(max_abs_diff(&channel.apply(ss.matrix()), ss.matrix()))
}

/// `|φ_ηreg − φ_P|/φ_P`, `|σ(η_reg)⟨Q_h⟩ − σ_W|/σ_W` and
/// `|Var(P)τ² − Var(W)|/Var(W)`.
pub fn identity_residuals(record: &ObservableRecord, dist: &PathDistribution, tau_cycle: f64) -> Result<[f64; 3]> {
    let var_w = dist.moments(Observable::Work)?.variance;
    let var_p = dist.moments(Observable::Power { tau_cycle })?.variance;
    Ok([
        relative_discrepancy(record.phi_eta_reg(), record.phi_p),
        relative_discrepancy(record.eta_reg_sigma * record.mean_qh, record.sigma_work),
        relative_discrepancy(var_p * tau_cycle * tau_cycle, var_w),
    ])
}

fn case_checks(name: &str, cfg: &CycleConfig, fault: Option<Fault>, out: &mut Vec<CheckResult>) {
    let maps = match battery_maps(cfg, fault) {
        Ok(m) => m,
        Err(e) => {
            out.push(errored("build", name, 0.0, &e));
            return;
        }
    };
    let worst = maps.in_order().iter().map(|m| cptp_violation(m)).fold(0.0, f64::max);
    out.push(CheckResult {
        passed: maps.in_order().iter().all(|m| m.is_cptp()),
        ..check("cptp", name, worst, 1e-9)
    });
    let mut hot_rates = bath_rates(Bath::Hot, cfg);
    if fault == Some(Fault::FlipUpRate) {
        hot_rates.up = -hot_rates.up;
    }
    let stat = stationarity_violation(&maps.h_hot, hot_rates, &maps.hot).and_then(|h| {
        let cold = bath_channel(Bath::Cold, cfg)?;
        Ok(h.max(stationarity_violation(&maps.h_cold, bath_rates(Bath::Cold, cfg), &cold)?))
    });
    out.push(match stat {
        Ok(v) => check("stationarity", name, v, TOL_STATIONARY),
        Err(e) => errored("stationarity", name, TOL_STATIONARY, &e),
    });

    let corners = match find_limit_cycle(cfg, &maps) {
        Ok(c) => c,
        Err(e) => {
            out.push(errored("limit_cycle", name, 0.0, &e));
            return;
        }
    };
    let exact = exact_cycle_energetics(&corners);
    out.push(check("first_law", name, exact.first_law_sum().abs(), TOL_FIRST_LAW));

    let dbn = match path_distribution(&corners, &maps).and_then(|d| Ok((d.distribution.summary()?, d))) {
        Ok(d) => d,
        Err(e) => {
            out.push(errored("dbn_average", name, TOL_DBN_AVERAGE, &e));
            return;
        }
    };
    let (summary, dbn) = dbn;
    let dev = [
        relative_discrepancy(summary.mean_work, exact.mean_work),
        relative_discrepancy(summary.mean_qh, exact.mean_qh),
        relative_discrepancy(summary.mean_qc, exact.mean_qc),
    ];
    out.push(check("dbn_average", name, dev.into_iter().fold(0.0, f64::max), TOL_DBN_AVERAGE));

    match bound_delta(&corners, cfg) {
        Ok(b) => out.push(check("bound_signs", name, b.hot.max(b.cold), TOL_BOUND)),
        Err(e) => out.push(errored("bound_signs", name, TOL_BOUND, &e)),
    }

    if exact.is_engine() {
        let bounds = bound_delta(&corners, cfg).unwrap_or(crate::observables::BoundDelta {
            hot: f64::NAN,
            cold: f64::NAN,
        });
        let record = ObservableRecord::new(&exact, &summary, cfg.tau_cycle(), 0.0, bounds);
        match identity_residuals(&record, &dbn.distribution, cfg.tau_cycle()) {
            Ok(r) => out.push(check("identities", name, r.into_iter().fold(0.0, f64::max), TOL_IDENTITY)),
            Err(e) => out.push(errored("identities", name, TOL_IDENTITY, &e)),
        }
    }
}

/// Zero-duration strokes with no dissipation: the hidden chain must be the
/// identity and the cycle must be reported as degenerate.
fn identity_chain_checks(out: &mut Vec<CheckResult>) {
    let mut cfg = CycleConfig::default().with_times(0.0, 0.0);
    cfg.gamma_c = 0.0;
    cfg.gamma_h = 0.0;
    let r = (|| -> Result<f64> {
        let maps = StrokeMaps::build(&cfg)?;
        let rho = DensityMatrix::from_bloch_vector([0.1, -0.2, 0.3])?;
        let corners = CornerSet::from_initial(rho, &maps, 0)?;
        let chain = crate::dbn::build_hidden_chain(&corners, &maps)?;
        let mut worst = 0.0f64;
        for k in &chain.kernels {
            for (a, row) in k.iter().enumerate() {
                for (b, &t) in row.iter().enumerate() {
                    worst = worst.max((t - if a == b { 1.0 } else { 0.0 }).abs());
                }
            }
        }
        Ok(worst)
    })();
    out.push(match r {
        Ok(v) => check("identity_chain", "zero_strokes", v, TOL_IDENTITY),
        Err(e) => errored("identity_chain", "zero_strokes", TOL_IDENTITY, &e),
    });
    let degenerate = StrokeMaps::build(&cfg).and_then(|m| find_limit_cycle(&cfg, &m));
    out.push(CheckResult {
        passed: matches!(degenerate, Err(OttoError::NonUniqueFixedPoint { .. })),
        detail: degenerate.err().map(|e| e.to_string()),
        ..check("degenerate_fixed_point", "zero_strokes", 0.0, 0.0)
    });
}

/// Unitary taking the eigenbasis of `from` to that of `to`, optionally
/// swapping the levels, with extra phases on each image vector.
pub fn basis_map(from: &ComplexMatrix2, to: &ComplexMatrix2, swap: bool, phases: [f64; 2]) -> Result<ComplexMatrix2> {
    let a = eig_hermitian(from)?;
    let b = eig_hermitian(to)?;
    let mut u = ComplexMatrix2::zeros();
    for k in 0..2 {
        let target = if swap { 1 - k } else { k };
        u += outer(&b.eigenvectors[target], &a.eigenvectors[k]) * c(phases[k].cos(), phases[k].sin());
    }
    Ok(u)
}

/// Stroke maps whose drives carry energy eigenstates onto energy
/// eigenstates, so every corner state is diagonal in its energy basis.
pub fn coherence_free_maps(cfg: &CycleConfig, swap: [bool; 2], phases: [f64; 4]) -> Result<StrokeMaps> {
    let base = StrokeMaps::build(&CycleConfig {
        tau_drive: 0.0,
        ..*cfg
    })?;
    let u_c = basis_map(&base.h_cold, &base.h_hot, swap[0], [phases[0], phases[1]])?;
    let u_e = basis_map(&base.h_hot, &base.h_cold, swap[1], [phases[2], phases[3]])?;
    StrokeMaps::from_parts(cfg, &u_c, &u_e, base.hot, base.cold)
}

/// Largest entrywise gap between the DBN and TPM path distributions.
pub fn dbn_tpm_gap(cfg: &CycleConfig, maps: &StrokeMaps) -> Result<f64> {
    let corners = find_limit_cycle(cfg, maps)?;
    let dbn = path_distribution(&corners, maps)?.distribution;
    let tpm = build_tpm_chain(&corners.states[0], maps)?.distribution();
    Ok(dbn
        .paths
        .iter()
        .zip(&tpm.paths)
        .map(|(a, b)| (a.prob - b.prob).abs())
        .fold(0.0, f64::max))
}

fn diagonal_checks(out: &mut Vec<CheckResult>) {
    let mut worst = 0.0f64;
    let mut failure = None;
    for k in 0..10 {
        let x = k as f64;
        let cfg = CycleConfig::default()
            .with_populations(0.05 + 0.09 * x, 0.95 - 0.085 * x)
            .with_times(10.0 + x, 20.0 + 300.0 * x);
        let swap = [k % 3 == 0, k % 4 == 1];
        let phases = [0.3 * x, -0.7 * x, 1.1, 0.2 * x * x];
        match coherence_free_maps(&cfg, swap, phases).and_then(|m| dbn_tpm_gap(&cfg, &m)) {
            Ok(g) => worst = worst.max(g),
            Err(e) => failure = Some(e),
        }
    }
    out.push(match failure {
        None => check("diagonal_dbn_tpm", "coherence_free", worst, TOL_IDENTITY),
        Some(e) => errored("diagonal_dbn_tpm", "coherence_free", TOL_IDENTITY, &e),
    });
}

fn friction_checks(out: &mut Vec<CheckResult>) {
    let cfg = CycleConfig::default();
    let mut worst = 0.0f64;
    let mut sign_ok = true;
    for k in 0..9 {
        let pe_c = 0.05 + 0.1 * k as f64;
        let Ok(b) = friction_zero_boundary(pe_c, cfg.omega_c, cfg.omega_h) else {
            sign_ok = false;
            continue;
        };
        let f = |pe_h: f64| friction_classifier(pe_c, pe_h, cfg.omega_c, cfg.omega_h);
        worst = worst.max(f(b.pe_h).abs());
        sign_ok &= f(b.pe_h - 1e-6) > 0.0 && f(b.pe_h + 1e-6) < 0.0;
    }
    out.push(CheckResult {
        passed: sign_ok && worst <= TOL_IDENTITY,
        ..check("friction_boundary", "classifier", worst, TOL_IDENTITY)
    });
}

pub fn run_validation(opts: &ValidationOptions) -> ValidationReport {
    let mut checks = Vec::new();
    let m = opts.step_multiplier.max(1);
    for (name, mut cfg) in battery() {
        cfg.n_steps_drive *= m;
        cfg.n_steps_iso *= m;
        case_checks(name, &cfg, opts.fault, &mut checks);
    }
    identity_chain_checks(&mut checks);
    diagonal_checks(&mut checks);
    friction_checks(&mut checks);
    let passed = checks.iter().all(|c| c.passed);
    ValidationReport {
        options: *opts,
        checks,
        passed,
    }
}
