// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Markovian bath strokes at fixed Hamiltonian.

use serde::{Deserialize, Serialize};

use super::config::CycleConfig;
use super::drive::{cold_hamiltonian, hot_hamiltonian};
use crate::error::{OttoError, Result};
use crate::quantum::linalg::{c, eig_hermitian, outer};
use crate::quantum::superop::{channel_exponential, kron};
use crate::quantum::{ComplexMatrix2, DensityMatrix, Superoperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bath {
    Hot,
    Cold,
}

/// Upward and downward transition rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathRates {
    pub up: f64,
    pub down: f64,
}

impl BathRates {
    /// `Γ↑ = γ p_e`, `Γ↓ = γ (1 − p_e)`.
    pub fn from_population(gamma: f64, pe: f64) -> Self {
        BathRates {
            up: gamma * pe,
            down: gamma * (1.0 - pe),
        }
    }

    pub fn total(&self) -> f64 {
        self.up + self.down
    }
}

pub fn bath_hamiltonian(bath: Bath, cfg: &CycleConfig) -> ComplexMatrix2 {
    match bath {
        Bath::Hot => hot_hamiltonian(cfg),
        Bath::Cold => cold_hamiltonian(cfg),
    }
}

fn bath_parameters(bath: Bath, cfg: &CycleConfig) -> (f64, f64, f64) {
    match bath {
        Bath::Hot => (cfg.gamma_h, cfg.pe_h, cfg.tau_h),
        Bath::Cold => (cfg.gamma_c, cfg.pe_c, cfg.tau_c),
    }
}

pub fn bath_rates(bath: Bath, cfg: &CycleConfig) -> BathRates {
    let (gamma, pe, _) = bath_parameters(bath, cfg);
    BathRates::from_population(gamma, pe)
}

/// GKSL generator with jumps `|g⟩⟨e|` and `|e⟩⟨g|` in the eigenbasis of `h`.
///
/// Rates enter as prefactors of the dissipators rather than through
/// `√Γ`, so a negative rate yields a (non-physical) generator instead of
/// a NaN.
pub fn generator_with_rates(h: &ComplexMatrix2, rates: BathRates) -> Result<Superoperator> {
    let basis = eig_hermitian(h)?;
    let g = basis.eigenvectors[0];
    let e = basis.eigenvectors[1];
    let lower = outer(&g, &e);
    let raise = outer(&e, &g);
    let id = ComplexMatrix2::identity();
    let mut l = Superoperator::gksl_generator(h, &[]).0;
    for (rate, j) in [(rates.down, lower), (rates.up, raise)] {
        let jdj = j.adjoint() * j;
        let d = kron(&j.conjugate(), &j)
            - kron(&id, &jdj) * c(0.5, 0.0)
            - kron(&jdj.transpose(), &id) * c(0.5, 0.0);
        l += d * c(rate, 0.0);
    }
    Ok(Superoperator(l))
}

pub fn bath_generator(bath: Bath, cfg: &CycleConfig) -> Result<Superoperator> {
    generator_with_rates(&bath_hamiltonian(bath, cfg), bath_rates(bath, cfg))
}

/// `exp(L_α τ_α)` for the bath stroke.
pub fn bath_channel(bath: Bath, cfg: &CycleConfig) -> Result<Superoperator> {
    let (_, _, tau) = bath_parameters(bath, cfg);
    channel_exponential(&bath_generator(bath, cfg)?, tau)
}

/// `diag(1 − p_e, p_e)` in the eigenbasis of `h` (ground first).
pub fn population_state(h: &ComplexMatrix2, pe: f64) -> Result<DensityMatrix> {
    let basis = eig_hermitian(h)?;
    DensityMatrix::from_populations([1.0 - pe, pe], &basis.projectors)
}

/// Stationary state of the bath generator; requires a positive rate.
pub fn stationary_bath_state(bath: Bath, cfg: &CycleConfig) -> Result<DensityMatrix> {
    let (gamma, pe, _) = bath_parameters(bath, cfg);
    if !(gamma > 0.0) {
        return Err(OttoError::NoUniqueStationaryState);
    }
    population_state(&bath_hamiltonian(bath, cfg), pe)
}

/// Reference state used for the athermality term; defined for any rate.
pub fn thermal_reference(bath: Bath, cfg: &CycleConfig) -> Result<DensityMatrix> {
    let (_, pe, _) = bath_parameters(bath, cfg);
    population_state(&bath_hamiltonian(bath, cfg), pe)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationModel {
    Bose,
    Fermi,
}

/// Stationary excited population for a bath at inverse temperature `beta`.
///
/// The bosonic form `n̄/(2n̄+1)` needs `β > 0`; the two-level form
/// `1/(e^{βω}+1)` also covers `β < 0`.
pub fn population_from_temperature(model: PopulationModel, beta: f64, omega: f64) -> Result<f64> {
    let x = beta * omega;
    if x.is_nan() {
        return Err(OttoError::Domain(format!("beta*omega is NaN (beta {beta}, omega {omega})")));
    }
    match model {
        PopulationModel::Fermi => {
            if x == f64::INFINITY {
                Ok(0.0)
            } else if x == f64::NEG_INFINITY {
                Ok(1.0)
            } else {
                Ok(1.0 / (x.exp() + 1.0))
            }
        }
        PopulationModel::Bose => {
            if !(beta > 0.0) || !(x > 0.0) {
                return Err(OttoError::Domain(format!(
                    "bosonic population needs beta*omega > 0, got {x}"
                )));
            }
            // n/(2n+1) with n = 1/(e^x − 1) equals 1/(e^x + 1)
            let n = 1.0 / x.exp_m1();
            if n.is_finite() {
                Ok(n / (2.0 * n + 1.0))
            } else {
                Ok(0.5)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{from_bloch, max_abs_diff};
    use crate::quantum::trace_distance;

    #[test]
    fn rate_ratios() {
        let r = BathRates::from_population(1e-3, 0.80);
        assert!((r.up / r.down - 4.0).abs() < 1e-12);
        let r = BathRates::from_population(1e-3, 0.98);
        assert!((r.up / r.down - 49.0).abs() < 1e-10);
    }

    #[test]
    fn stationary_state_is_fixed_point() {
        for (pe_c, pe_h) in [(0.4, 0.8), (0.0, 1.0), (0.25, 0.35)] {
            let cfg = CycleConfig::default().with_populations(pe_c, pe_h);
            for bath in [Bath::Hot, Bath::Cold] {
                let l = bath_generator(bath, &cfg).unwrap();
                let rho = stationary_bath_state(bath, &cfg).unwrap();
                let drift = l.apply(rho.matrix());
                assert!(drift.iter().all(|z| z.norm() < 1e-15));
            }
        }
    }

    #[test]
    fn stationary_examples() {
        let cfg = CycleConfig::default().with_populations(0.5, 0.8);
        let half = stationary_bath_state(Bath::Cold, &cfg).unwrap();
        assert!(max_abs_diff(half.matrix(), &from_bloch(0.5, [0.0; 3])) < 1e-15);
        let hot = stationary_bath_state(Bath::Hot, &cfg).unwrap();
        let basis = eig_hermitian(&hot_hamiltonian(&cfg)).unwrap();
        let p = basis.populations(hot.matrix());
        assert!((p[0] - 0.2).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);

        let mut zero = cfg;
        zero.gamma_h = 0.0;
        assert!(matches!(
            stationary_bath_state(Bath::Hot, &zero),
            Err(OttoError::NoUniqueStationaryState)
        ));
        assert!(thermal_reference(Bath::Hot, &zero).is_ok());
    }

    #[test]
    fn pure_decay_reaches_ground() {
        let cfg = CycleConfig::default().with_populations(0.0, 0.8);
        let l = bath_generator(Bath::Cold, &cfg).unwrap();
        let e = channel_exponential(&l, 50.0 / cfg.gamma_c).unwrap();
        let target = stationary_bath_state(Bath::Cold, &cfg).unwrap();
        let basis = eig_hermitian(&cold_hamiltonian(&cfg)).unwrap();
        assert!(max_abs_diff(target.matrix(), &basis.projectors[0]) < 1e-15);
        for r in [[0.5, 0.0, 0.0], [0.0, 0.0, -0.5], [0.1, 0.4, 0.2]] {
            let out = DensityMatrix::new(e.apply(&from_bloch(0.5, r))).unwrap();
            assert!(trace_distance(&out, &target) < 1e-9);
        }
    }

    #[test]
    fn relaxation_oracle() {
        let cfg = CycleConfig::default();
        for bath in [Bath::Hot, Bath::Cold] {
            let gamma = 1e-3;
            let e = channel_exponential(&bath_generator(bath, &cfg).unwrap(), 50.0 / gamma).unwrap();
            let target = stationary_bath_state(bath, &cfg).unwrap();
            for r in [[0.5, 0.0, 0.0], [0.0, -0.5, 0.0], [0.0, 0.0, 0.5]] {
                let out = DensityMatrix::new(e.apply(&from_bloch(0.5, r))).unwrap();
                assert!(trace_distance(&out, &target) < 1e-9);
            }
            assert!(e.is_cptp());
        }
    }

    #[test]
    fn negative_rate_breaks_positivity() {
        let cfg = CycleConfig::default();
        let h = hot_hamiltonian(&cfg);
        let rates = BathRates { up: -0.8e-3, down: 0.2e-3 };
        let l = generator_with_rates(&h, rates).unwrap();
        let e = channel_exponential(&l, 2000.0).unwrap();
        assert!(!e.is_cptp());
    }

    #[test]
    fn populations_from_temperature() {
        let fermi = |x: f64| population_from_temperature(PopulationModel::Fermi, x, 1.0).unwrap();
        assert_eq!(fermi(0.0), 0.5);
        assert!((fermi(-(4.0f64).ln()) - 0.8).abs() < 1e-15);
        assert!(fermi(-1.0) > 0.5);
        let bose = population_from_temperature(PopulationModel::Bose, 1e6, 1.0).unwrap();
        assert_eq!(bose, 0.0);
        let bose = population_from_temperature(PopulationModel::Bose, 2.0, 0.7).unwrap();
        assert!(bose < 0.5 && (bose - fermi(1.4)).abs() < 1e-15);
        assert!(population_from_temperature(PopulationModel::Bose, -1.0, 1.0).is_err());
        assert!(population_from_temperature(PopulationModel::Bose, 0.0, 1.0).is_err());
    }
}
