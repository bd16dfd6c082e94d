// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Limit cycle of the four-stroke map and its exact energetics.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::bath::{bath_channel, stationary_bath_state, Bath};
use super::config::CycleConfig;
use super::drive::{cold_hamiltonian, hot_hamiltonian, propagate_unitary, Stroke};
use crate::error::{OttoError, Result};
use crate::quantum::linalg::{eig_hermitian, expectation, pauli_x, pauli_y, pauli_z};
use crate::quantum::{
    trace_distance, ComplexMatrix2, DensityMatrix, SpectralDecomposition, Superoperator,
};

/// Gap of `I − M` in the Bloch representation below which the cycle map is
/// treated as having a continuum of fixed points.
pub const NON_UNIQUE_GAP: f64 = 1e-9;

/// The four stroke channels, in cycle order.
#[derive(Debug, Clone, PartialEq)]
pub struct StrokeMaps {
    pub compression: Superoperator,
    pub hot: Superoperator,
    pub expansion: Superoperator,
    pub cold: Superoperator,
    pub h_cold: ComplexMatrix2,
    pub h_hot: ComplexMatrix2,
}

impl StrokeMaps {
    pub fn build(cfg: &CycleConfig) -> Result<Self> {
        cfg.validate()?;
        let u_c = propagate_unitary(Stroke::Compression, cfg);
        let u_e = propagate_unitary(Stroke::Expansion, cfg);
        Self::from_parts(cfg, &u_c, &u_e, bath_channel(Bath::Hot, cfg)?, bath_channel(Bath::Cold, cfg)?)
    }

    /// Assembles maps from precomputed propagators and bath channels, so
    /// scans can reuse them across grid cells.
    pub fn from_parts(
        cfg: &CycleConfig,
        u_compression: &ComplexMatrix2,
        u_expansion: &ComplexMatrix2,
        hot: Superoperator,
        cold: Superoperator,
    ) -> Result<Self> {
        Ok(StrokeMaps {
            compression: Superoperator::from_unitary(u_compression),
            hot,
            expansion: Superoperator::from_unitary(u_expansion),
            cold,
            h_cold: cold_hamiltonian(cfg),
            h_hot: hot_hamiltonian(cfg),
        })
    }

    /// Maps in cycle order: `1→2, 2→3, 3→4, 4→5`.
    pub fn in_order(&self) -> [&Superoperator; 4] {
        [&self.compression, &self.hot, &self.expansion, &self.cold]
    }

    /// `Λ = E_c ∘ U_e ∘ E_h ∘ U_c`.
    pub fn cycle_map(&self) -> Superoperator {
        self.cold
            .after(&self.expansion)
            .after(&self.hot)
            .after(&self.compression)
    }

    /// Corner Hamiltonians `H1..H5 = (H_c, H_h, H_h, H_c, H_c)`.
    pub fn corner_hamiltonians(&self) -> [ComplexMatrix2; 5] {
        [self.h_cold, self.h_hot, self.h_hot, self.h_cold, self.h_cold]
    }
}

/// Affine action `r ↦ M r + t` of a trace-preserving map on Bloch vectors.
pub fn bloch_affine(map: &Superoperator) -> (Matrix3<f64>, Vector3<f64>) {
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let id_img = map.apply(&ComplexMatrix2::identity());
    let mut m = Matrix3::zeros();
    let mut t = Vector3::zeros();
    for i in 0..3 {
        t[i] = 0.5 * expectation(&paulis[i], &id_img);
        for j in 0..3 {
            m[(i, j)] = 0.5 * expectation(&paulis[i], &map.apply(&paulis[j]));
        }
    }
    (m, t)
}

/// Smallest singular value of `I − M`: zero iff the map has more than one
/// fixed point.
pub fn contraction_gap(map: &Superoperator) -> f64 {
    let (m, _) = bloch_affine(map);
    let svd = (Matrix3::identity() - m).svd(false, false);
    svd.singular_values.min()
}

/// Solves `(I − M) r = t` directly; cross-check for the iterative solver.
pub fn direct_fixed_point(maps: &StrokeMaps) -> Result<DensityMatrix> {
    let lambda = maps.cycle_map();
    let gap = contraction_gap(&lambda);
    if gap < NON_UNIQUE_GAP {
        return Err(OttoError::NonUniqueFixedPoint { gap });
    }
    let (m, t) = bloch_affine(&lambda);
    let r = (Matrix3::identity() - m)
        .lu()
        .solve(&t)
        .ok_or(OttoError::NonUniqueFixedPoint { gap })?;
    DensityMatrix::from_bloch_vector([r[0], r[1], r[2]])
}

/// The five corner states of a converged cycle with their spectral data.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerSet {
    pub states: [DensityMatrix; 5],
    pub hamiltonians: [ComplexMatrix2; 5],
    /// Eigenbasis of each corner state; degenerate states use the corner
    /// Hamiltonian basis.
    pub state_decomps: [SpectralDecomposition; 5],
    pub energy_decomps: [SpectralDecomposition; 5],
    pub iterations: usize,
    /// Trace distance between `ρ5` and `ρ1`.
    pub residual: f64,
}

impl CornerSet {
    /// Propagates `rho1` once around the cycle.
    pub fn from_initial(rho1: DensityMatrix, maps: &StrokeMaps, iterations: usize) -> Result<Self> {
        let mut states = [rho1; 5];
        for (k, map) in maps.in_order().into_iter().enumerate() {
            states[k + 1] = DensityMatrix::from_channel_output(map.apply(states[k].matrix()));
        }
        let hamiltonians = maps.corner_hamiltonians();
        let mut state_decomps = Vec::with_capacity(5);
        let mut energy_decomps = Vec::with_capacity(5);
        for k in 0..5 {
            state_decomps.push(states[k].spectral_with_reference(&hamiltonians[k]));
            energy_decomps.push(eig_hermitian(&hamiltonians[k])?);
        }
        let residual = trace_distance(&states[4], &states[0]);
        Ok(CornerSet {
            states,
            hamiltonians,
            state_decomps: state_decomps.try_into().expect("five corners"),
            energy_decomps: energy_decomps.try_into().expect("five corners"),
            iterations,
            residual,
        })
    }

    /// `Tr[H_a ρ_a]` for each corner.
    pub fn corner_energies(&self) -> [f64; 5] {
        std::array::from_fn(|k| expectation(&self.hamiltonians[k], self.states[k].matrix()))
    }
}

/// Iterates `Λ` from the stationary cold state until successive iterates are
/// closer than `cfg.fixed_point_tol` in trace distance.
pub fn find_limit_cycle(cfg: &CycleConfig, maps: &StrokeMaps) -> Result<CornerSet> {
    let (rho1, iterations) = iterate_fixed_point(&maps.cycle_map(), cfg)?;
    CornerSet::from_initial(rho1, maps, iterations)
}

/// Forward iteration of a cycle map, starting from the stationary cold state
/// (or `I/2` when the cold bath is switched off).
pub fn iterate_fixed_point(lambda: &Superoperator, cfg: &CycleConfig) -> Result<(DensityMatrix, usize)> {
    let gap = contraction_gap(lambda);
    if gap < NON_UNIQUE_GAP {
        return Err(OttoError::NonUniqueFixedPoint { gap });
    }
    let mut rho = match stationary_bath_state(Bath::Cold, cfg) {
        Ok(rho) => rho,
        Err(OttoError::NoUniqueStationaryState) => DensityMatrix::maximally_mixed(),
        Err(e) => return Err(e),
    };
    let mut residual = f64::INFINITY;
    for iter in 1..=cfg.max_cycle_iters {
        let next = DensityMatrix::from_channel_output(lambda.apply(rho.matrix()));
        residual = trace_distance(&next, &rho);
        rho = next;
        if residual < cfg.fixed_point_tol {
            return Ok((rho, iter));
        }
    }
    Err(OttoError::NonConvergence {
        iterations: cfg.max_cycle_iters,
        residual,
    })
}

/// Builds the stroke maps and solves the limit cycle.
pub fn solve(cfg: &CycleConfig) -> Result<(StrokeMaps, CornerSet)> {
    let maps = StrokeMaps::build(cfg)?;
    let corners = find_limit_cycle(cfg, &maps)?;
    Ok((maps, corners))
}

/// Mean energetics of the coherent cycle; positive means added to the medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleEnergetics {
    pub mean_work: f64,
    pub mean_qh: f64,
    pub mean_qc: f64,
    /// `Tr[H_c(ρ5 − ρ1)]`.
    pub closure_residual: f64,
}

impl CycleEnergetics {
    pub fn is_engine(&self) -> bool {
        self.mean_work < 0.0 && self.mean_qh > 0.0
    }

    pub fn first_law_sum(&self) -> f64 {
        self.mean_work + self.mean_qh + self.mean_qc
    }
}

pub fn exact_cycle_energetics(corners: &CornerSet) -> CycleEnergetics {
    let [h1, h2, h3, h4, h5] = &corners.hamiltonians;
    let [r1, r2, r3, r4, r5] = corners.states.map(|r| r.into_matrix());
    let e = |h: &ComplexMatrix2, r: &ComplexMatrix2| expectation(h, r);
    let w_ch = e(h2, &r2) - e(h1, &r1);
    let w_hc = e(h4, &r4) - e(h3, &r3);
    CycleEnergetics {
        mean_work: w_ch + w_hc,
        mean_qh: e(h3, &(r3 - r2)),
        mean_qc: e(h5, &(r5 - r4)),
        closure_residual: e(h1, &(r5 - r1)),
    }
}
