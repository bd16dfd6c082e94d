// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Stroke maps, limit cycle and mean energetics of the Otto cycle.

pub mod bath;
pub mod config;
pub mod drive;
pub mod limit;

pub use bath::{bath_generator, stationary_bath_state, Bath, BathRates, PopulationModel};
pub use config::{CycleConfig, Regime};
pub use drive::{drive_hamiltonian, propagate_unitary, Stroke};
pub use limit::{
    exact_cycle_energetics, find_limit_cycle, solve, CornerSet, CycleEnergetics, StrokeMaps,
};
