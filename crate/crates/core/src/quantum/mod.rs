// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Qubit linear algebra, states, channels and entropies.

pub mod linalg;
pub mod state;
pub mod superop;

pub use linalg::{ComplexMatrix2, ComplexVector2, SpectralDecomposition, C64};
pub use state::{
    dephase, relative_entropy, trace_distance, von_neumann_entropy, DensityMatrix,
    RelativeEntropy,
};
pub use superop::{channel_exponential, Superoperator};
