// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Finite-time qubit Otto engine with thermal and population-inverted
//! baths, with work and heat statistics from a five-corner Bayesian network
//! and a two-point-measurement benchmark.

// NaN must fall into the rejecting branch of every `!(x > 0.0)` guard.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod numeric;
pub mod observables;
pub mod cycle;
pub mod dbn;
pub mod quantum;
pub mod reference;
pub mod scan;
pub mod tpm;
pub mod validation;

pub use error::{OttoError, Result};
