// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Linear maps on 2×2 matrices as 4×4 superoperators.
//!
//! Vectorization is column-stacking: `vec(X) = (X00, X10, X01, X11)`, so
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{Matrix4, Vector4};

use super::linalg::{c, trace, ComplexMatrix2, C64};
use crate::error::{OttoError, Result};

pub type ComplexMatrix4 = Matrix4<C64>;
pub type ComplexVector4 = Vector4<C64>;

pub fn vectorize(m: &ComplexMatrix2) -> ComplexVector4 {
    Vector4::new(m[(0, 0)], m[(1, 0)], m[(0, 1)], m[(1, 1)])
}

pub fn unvectorize(v: &ComplexVector4) -> ComplexMatrix2 {
    ComplexMatrix2::new(v[0], v[2], v[1], v[3])
}

/// Kronecker product of two 2×2 matrices.
pub fn kron(a: &ComplexMatrix2, b: &ComplexMatrix2) -> ComplexMatrix4 {
    ComplexMatrix4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// A linear map `X ↦ Φ(X)` on 2×2 complex matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator(pub ComplexMatrix4);

impl Superoperator {
    pub fn identity() -> Self {
        Superoperator(ComplexMatrix4::identity())
    }

    /// `X ↦ U X U†`.
    pub fn from_unitary(u: &ComplexMatrix2) -> Self {
        Superoperator(kron(&u.conjugate(), u))
    }

    /// `X ↦ A X B`.
    pub fn sandwich(a: &ComplexMatrix2, b: &ComplexMatrix2) -> Self {
        Superoperator(kron(&b.transpose(), a))
    }

    /// GKSL generator `−i[H,·] + Σ_k (J_k (·) J_k† − ½{J_k†J_k, ·})`.
    pub fn gksl_generator(h: &ComplexMatrix2, jumps: &[ComplexMatrix2]) -> Self {
        let id = ComplexMatrix2::identity();
        let mut l = (kron(&id, h) - kron(&h.transpose(), &id)) * c(0.0, -1.0);
        for j in jumps {
            let jdj = j.adjoint() * j;
            l += kron(&j.conjugate(), j);
            l -= kron(&id, &jdj) * c(0.5, 0.0);
            l -= kron(&jdj.transpose(), &id) * c(0.5, 0.0);
        }
        Superoperator(l)
    }

    pub fn matrix(&self) -> &ComplexMatrix4 {
        &self.0
    }

    pub fn apply(&self, x: &ComplexMatrix2) -> ComplexMatrix2 {
        unvectorize(&(self.0 * vectorize(x)))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Superoperator) -> Superoperator {
        Superoperator(self.0 * first.0)
    }

    /// Choi matrix `Σ_ij E_ij ⊗ Φ(E_ij)`.
    pub fn choi(&self) -> ComplexMatrix4 {
        let mut out = ComplexMatrix4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let mut e = ComplexMatrix2::zeros();
                e[(i, j)] = c(1.0, 0.0);
                let img = self.apply(&e);
                for a in 0..2 {
                    for b in 0..2 {
                        out[(2 * i + a, 2 * j + b)] = img[(a, b)];
                    }
                }
            }
        }
        out
    }

    /// Largest deviation of `Tr Φ(E_ij)` from `δ_ij` over the matrix units.
    pub fn trace_preservation_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut e = ComplexMatrix2::zeros();
                e[(i, j)] = c(1.0, 0.0);
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((trace(&self.apply(&e)) - c(expected, 0.0)).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let choi = self.choi();
        let herm = (choi + choi.adjoint()) * c(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Trace preserving to `1e-10` and Choi-positive to `−1e-9`.
    pub fn is_cptp(&self) -> bool {
        self.trace_preservation_error() <= 1e-10 && self.choi_min_eigenvalue() >= -1e-9
    }
}

/// `exp(L τ)` for a generator `L` and `τ ≥ 0`.
///
/// Uses Padé approximation with scaling and squaring. The 4×4 generators
/// here have norms of order `γ + ω`, so `Lτ` stays well conditioned.
pub fn channel_exponential(generator: &Superoperator, tau: f64) -> Result<Superoperator> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(OttoError::contract(format!(
            "channel_exponential: duration must be finite and non-negative, got {tau}"
        )));
    }
    if tau == 0.0 {
        return Ok(Superoperator::identity());
    }
    let scaled = generator.0 * c(tau, 0.0);
    if scaled.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(OttoError::contract("channel_exponential: non-finite generator"));
    }
    Ok(Superoperator(scaled.exp()))
}
