// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense 2×2 complex linear algebra.
//!
//! Every Hermitian 2×2 matrix is written as `M = a·I + r·σ` with real `a`
//! and a real Bloch vector `r`. Eigenvalues are `a ∓ |r|` and the spectral
//! projectors are `(I ∓ r̂·σ)/2`, which gives closed forms for the spectral
//! decomposition and for `exp(-i M t)` without iterative solvers.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{OttoError, Result};

pub type C64 = Complex64;
pub type ComplexMatrix2 = Matrix2<C64>;
pub type ComplexVector2 = Vector2<C64>;

/// Gap below which a 2×2 spectrum counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

const HERMITIAN_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity2() -> ComplexMatrix2 {
    ComplexMatrix2::identity()
}

pub fn pauli_x() -> ComplexMatrix2 {
    Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn pauli_y() -> ComplexMatrix2 {
    Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn pauli_z() -> ComplexMatrix2 {
    Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// `a·I + r·σ` for real coefficients.
pub fn from_bloch(a: f64, r: [f64; 3]) -> ComplexMatrix2 {
    Matrix2::new(
        c(a + r[2], 0.0),
        c(r[0], -r[1]),
        c(r[0], r[1]),
        c(a - r[2], 0.0),
    )
}

/// Inverse of [`from_bloch`] on the Hermitian part of `m`.
pub fn to_bloch(m: &ComplexMatrix2) -> (f64, [f64; 3]) {
    let a = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let z = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    // average the two off-diagonal entries so tiny anti-Hermitian noise cancels
    let off = 0.5 * (m[(1, 0)] + m[(0, 1)].conj());
    (a, [off.re, off.im, z])
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix2, b: &ComplexMatrix2) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn approx_eq(a: &ComplexMatrix2, b: &ComplexMatrix2, tol: f64) -> bool {
    max_abs_diff(a, b) <= tol
}

pub fn is_finite(m: &ComplexMatrix2) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_hermitian(m: &ComplexMatrix2, tol: f64) -> bool {
    is_finite(m) && max_abs_diff(m, &m.adjoint()) <= tol
}

pub fn hermitian_part(m: &ComplexMatrix2) -> ComplexMatrix2 {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn trace(m: &ComplexMatrix2) -> C64 {
    m[(0, 0)] + m[(1, 1)]
}

/// `Tr[a b]` without forming the product.
pub fn trace_product(a: &ComplexMatrix2, b: &ComplexMatrix2) -> C64 {
    a[(0, 0)] * b[(0, 0)] + a[(0, 1)] * b[(1, 0)] + a[(1, 0)] * b[(0, 1)] + a[(1, 1)] * b[(1, 1)]
}

/// Real part of `Tr[a b]` for Hermitian `a`, `b`.
pub fn expectation(a: &ComplexMatrix2, b: &ComplexMatrix2) -> f64 {
    trace_product(a, b).re
}

pub fn outer(u: &ComplexVector2, v: &ComplexVector2) -> ComplexMatrix2 {
    u * v.adjoint()
}

/// Spectral data of a Hermitian 2×2 matrix.
///
/// Eigenvalues are ascending; `eigenvectors[i]` spans the range of
/// `projectors[i]` and has its first non-negligible component real and
/// positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: [f64; 2],
    pub eigenvectors: [ComplexVector2; 2],
    pub projectors: [ComplexMatrix2; 2],
    /// True when the eigenvalue gap fell below [`DEGENERACY_TOL`] and the
    /// basis was taken from a reference operator.
    pub degenerate: bool,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix2 {
        self.projectors[0] * c(self.eigenvalues[0], 0.0)
            + self.projectors[1] * c(self.eigenvalues[1], 0.0)
    }

    /// Diagonal of `m` in this eigenbasis, i.e. `Tr[P_i m]`.
    pub fn populations(&self, m: &ComplexMatrix2) -> [f64; 2] {
        [
            expectation(&self.projectors[0], m),
            expectation(&self.projectors[1], m),
        ]
    }
}

/// Projector pair `(I - n·σ)/2, (I + n·σ)/2` for a unit vector `n`.
fn projectors_along(n: [f64; 3]) -> [ComplexMatrix2; 2] {
    let lower = from_bloch(0.5, [-0.5 * n[0], -0.5 * n[1], -0.5 * n[2]]);
    let upper = from_bloch(0.5, [0.5 * n[0], 0.5 * n[1], 0.5 * n[2]]);
    [lower, upper]
}

/// Unit vector in the range of a rank-1 projector, phase-fixed so that its
/// first component with modulus above 1e-12 is real positive.
fn range_vector(p: &ComplexMatrix2) -> ComplexVector2 {
    let col0 = p.column(0).into_owned();
    let col1 = p.column(1).into_owned();
    let v = if col0.norm() >= col1.norm() { col0 } else { col1 };
    let v = v / c(v.norm(), 0.0);
    let lead = if v[0].norm() > 1e-12 { v[0] } else { v[1] };
    let phase = lead.conj() / c(lead.norm(), 0.0);
    v * phase
}

fn unit(r: [f64; 3]) -> Option<[f64; 3]> {
    let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    (n > 0.0).then(|| [r[0] / n, r[1] / n, r[2] / n])
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Degenerate spectra fall back to the computational basis; use
/// [`eig_hermitian_with_reference`] to choose the basis explicitly.
pub fn eig_hermitian(m: &ComplexMatrix2) -> Result<SpectralDecomposition> {
    eig_hermitian_impl(m, None)
}

/// Spectral decomposition whose projectors, for a degenerate `m`, are the
/// eigenprojectors of `reference`.
pub fn eig_hermitian_with_reference(
    m: &ComplexMatrix2,
    reference: &ComplexMatrix2,
) -> Result<SpectralDecomposition> {
    eig_hermitian_impl(m, Some(reference))
}

fn eig_hermitian_impl(
    m: &ComplexMatrix2,
    reference: Option<&ComplexMatrix2>,
) -> Result<SpectralDecomposition> {
    if !is_hermitian(m, HERMITIAN_TOL) {
        return Err(OttoError::contract(format!(
            "eig_hermitian: input is not Hermitian (anti-Hermitian part {:.3e})",
            max_abs_diff(m, &m.adjoint())
        )));
    }
    let (a, r) = to_bloch(m);
    let radius = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    let eigenvalues = [a - radius, a + radius];
    let degenerate = 2.0 * radius < DEGENERACY_TOL;

    let axis = if degenerate {
        reference
            .and_then(|h| {
                if !is_hermitian(h, HERMITIAN_TOL) {
                    return None;
                }
                let (_, rr) = to_bloch(h);
                unit(rr)
            })
            .unwrap_or([0.0, 0.0, 1.0])
    } else {
        unit(r).expect("nonzero Bloch vector")
    };
    let projectors = projectors_along(axis);
    let eigenvectors = [range_vector(&projectors[0]), range_vector(&projectors[1])];
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        projectors,
        degenerate,
    })
}

/// `exp(-i h t)` for Hermitian `h`, exact for 2×2.
pub fn exp_minus_i_hermitian(h: &ComplexMatrix2, t: f64) -> ComplexMatrix2 {
    let (a, r) = to_bloch(h);
    let radius = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    let phase = c(0.0, -a * t).exp();
    let theta = radius * t;
    let (s, co) = theta.sin_cos();
    let mut out = identity2() * c(co, 0.0);
    if radius > 0.0 {
        let n = [r[0] / radius, r[1] / radius, r[2] / radius];
        let n_sigma = from_bloch(0.0, n);
        out -= n_sigma * c(0.0, s);
    }
    out * phase
}

pub fn is_unitary(u: &ComplexMatrix2, tol: f64) -> bool {
    max_abs_diff(&(u.adjoint() * u), &identity2()) <= tol
}
