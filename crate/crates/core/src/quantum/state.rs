// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Qubit density matrices and entropic functionals (natural log).

use serde::{Deserialize, Serialize};

use super::linalg::{
    c, eig_hermitian, eig_hermitian_with_reference, from_bloch, hermitian_part, is_finite,
    max_abs_diff, outer, to_bloch, trace, ComplexMatrix2, ComplexVector2, SpectralDecomposition,
};
use crate::error::{OttoError, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = -1e-10;
/// Eigenvalues of the second argument of a relative entropy below this are
/// treated as outside its support.
pub const SUPPORT_TOL: f64 = 1e-14;

/// Hermitian, unit-trace, positive semidefinite 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(ComplexMatrix2);

impl DensityMatrix {
    /// Validates the density-matrix invariants.
    pub fn new(m: ComplexMatrix2) -> Result<Self> {
        if !is_finite(&m) {
            return Err(OttoError::contract("density matrix has non-finite entries"));
        }
        let anti = max_abs_diff(&m, &m.adjoint());
        if anti > HERMITIAN_TOL {
            return Err(OttoError::contract(format!(
                "density matrix not Hermitian ({anti:.3e})"
            )));
        }
        let tr = trace(&m);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(OttoError::contract(format!("density matrix trace {tr}")));
        }
        let rho = DensityMatrix(hermitian_part(&m));
        let lowest = rho.eigenvalues()[0];
        if lowest < POSITIVITY_TOL {
            return Err(OttoError::contract(format!(
                "density matrix has negative eigenvalue {lowest:.3e}"
            )));
        }
        Ok(rho)
    }

    /// Projects `m` onto the Hermitian unit-trace matrices without checking
    /// positivity. Used after channel applications that are CPTP up to roundoff.
    pub(crate) fn from_channel_output(m: ComplexMatrix2) -> Self {
        let h = hermitian_part(&m);
        let tr = trace(&h).re;
        DensityMatrix(h * c(1.0 / tr, 0.0))
    }

    pub fn pure(psi: &ComplexVector2) -> Self {
        let psi = psi / c(psi.norm(), 0.0);
        DensityMatrix(outer(&psi, &psi))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(from_bloch(0.5, [0.0; 3]))
    }

    /// `diag(p0, p1)` in the computational basis.
    pub fn diagonal(p0: f64, p1: f64) -> Result<Self> {
        let mut m = ComplexMatrix2::zeros();
        m[(0, 0)] = c(p0, 0.0);
        m[(1, 1)] = c(p1, 0.0);
        Self::new(m)
    }

    /// `(I + r·σ)/2`; requires `|r| ≤ 1`.
    pub fn from_bloch_vector(r: [f64; 3]) -> Result<Self> {
        Self::new(from_bloch(0.5, [0.5 * r[0], 0.5 * r[1], 0.5 * r[2]]))
    }

    /// `Σ p_k P_k` for a projector pair.
    pub fn from_populations(p: [f64; 2], projectors: &[ComplexMatrix2; 2]) -> Result<Self> {
        Self::new(projectors[0] * c(p[0], 0.0) + projectors[1] * c(p[1], 0.0))
    }

    pub fn matrix(&self) -> &ComplexMatrix2 {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix2 {
        self.0
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        let (_, r) = to_bloch(&self.0);
        [2.0 * r[0], 2.0 * r[1], 2.0 * r[2]]
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        let r = self.bloch_vector();
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        [0.5 * (1.0 - len), 0.5 * (1.0 + len)]
    }

    pub fn spectral(&self) -> SpectralDecomposition {
        eig_hermitian(&self.0).expect("density matrices are Hermitian")
    }

    /// Spectral decomposition with degenerate spectra resolved in the
    /// eigenbasis of `reference`.
    pub fn spectral_with_reference(&self, reference: &ComplexMatrix2) -> SpectralDecomposition {
        eig_hermitian_with_reference(&self.0, reference).expect("density matrices are Hermitian")
    }

    pub fn purity(&self) -> f64 {
        let r = self.bloch_vector();
        0.5 * (1.0 + r[0] * r[0] + r[1] * r[1] + r[2] * r[2])
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.bloch_vector().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = <[f64; 3]>::deserialize(d)?;
        DensityMatrix::from_bloch_vector(r).map_err(serde::de::Error::custom)
    }
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let (a, r) = to_bloch(&(rho.0 - sigma.0));
    let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    0.5 * ((a + len).abs() + (a - len).abs())
}

fn entropy_of(p: [f64; 2]) -> f64 {
    p.iter()
        .map(|&x| x.max(0.0))
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.ln())
        .sum()
}

/// `S(ρ) = −Tr ρ ln ρ`, eigenvalues clipped at zero.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of(rho.eigenvalues())
}

/// Complete dephasing in the eigenbasis of `h`.
pub fn dephase(rho: &DensityMatrix, h: &ComplexMatrix2) -> Result<DensityMatrix> {
    let basis = eig_hermitian(h)?;
    Ok(dephase_in(rho, &basis))
}

/// Complete dephasing in a precomputed basis.
pub fn dephase_in(rho: &DensityMatrix, basis: &SpectralDecomposition) -> DensityMatrix {
    let p = basis.populations(&rho.0);
    DensityMatrix(basis.projectors[0] * c(p[0], 0.0) + basis.projectors[1] * c(p[1], 0.0))
}

/// Result of a relative entropy evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum RelativeEntropy {
    Finite(f64),
    /// `supp ρ ⊄ supp σ`; the relative entropy is `+∞`.
    Infinite,
}

impl RelativeEntropy {
    pub fn value(self) -> f64 {
        match self {
            RelativeEntropy::Finite(v) => v,
            RelativeEntropy::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, RelativeEntropy::Finite(_))
    }
}

/// `S(ρ‖σ) = Tr[ρ(ln ρ − ln σ)]`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> RelativeEntropy {
    let rho_d = rho.spectral();
    let sigma_d = sigma.spectral();
    let lam = rho.eigenvalues();
    let mu = sigma.eigenvalues();

    let mut value = -entropy_of(lam);
    for k in 0..2 {
        // weight of ρ on the k-th eigenvector of σ
        let weight: f64 = (0..2)
            .map(|i| lam[i].max(0.0) * super::linalg::expectation(&rho_d.projectors[i], &sigma_d.projectors[k]))
            .sum();
        if mu[k] < SUPPORT_TOL {
            if weight > SUPPORT_TOL {
                return RelativeEntropy::Infinite;
            }
            continue;
        }
        value -= weight * mu[k].ln();
    }
    RelativeEntropy::Finite(value.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{pauli_x, pauli_z};
    use std::f64::consts::LN_2;

    fn ket0() -> DensityMatrix {
        DensityMatrix::diagonal(1.0, 0.0).unwrap()
    }

    fn ket1() -> DensityMatrix {
        DensityMatrix::diagonal(0.0, 1.0).unwrap()
    }

    fn plus_x() -> DensityMatrix {
        DensityMatrix::from_bloch_vector([1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(DensityMatrix::diagonal(0.6, 0.6).is_err());
        assert!(DensityMatrix::diagonal(1.2, -0.2).is_err());
        assert!(DensityMatrix::from_bloch_vector([0.0, 0.0, 1.0 + 1e-12]).is_ok());
        let mut m = *plus_x().matrix();
        m[(0, 1)] = c(0.5, 0.1);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let rho = DensityMatrix::from_bloch_vector([0.3, -0.2, 0.5]).unwrap();
        assert_eq!(trace_distance(&rho, &rho), 0.0);
        assert!((trace_distance(&ket0(), &ket1()) - 1.0).abs() < 1e-15);
        let half = DensityMatrix::maximally_mixed();
        assert!((trace_distance(&half, &ket0()) - 0.5).abs() < 1e-15);
        assert!((trace_distance(&ket0(), &half) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(von_neumann_entropy(&plus_x()), 0.0);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed()) - LN_2).abs() < 1e-15);
        let r = DensityMatrix::diagonal(0.8, 0.2).unwrap();
        let expected = -0.8 * 0.8f64.ln() - 0.2 * 0.2f64.ln();
        assert!((von_neumann_entropy(&r) - expected).abs() < 1e-14);
        assert!((expected - 0.5004).abs() < 1e-4);
    }

    #[test]
    fn dephase_examples() {
        let diag = DensityMatrix::diagonal(0.7, 0.3).unwrap();
        let out = dephase(&diag, &pauli_z()).unwrap();
        assert!(max_abs_diff(out.matrix(), diag.matrix()) < 1e-15);
        let out = dephase(&plus_x(), &pauli_z()).unwrap();
        assert!(max_abs_diff(out.matrix(), DensityMatrix::maximally_mixed().matrix()) < 1e-15);
        // commutes with the dephasing Hamiltonian
        let rho = DensityMatrix::from_bloch_vector([0.3, 0.4, 0.1]).unwrap();
        let out = dephase(&rho, &pauli_x()).unwrap();
        let comm = pauli_x() * out.matrix() - out.matrix() * pauli_x();
        assert!(comm.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = DensityMatrix::from_bloch_vector([0.1, 0.2, 0.3]).unwrap();
        assert!(relative_entropy(&rho, &rho).value().abs() < 1e-14);
        let r = relative_entropy(&ket0(), &DensityMatrix::maximally_mixed()).value();
        assert!((r - LN_2).abs() < 1e-14);
        let r = relative_entropy(
            &DensityMatrix::diagonal(0.8, 0.2).unwrap(),
            &DensityMatrix::maximally_mixed(),
        )
        .value();
        let expected = 0.8 * 1.6f64.ln() + 0.2 * 0.4f64.ln();
        assert!((r - expected).abs() < 1e-14);
        assert!((expected - 0.1927).abs() < 1e-4);
    }

    #[test]
    fn relative_entropy_support_violation() {
        let r = relative_entropy(&DensityMatrix::maximally_mixed(), &ket0());
        assert_eq!(r, RelativeEntropy::Infinite);
        // support contained: finite
        let r = relative_entropy(&ket0(), &ket0());
        assert_eq!(r, RelativeEntropy::Finite(0.0));
    }

    #[test]
    fn serde_uses_bloch_vector() {
        let rho = DensityMatrix::from_bloch_vector([0.25, -0.5, 0.125]).unwrap();
        let s = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&s).unwrap();
        assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-15);
    }
}
