// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Five-corner dynamic Bayesian network for work and heat statistics.
//!
//! Each corner state is resolved in its own eigenbasis (the hidden
//! variable). Hidden outcomes are chained by the stroke maps, and corner
//! energies are inferred from the hidden projectors. Summing over hidden
//! histories gives a distribution over the 2⁵ energy histories whose
//! averages coincide with those of the unmeasured coherent cycle.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cycle::{CornerSet, StrokeMaps};
use crate::error::{OttoError, Result};
use crate::numeric::{sum, CompensatedSum};
use crate::quantum::linalg::{c, expectation};
use crate::quantum::{ComplexMatrix2, DensityMatrix};

/// Negative probabilities above this are roundoff and are set to zero.
pub const CLIP_TOL: f64 = 1e-12;
/// Outcomes with `Tr[Pρ]` below this are excluded branches.
pub const ZERO_WEIGHT: f64 = 1e-14;
pub const N_PATHS: usize = 32;

/// `PρP / Tr[Pρ]`, or `None` for an excluded branch.
pub fn conditional_state(rho: &DensityMatrix, p: &ComplexMatrix2) -> Option<DensityMatrix> {
    let weight = expectation(p, rho.matrix());
    if weight <= ZERO_WEIGHT {
        return None;
    }
    let m = p * rho.matrix() * p * c(1.0 / weight, 0.0);
    Some(DensityMatrix::from_channel_output(m))
}

/// Clips roundoff negatives and rejects genuine ones.
pub(crate) fn clip_probability(p: f64) -> Result<f64> {
    if p >= 0.0 {
        Ok(p)
    } else if p >= -CLIP_TOL {
        Ok(0.0)
    } else {
        Err(OttoError::NegativeProbability(p))
    }
}

fn normalize_row(row: [f64; 2]) -> Result<[f64; 2]> {
    let row = [clip_probability(row[0])?, clip_probability(row[1])?];
    let total = row[0] + row[1];
    if !(total > 0.0) {
        return Err(OttoError::contract("stochastic row with zero total weight"));
    }
    Ok([row[0] / total, row[1] / total])
}

/// Markov chain over hidden corner outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenChain {
    /// `p1(α)`, the spectrum of ρ1.
    pub initial: [f64; 2],
    /// `kernels[a][α][β] = T_{a+2|a+1}(β|α)`.
    pub kernels: [[[f64; 2]; 2]; 4],
}

impl HiddenChain {
    /// Marginal distribution of the hidden outcome at each corner.
    pub fn marginals(&self) -> [[f64; 2]; 5] {
        let mut out = [self.initial; 5];
        for a in 0..4 {
            let prev = out[a];
            let k = &self.kernels[a];
            out[a + 1] = [
                prev[0] * k[0][0] + prev[1] * k[1][0],
                prev[0] * k[0][1] + prev[1] * k[1][1],
            ];
        }
        out
    }
}

/// `T(β|α) = Tr[P_β^{(b)} M(σ_α^{(a)})]` with `σ_α = P_α` for rank-1 hidden
/// projectors.
pub fn build_hidden_chain(corners: &CornerSet, maps: &StrokeMaps) -> Result<HiddenChain> {
    let p1 = corners.state_decomps[0].populations(corners.states[0].matrix());
    let initial = normalize_row(p1)?;
    let mut kernels = [[[0.0; 2]; 2]; 4];
    for (a, map) in maps.in_order().into_iter().enumerate() {
        let from = &corners.state_decomps[a];
        let to = &corners.state_decomps[a + 1];
        for alpha in 0..2 {
            let image = map.apply(&from.projectors[alpha]);
            kernels[a][alpha] = normalize_row(to.populations(&image))?;
        }
    }
    Ok(HiddenChain { initial, kernels })
}

/// Conditional energy probabilities `p(e_j | α)` at each corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyInference {
    /// `conditionals[a][α][j]`.
    pub conditionals: [[[f64; 2]; 2]; 5],
    /// `energies[a][j]`, ascending.
    pub energies: [[f64; 2]; 5],
    /// `(corner, α)` pairs whose hidden outcome has zero weight; their rows
    /// are the Born probabilities of the projector itself.
    pub zero_weight_rows: Vec<(usize, usize)>,
}

/// `p(e_j|α) = Tr[Π_j P_α ρ P_α] / Tr[P_α ρ]`.
///
/// For rank-1 `P_α` this is `Tr[Π_j P_α]` whenever the outcome has weight,
/// which is also the zero-weight limit, so the closed form is used
/// throughout.
pub fn build_energy_inference(corners: &CornerSet) -> Result<EnergyInference> {
    let mut conditionals = [[[0.0; 2]; 2]; 5];
    let mut energies = [[0.0; 2]; 5];
    let mut zero_weight_rows = Vec::new();
    for a in 0..5 {
        let hidden = &corners.state_decomps[a];
        let energy = &corners.energy_decomps[a];
        energies[a] = energy.eigenvalues;
        let weights = hidden.populations(corners.states[a].matrix());
        for alpha in 0..2 {
            if weights[alpha] <= ZERO_WEIGHT {
                zero_weight_rows.push((a, alpha));
            }
            conditionals[a][alpha] = normalize_row(energy.populations(&hidden.projectors[alpha]))?;
        }
    }
    Ok(EnergyInference {
        conditionals,
        energies,
        zero_weight_rows,
    })
}

/// One energy history `(j1..j5)` with its stochastic energetics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub indices: [u8; 5],
    pub prob: f64,
    pub w_ch: f64,
    pub q_h: f64,
    pub w_hc: f64,
    pub q_c: f64,
    pub w: f64,
    /// `W + Q_h + Q_c`, the pathwise cycle residual `e5 − e1`.
    pub residual: f64,
}

impl PathRecord {
    pub fn with_energies(indices: [u8; 5], prob: f64, energies: &[[f64; 2]; 5]) -> Self {
        let e: [f64; 5] = std::array::from_fn(|a| energies[a][indices[a] as usize]);
        let w_ch = e[1] - e[0];
        let q_h = e[2] - e[1];
        let w_hc = e[3] - e[2];
        let q_c = e[4] - e[3];
        let w = w_ch + w_hc;
        PathRecord {
            indices,
            prob,
            w_ch,
            q_h,
            w_hc,
            q_c,
            w,
            residual: w + q_h + q_c,
        }
    }

    /// Bit `a` of `k` (most significant first) is `j_{a+1}`.
    pub fn indices_of(k: usize) -> [u8; 5] {
        std::array::from_fn(|a| ((k >> (4 - a)) & 1) as u8)
    }
}

/// Joint distribution over the 32 energy histories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDistribution {
    pub paths: Vec<PathRecord>,
}

/// Quantity whose path statistics are requested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    Work,
    HeatHot,
    HeatCold,
    /// `−W(j)/τ_cyc`.
    Power { tau_cycle: f64 },
    /// `−W(j)/⟨Q_h⟩`.
    EtaReg { mean_qh: f64 },
    /// `−W(j)/Q_h(j)`, skipping paths with `|Q_h(j)| < eps`.
    EtaLiteral { eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub std: f64,
    /// Paths excluded as singular (literal efficiency only).
    pub singular_paths: usize,
    /// Probability carried by the excluded paths.
    pub singular_weight: f64,
}

impl PathDistribution {
    /// Builds the distribution from precomputed chain and inference.
    pub fn from_parts(chain: &HiddenChain, inference: &EnergyInference) -> Result<Self> {
        let mut raw = [0.0; N_PATHS];
        for (k, slot) in raw.iter_mut().enumerate() {
            let j = PathRecord::indices_of(k);
            // forward recursion over hidden outcomes
            let cond = |a: usize, alpha: usize| inference.conditionals[a][alpha][j[a] as usize];
            let mut f = [chain.initial[0] * cond(0, 0), chain.initial[1] * cond(0, 1)];
            for a in 0..4 {
                let t = &chain.kernels[a];
                f = [
                    (f[0] * t[0][0] + f[1] * t[1][0]) * cond(a + 1, 0),
                    (f[0] * t[0][1] + f[1] * t[1][1]) * cond(a + 1, 1),
                ];
            }
            *slot = clip_probability(f[0] + f[1])?;
        }
        let total = sum(raw);
        let paths = raw
            .iter()
            .enumerate()
            .map(|(k, &p)| PathRecord::with_energies(PathRecord::indices_of(k), p / total, &inference.energies))
            .collect();
        Ok(PathDistribution { paths })
    }

    pub fn total_probability(&self) -> f64 {
        sum(self.paths.iter().map(|p| p.prob))
    }

    /// Exact mean and variance over the 32 paths (two-pass, compensated).
    pub fn moments(&self, observable: Observable) -> Result<Moments> {
        let value = |p: &PathRecord| -> Option<f64> {
            match observable {
                Observable::Work => Some(p.w),
                Observable::HeatHot => Some(p.q_h),
                Observable::HeatCold => Some(p.q_c),
                Observable::Power { tau_cycle } => Some(-p.w / tau_cycle),
                Observable::EtaReg { mean_qh } => Some(-p.w / mean_qh),
                Observable::EtaLiteral { eps } => (p.q_h.abs() >= eps).then(|| -p.w / p.q_h),
            }
        };
        match observable {
            Observable::Power { tau_cycle } if !(tau_cycle > 0.0) => {
                return Err(OttoError::Domain(format!("cycle time {tau_cycle} must be positive")));
            }
            Observable::EtaReg { mean_qh } if !(mean_qh > 0.0) => {
                return Err(OttoError::OutsideEngine(format!(
                    "regularized efficiency needs mean Q_h > 0, got {mean_qh:e}"
                )));
            }
            _ => {}
        }
        let mut singular_paths = 0;
        let mut singular = CompensatedSum::new();
        let mut weight = CompensatedSum::new();
        let mut first = CompensatedSum::new();
        for p in &self.paths {
            match value(p) {
                Some(x) => {
                    weight.add(p.prob);
                    first.add(p.prob * x);
                }
                None => {
                    singular_paths += 1;
                    singular.add(p.prob);
                }
            }
        }
        let kept = weight.value();
        if !(kept > 0.0) {
            return Err(OttoError::Domain("no path carries weight for this observable".into()));
        }
        let mean = first.value() / kept;
        let second: CompensatedSum = self
            .paths
            .iter()
            .filter_map(|p| value(p).map(|x| p.prob * (x - mean) * (x - mean)))
            .collect();
        let variance = (second.value() / kept).max(0.0);
        Ok(Moments {
            mean,
            variance,
            std: variance.sqrt(),
            singular_paths,
            singular_weight: singular.value(),
        })
    }

    pub fn mean(&self, observable: Observable) -> Result<f64> {
        Ok(self.moments(observable)?.mean)
    }

    /// Writes `j1..j5, prob, W, Qh, Qc` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["j1", "j2", "j3", "j4", "j5", "prob", "W", "Qh", "Qc"])
            .map_err(csv_err)?;
        for p in &self.paths {
            let mut row: Vec<String> = p.indices.iter().map(|j| j.to_string()).collect();
            row.extend([p.prob, p.w, p.q_h, p.q_c].iter().map(|x| format!("{x:e}")));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> OttoError {
    OttoError::Io(std::io::Error::other(e))
}

/// Chain, inference and path distribution for a converged cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbnResult {
    pub chain: HiddenChain,
    pub inference: EnergyInference,
    pub distribution: PathDistribution,
}

pub fn path_distribution(corners: &CornerSet, maps: &StrokeMaps) -> Result<DbnResult> {
    let chain = build_hidden_chain(corners, maps)?;
    let inference = build_energy_inference(corners)?;
    let distribution = PathDistribution::from_parts(&chain, &inference)?;
    Ok(DbnResult {
        chain,
        inference,
        distribution,
    })
}

/// Compact moment summary attached to operating-point records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbnSummary {
    pub mean_work: f64,
    pub sigma_work: f64,
    pub mean_qh: f64,
    pub sigma_qh: f64,
    pub mean_qc: f64,
    pub sigma_qc: f64,
    pub normalization: f64,
}

impl PathDistribution {
    pub fn summary(&self) -> Result<DbnSummary> {
        let w = self.moments(Observable::Work)?;
        let qh = self.moments(Observable::HeatHot)?;
        let qc = self.moments(Observable::HeatCold)?;
        Ok(DbnSummary {
            mean_work: w.mean,
            sigma_work: w.std,
            mean_qh: qh.mean,
            sigma_qh: qh.std,
            mean_qc: qc.mean,
            sigma_qc: qc.std,
            normalization: self.total_probability(),
        })
    }
}
