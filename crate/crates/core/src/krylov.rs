//! Krylov matrices from Chebyshev moments, eigenvalue thresholding of the
//! overlap matrix, and the reduced ground-energy solve.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::MomentSeq;

/// Threshold used for noiseless moments.
pub const NOISELESS_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Provenance {
    Noiseless,
    Noisy { eta: f64, seed: u64 },
}

/// Projected Hamiltonian `H_ij = ⟨T_i(H) H T_j(H)⟩₀` and overlap
/// `S_ij = ⟨T_i(H) T_j(H)⟩₀` on the Chebyshev Krylov basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrylovPair {
    pub d: usize,
    #[serde(with = "rows")]
    pub h_mat: DMatrix<f64>,
    #[serde(with = "rows")]
    pub s_mat: DMatrix<f64>,
    pub provenance: Provenance,
    pub scale: f64,
}

mod rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix must be square"));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

/// Builds `(H, S)` from `μ_0 … μ_{2D−1}` with the product identity
/// `T_i T_j = ½(T_{i+j} + T_{|i−j|})`.
pub fn assemble(m: &MomentSeq) -> Result<KrylovPair> {
    let d = m.d_max;
    if d == 0 || m.mu.len() != 2 * d {
        return Err(Error::LengthMismatch {
            expected: 2 * d,
            found: m.mu.len(),
        });
    }
    let mu = &m.mu;
    let s_mat = DMatrix::from_fn(d, d, |i, j| 0.5 * (mu[i + j] + mu[i.abs_diff(j)]));
    let h_mat = DMatrix::from_fn(d, d, |i, j| {
        let sum = i + j;
        let diff = i.abs_diff(j);
        0.25 * (mu[sum + 1] + mu[sum.abs_diff(1)] + mu[diff + 1] + mu[diff.abs_diff(1)])
    });
    let provenance = match m.noise {
        None => Provenance::Noiseless,
        Some(n) => Provenance::Noisy {
            eta: n.eta,
            seed: n.seed,
        },
    };
    Ok(KrylovPair {
        d,
        h_mat,
        s_mat,
        provenance,
        scale: m.scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub epsilon: f64,
    pub kept: usize,
    /// Discarded overlap eigenvalues, descending.
    pub discarded_eigs: Vec<f64>,
    /// Sum of the discarded eigenvalues.
    pub eps_total: f64,
    pub energy_normalized: f64,
    pub energy_physical: f64,
    /// Second-lowest reduced eigenvalue, when the kept space has one.
    pub second_energy_normalized: Option<f64>,
    /// Largest over smallest kept overlap eigenvalue.
    pub kept_condition: f64,
}

/// Overlap eigenvalues in descending order with matching eigenvector columns.
fn sorted_overlap_eigen(s: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = s.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(s.nrows(), s.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Projects onto the overlap eigenvectors with eigenvalue strictly above
/// `epsilon`, whitens them, and returns the lowest eigenvalue of the reduced
/// symmetric problem.
pub fn solve_thresholded(kp: &KrylovPair, epsilon: f64) -> Result<ThresholdReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("threshold must be positive, got {epsilon}")));
    }
    let (values, vectors) = sorted_overlap_eigen(&kp.s_mat);
    let kept = values.iter().take_while(|&&l| l > epsilon).count();
    if kept == 0 {
        return Err(Error::AllDiscarded {
            epsilon,
            largest: values.first().copied().unwrap_or(f64::NAN),
        });
    }
    let d = kp.d;
    let whiten = DMatrix::from_fn(d, kept, |r, c| vectors[(r, c)] / values[c].sqrt());
    let reduced = whiten.transpose() * &kp.h_mat * &whiten;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let mut energies: Vec<f64> = reduced.symmetric_eigenvalues().iter().copied().collect();
    energies.sort_by(f64::total_cmp);

    let discarded_eigs: Vec<f64> = values[kept..].to_vec();
    let eps_total = discarded_eigs.iter().sum();
    Ok(ThresholdReport {
        epsilon,
        kept,
        discarded_eigs,
        eps_total,
        energy_normalized: energies[0],
        energy_physical: energies[0] * kp.scale,
        second_energy_normalized: energies.get(1).copied(),
        kept_condition: values[0] / values[kept - 1],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdFamily {
    Spin,
    Molecule,
}

/// Threshold rule: a fixed floor for noiseless runs, otherwise a constant
/// times the noise rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub noiseless: f64,
    pub spin_constant: f64,
    pub molecule_constant: f64,
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        ThresholdPolicy {
            noiseless: NOISELESS_THRESHOLD,
            spin_constant: 30.0,
            molecule_constant: 50.0,
        }
    }
}

impl ThresholdPolicy {
    pub fn constant(&self, family: ThresholdFamily) -> f64 {
        match family {
            ThresholdFamily::Spin => self.spin_constant,
            ThresholdFamily::Molecule => self.molecule_constant,
        }
    }

    pub fn pick(&self, eta: f64, family: ThresholdFamily) -> f64 {
        if eta == 0.0 {
            self.noiseless
        } else {
            self.constant(family) * eta
        }
    }

    /// Same rule with the family constant replaced.
    pub fn with_constant(mut self, family: ThresholdFamily, constant: f64) -> Self {
        match family {
            ThresholdFamily::Spin => self.spin_constant = constant,
            ThresholdFamily::Molecule => self.molecule_constant = constant,
        }
        self
    }
}

pub fn pick_threshold(eta: f64, family: ThresholdFamily) -> f64 {
    ThresholdPolicy::default().pick(eta, family)
}

/// Mean of the central `⌈10%⌉` of the sorted values (at least one); the
/// median when fewer than ten values are given.
pub fn trial_statistic(energies: &[f64]) -> Result<f64> {
    if energies.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = energies.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n < 10 {
        return Ok(if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        });
    }
    let width = (n as f64 * 0.1).ceil().max(1.0) as usize;
    let start = (n - width) / 2;
    let slice = &sorted[start..start + width];
    Ok(slice.iter().sum::<f64>() / width as f64)
}
