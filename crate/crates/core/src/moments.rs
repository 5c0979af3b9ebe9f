//! Chebyshev moments `μ_k = ⟨ψ₀|T_k(H)|ψ₀⟩`, the only quantities a device
//! would have to estimate, and their Gaussian-noise replicas.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::state::{apply_sum, inner, Complex64, StateVec};

/// Tolerance on `‖ψ₀‖ = 1`.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseInfo {
    pub eta: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSeq {
    /// Krylov dimension `D`; `mu` holds `μ_0 … μ_{2D-1}`.
    pub d_max: usize,
    pub mu: Vec<f64>,
    #[serde(default)]
    pub noise: Option<NoiseInfo>,
    /// Physical energy units per normalized unit (the Hamiltonian's ℓ1 norm).
    #[serde(default = "unit_scale")]
    pub scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl MomentSeq {
    pub fn new(mu: Vec<f64>, scale: f64) -> Result<Self> {
        if mu.is_empty() || mu.len() % 2 != 0 {
            return Err(Error::LengthMismatch {
                expected: (mu.len() + 1) & !1,
                found: mu.len(),
            });
        }
        Ok(MomentSeq {
            d_max: mu.len() / 2,
            mu,
            noise: None,
            scale,
        })
    }

    pub fn is_noiseless(&self) -> bool {
        self.noise.is_none()
    }

    /// Leading `2d` moments, i.e. the sequence for Krylov dimension `d`.
    pub fn truncate(&self, d: usize) -> Result<MomentSeq> {
        if d == 0 || d > self.d_max {
            return Err(Error::LengthMismatch {
                expected: 2 * d,
                found: self.mu.len(),
            });
        }
        Ok(MomentSeq {
            d_max: d,
            mu: self.mu[..2 * d].to_vec(),
            noise: self.noise,
            scale: self.scale,
        })
    }
}

/// Complex inner products `⟨ψ₀|φ_k⟩` for `k < 2d` via
/// `φ_{k+1} = 2Hφ_k − φ_{k−1}`, holding two live vectors.
pub fn raw_moments(h: &PauliSum, psi0: &StateVec, d: usize) -> Result<Vec<Complex64>> {
    if d == 0 {
        return Err(Error::Domain("Krylov dimension must be at least 1".into()));
    }
    if psi0.n_qubits() != h.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1usize << h.n_qubits().min(63),
            found: psi0.len(),
        });
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    let count = 2 * d;
    let mut out = Vec::with_capacity(count);
    let mut prev = psi0.clone();
    out.push(inner(psi0, &prev)?);
    let mut curr = apply_sum(h, psi0)?;
    out.push(inner(psi0, &curr)?);
    for _ in 2..count {
        let mut next = apply_sum(h, &curr)?;
        next.scale(Complex64::new(2.0, 0.0));
        next.axpy(Complex64::new(-1.0, 0.0), &prev)?;
        out.push(inner(psi0, &next)?);
        prev = curr;
        curr = next;
    }
    Ok(out)
}

/// `μ_k = Re⟨ψ₀|T_k(H)|ψ₀⟩` for `k = 0 … 2d−1`. The imaginary parts vanish
/// for Hermitian `H` and are dropped; `μ_0` is set to exactly 1.
pub fn compute_moments(h: &PauliSum, psi0: &StateVec, d: usize) -> Result<MomentSeq> {
    let raw = raw_moments(h, psi0, d)?;
    let mut mu: Vec<f64> = raw.iter().map(|c| c.re).collect();
    mu[0] = 1.0;
    MomentSeq::new(mu, h.scale())
}

/// Adds i.i.d. `N(0, η²)` to `μ_1 … μ_{2D−1}`; `μ_0` is left at 1.
///
/// Deterministic in `seed`. The returned sequence records `(eta, seed)`; if
/// `m` already carried noise, that record is replaced.
pub fn add_noise(m: &MomentSeq, eta: f64, seed: u64) -> Result<MomentSeq> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::Domain(format!("noise rate must be nonnegative, got {eta}")));
    }
    let mut out = m.clone();
    out.noise = Some(NoiseInfo { eta, seed });
    if eta == 0.0 {
        return Ok(out);
    }
    let normal = Normal::new(0.0, eta).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for mu in out.mu.iter_mut().skip(1) {
        *mu += normal.sample(&mut rng);
    }
    Ok(out)
}

/// `count` independent noisy replicas; replica `t` uses seed `seed ^ t`.
pub fn noisy_replicas(m: &MomentSeq, eta: f64, seed: u64, count: usize) -> Result<Vec<MomentSeq>> {
    use rayon::prelude::*;
    (0..count as u64)
        .into_par_iter()
        .map(|t| add_noise(m, eta, seed ^ t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{normalize, PauliTerm};

    fn single(label: &str) -> PauliSum {
        normalize(&[(1.0, PauliTerm::from_label(label).unwrap())]).unwrap()
    }

    #[test]
    fn z_on_zero_is_all_ones() {
        let m = compute_moments(&single("Z"), &StateVec::basis(1, 0).unwrap(), 6).unwrap();
        assert_eq!(m.mu.len(), 12);
        assert!(m.mu.iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn x_on_zero_alternates() {
        let m = compute_moments(&single("X"), &StateVec::basis(1, 0).unwrap(), 5).unwrap();
        for (k, &x) in m.mu.iter().enumerate() {
            let expect = if k % 2 == 0 { 1.0 } else { 0.0 };
            assert!((x - expect).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let h = single("Z");
        let mut v = StateVec::basis(1, 0).unwrap();
        v.scale(Complex64::new(1.1, 0.0));
        assert!(matches!(
            compute_moments(&h, &v, 2),
            Err(Error::NotNormalized { .. })
        ));
        let wide = StateVec::basis(2, 0).unwrap();
        assert!(matches!(
            compute_moments(&h, &wide, 2),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(compute_moments(&h, &StateVec::basis(1, 0).unwrap(), 0).is_err());
    }

    #[test]
    fn zero_noise_is_identity() {
        let m = compute_moments(&single("X"), &StateVec::basis(1, 0).unwrap(), 4).unwrap();
        let noisy = add_noise(&m, 0.0, 99).unwrap();
        assert_eq!(noisy.mu, m.mu);
        assert_eq!(noisy.noise, Some(NoiseInfo { eta: 0.0, seed: 99 }));
    }

    #[test]
    fn noise_is_reproducible_and_spares_mu0() {
        let m = compute_moments(&single("X"), &StateVec::basis(1, 0).unwrap(), 4).unwrap();
        let a = add_noise(&m, 1e-3, 7).unwrap();
        let b = add_noise(&m, 1e-3, 7).unwrap();
        let c = add_noise(&m, 1e-3, 8).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_ne!(a.mu, c.mu);
        assert_eq!(a.mu[0], 1.0);
        assert!(a.mu[1..].iter().zip(&m.mu[1..]).all(|(x, y)| x != y));
    }

    #[test]
    fn noise_standard_deviation() {
        let m = MomentSeq::new(vec![1.0, 0.0], 1.0).unwrap();
        let eta = 1e-2;
        let reps = noisy_replicas(&m, eta, 2024, 100_000).unwrap();
        let n = reps.len() as f64;
        let mean = reps.iter().map(|r| r.mu[1]).sum::<f64>() / n;
        let var = reps.iter().map(|r| (r.mu[1] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var.sqrt() / eta - 1.0).abs() < 0.03);
    }

    #[test]
    fn truncate_and_json() {
        let m = MomentSeq::new(vec![1.0, 0.5, 0.1, 0.2], 3.0).unwrap();
        let t = m.truncate(1).unwrap();
        assert_eq!(t.mu, vec![1.0, 0.5]);
        assert!(m.truncate(3).is_err());
        let back: MomentSeq = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(MomentSeq::new(vec![1.0, 2.0, 3.0], 1.0).is_err());
    }
}
