//! Dense statevectors and matrix-free Pauli-sum application.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

pub type Complex64 = nalgebra::Complex<f64>;

/// Largest register held as a dense statevector.
pub const MAX_STATE_QUBITS: usize = 30;

// Fixed block size for parallel kernels; reductions combine blocks in index
// order, so results do not depend on the worker count.
const BLOCK: usize = 1 << 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVec {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVec {
    pub fn zeros(n_qubits: usize) -> Result<Self> {
        guard(n_qubits)?;
        Ok(StateVec {
            n_qubits,
            amps: vec![ZERO; 1 << n_qubits],
        })
    }

    /// Computational basis state `|index⟩` (qubit 0 is the most significant bit).
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut v = Self::zeros(n_qubits)?;
        if index >= v.amps.len() {
            return Err(Error::Domain(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        v.amps[index] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_amps(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.max(1).next_power_of_two(),
                found: len,
            });
        }
        let n_qubits = len.trailing_zeros() as usize;
        guard(n_qubits)?;
        Ok(StateVec { n_qubits, amps })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::from_amps(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Haar-like random unit vector (normalized complex Gaussian).
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        guard(n_qubits)?;
        let amps = (0..1usize << n_qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut v = StateVec { n_qubits, amps };
        v.normalize()?;
        Ok(v)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        inner_unchecked(&self.amps, &self.amps).re.max(0.0).sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NotNormalized { norm: n });
        }
        self.scale(Complex64::new(1.0 / n, 0.0));
        Ok(())
    }

    pub fn scale(&mut self, a: Complex64) {
        self.amps.iter_mut().for_each(|x| *x *= a);
    }

    /// `self += a · other`
    pub fn axpy(&mut self, a: Complex64, other: &StateVec) -> Result<()> {
        check_same(self, other)?;
        self.amps
            .iter_mut()
            .zip(&other.amps)
            .for_each(|(x, y)| *x += a * y);
        Ok(())
    }
}

fn guard(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_STATE_QUBITS {
        Err(Error::SizeGuard {
            what: "statevector qubits",
            limit: MAX_STATE_QUBITS,
            actual: n_qubits,
        })
    } else {
        Ok(())
    }
}

fn check_same(u: &StateVec, v: &StateVec) -> Result<()> {
    if u.len() != v.len() {
        Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        })
    } else {
        Ok(())
    }
}

fn inner_unchecked(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    let partial: Vec<Complex64> = u
        .par_chunks(BLOCK)
        .zip(v.par_chunks(BLOCK))
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
        .collect();
    pairwise_sum(&partial)
}

fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => ZERO,
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner(u: &StateVec, v: &StateVec) -> Result<Complex64> {
    check_same(u, v)?;
    Ok(inner_unchecked(&u.amps, &v.amps))
}

/// `H v` for a normalized Pauli sum, computed term by term on basis indices.
pub fn apply_sum(h: &PauliSum, v: &StateVec) -> Result<StateVec> {
    if h.n_qubits() != v.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1usize << h.n_qubits().min(63),
            found: v.len(),
        });
    }
    // Per-term (x mask, z mask, coeff · sign · i^{|x∧z|}).
    let kernel: Vec<(usize, u64, Complex64)> = h
        .terms()
        .iter()
        .map(|&(c, t)| (t.x_mask() as usize, t.z_mask(), t.y_phase() * (c * t.sign().value())))
        .collect();
    let src = v.amps();
    let mut out = vec![ZERO; src.len()];
    out.par_chunks_mut(BLOCK)
        .enumerate()
        .for_each(|(block, chunk)| {
            let offset = block * BLOCK;
            for (i, slot) in chunk.iter_mut().enumerate() {
                let b = offset + i;
                let mut acc = ZERO;
                for &(x, z, f) in &kernel {
                    let s = b ^ x;
                    let term = f * src[s];
                    if ((s as u64) & z).count_ones() & 1 == 1 {
                        acc -= term;
                    } else {
                        acc += term;
                    }
                }
                *slot = acc;
            }
        });
    StateVec::from_amps(out)
}

/// `⟨v|H|v⟩ / ⟨v|v⟩`
pub fn rayleigh_quotient(h: &PauliSum, v: &StateVec) -> Result<f64> {
    let hv = apply_sum(h, v)?;
    let num = inner(v, &hv)?;
    let den = inner(v, v)?;
    Ok(num.re / den.re)
}
