//! Dense block encoding `U = Σᵢ |i⟩⟨i| ⊗ sᵢPᵢ` with preparation state
//! `|G⟩ = Σᵢ √αᵢ |i⟩` and reflection `R = (2|G⟩⟨G| − 𝟙) ⊗ 𝟙`.
//!
//! Indices of the joint register are `i · 2ⁿ + s`: auxiliary register high,
//! system register low.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{random_pauli_sum, PauliSum};
use crate::state::{Complex64, StateVec};

/// Limit on auxiliary plus system qubits for the dense operators.
pub const MAX_ENCODING_QUBITS: usize = 12;
/// Largest power of the walk operator extracted by [`chebyshev_block`].
pub const MAX_BLOCK_POWER: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone)]
pub struct BlockEncoding {
    pub n_sys: usize,
    pub n_aux: usize,
    pub u_op: DMatrix<Complex64>,
    pub g_vec: DVector<Complex64>,
    pub r_op: DMatrix<Complex64>,
}

fn aux_qubits(terms: usize) -> usize {
    let mut n = 0;
    while (1usize << n) < terms {
        n += 1;
    }
    n
}

pub fn build_encoding(h: &PauliSum) -> Result<BlockEncoding> {
    let n_sys = h.n_qubits();
    let n_aux = aux_qubits(h.len());
    if n_sys + n_aux > MAX_ENCODING_QUBITS {
        return Err(Error::SizeGuard {
            what: "block-encoding qubits",
            limit: MAX_ENCODING_QUBITS,
            actual: n_sys + n_aux,
        });
    }
    let sys = 1usize << n_sys;
    let aux = 1usize << n_aux;
    let dim = aux * sys;

    let mut u_op = DMatrix::from_element(dim, dim, ZERO);
    for i in 0..aux {
        let off = i * sys;
        match h.terms().get(i) {
            Some((_, p)) => {
                for col in 0..sys {
                    let row = col ^ p.x_mask() as usize;
                    u_op[(off + row, off + col)] = p.phase_on(col);
                }
            }
            None => {
                for s in 0..sys {
                    u_op[(off + s, off + s)] = ONE;
                }
            }
        }
    }

    let mut g_vec = DVector::from_element(aux, ZERO);
    for (i, &(c, _)) in h.terms().iter().enumerate() {
        g_vec[i] = Complex64::new(c.sqrt(), 0.0);
    }

    let mut r_op = DMatrix::from_element(dim, dim, ZERO);
    for i in 0..aux {
        for j in 0..aux {
            let mut v = g_vec[i] * g_vec[j].conj() * 2.0;
            if i == j {
                v -= ONE;
            }
            if v == ZERO {
                continue;
            }
            for s in 0..sys {
                r_op[(i * sys + s, j * sys + s)] = v;
            }
        }
    }

    Ok(BlockEncoding {
        n_sys,
        n_aux,
        u_op,
        g_vec,
        r_op,
    })
}

impl BlockEncoding {
    fn sys_dim(&self) -> usize {
        1 << self.n_sys
    }

    /// The walk operator `RU`.
    pub fn walk(&self) -> DMatrix<Complex64> {
        &self.r_op * &self.u_op
    }

    /// `|G⟩ ⊗ 𝟙` as a `2^{a+n} × 2ⁿ` isometry.
    pub fn prepare_isometry(&self) -> DMatrix<Complex64> {
        let sys = self.sys_dim();
        let mut m = DMatrix::from_element(self.u_op.nrows(), sys, ZERO);
        for (i, &g) in self.g_vec.iter().enumerate() {
            for s in 0..sys {
                m[(i * sys + s, s)] = g;
            }
        }
        m
    }

    /// `(⟨G| ⊗ 𝟙) M` for a matrix on the joint register.
    fn project(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let sys = self.sys_dim();
        let mut out = DMatrix::from_element(sys, m.ncols(), ZERO);
        for (i, &g) in self.g_vec.iter().enumerate() {
            if g == ZERO {
                continue;
            }
            let rows = m.rows(i * sys, sys);
            out += rows * g.conj();
        }
        out
    }

    /// `|G⟩ ⊗ ψ`
    pub fn lift(&self, psi: &StateVec) -> Result<DVector<Complex64>> {
        let sys = self.sys_dim();
        if psi.len() != sys {
            return Err(Error::DimensionMismatch {
                expected: sys,
                found: psi.len(),
            });
        }
        let mut v = DVector::from_element(self.u_op.nrows(), ZERO);
        for (i, &g) in self.g_vec.iter().enumerate() {
            for (s, &a) in psi.amps().iter().enumerate() {
                v[i * sys + s] = g * a;
            }
        }
        Ok(v)
    }
}

/// `(⟨G|⊗𝟙)(RU)^k(|G⟩⊗𝟙)`, which equals `T_k(H)`.
pub fn chebyshev_block(be: &BlockEncoding, k: usize) -> Result<DMatrix<Complex64>> {
    if k > MAX_BLOCK_POWER {
        return Err(Error::SizeGuard {
            what: "walk-operator power",
            limit: MAX_BLOCK_POWER,
            actual: k,
        });
    }
    let walk = be.walk();
    let mut m = be.prepare_isometry();
    for _ in 0..k {
        m = &walk * m;
    }
    Ok(be.project(&m))
}

/// Blocks for every power `0..=k_max`, sharing the walk products.
pub fn chebyshev_blocks(be: &BlockEncoding, k_max: usize) -> Result<Vec<DMatrix<Complex64>>> {
    if k_max > MAX_BLOCK_POWER {
        return Err(Error::SizeGuard {
            what: "walk-operator power",
            limit: MAX_BLOCK_POWER,
            actual: k_max,
        });
    }
    let walk = be.walk();
    let mut m = be.prepare_isometry();
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(be.project(&m));
    for _ in 0..k_max {
        m = &walk * m;
        out.push(be.project(&m));
    }
    Ok(out)
}

/// `μ_k` from the circuit picture: with `|ψ_m⟩ = (RU)^m (|G⟩⊗|ψ₀⟩)` and
/// `m = ⌊k/2⌋`, returns `⟨ψ_m|R|ψ_m⟩` for even `k` and `⟨ψ_m|U|ψ_m⟩` for odd.
pub fn measurement_identity(be: &BlockEncoding, psi0: &StateVec, k: usize) -> Result<f64> {
    if k > 2 * MAX_BLOCK_POWER + 1 {
        return Err(Error::SizeGuard {
            what: "moment order",
            limit: 2 * MAX_BLOCK_POWER + 1,
            actual: k,
        });
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > crate::moments::NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    let walk = be.walk();
    let mut psi = be.lift(psi0)?;
    for _ in 0..k / 2 {
        psi = &walk * psi;
    }
    let op = if k % 2 == 0 { &be.r_op } else { &be.u_op };
    Ok(psi.dotc(&(op * &psi)).re)
}

/// `T_0(H), …, T_{k_max}(H)` by the matrix three-term recurrence.
pub fn dense_chebyshev(h: &DMatrix<Complex64>, k_max: usize) -> Vec<DMatrix<Complex64>> {
    let n = h.nrows();
    let mut out: Vec<DMatrix<Complex64>> = Vec::with_capacity(k_max + 1);
    out.push(DMatrix::identity(n, n));
    if k_max >= 1 {
        out.push(h.clone());
    }
    for k in 2..=k_max {
        let next = h * &out[k - 1] * Complex64::new(2.0, 0.0) - &out[k - 2];
        out.push(next);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub qubits: usize,
    pub terms: usize,
    pub seed: u64,
    pub kmax: usize,
    /// Frobenius norm of `block_k − T_k(H)` for each `k`.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

/// Checks the extracted walk-operator blocks against `T_k(H)` for a random
/// Pauli sum drawn from `seed`.
pub fn verify_lemma1(qubits: usize, terms: usize, seed: u64, kmax: usize) -> Result<Lemma1Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_pauli_sum(qubits, terms, &mut rng)?;
    let be = build_encoding(&h)?;
    let blocks = chebyshev_blocks(&be, kmax)?;
    let reference = dense_chebyshev(&h.to_dense()?, kmax);
    let deviations: Vec<f64> = blocks
        .iter()
        .zip(&reference)
        .map(|(b, t)| (b - t).norm())
        .collect();
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(Lemma1Report {
        qubits,
        terms,
        seed,
        kmax,
        deviations,
        max_deviation,
    })
}
