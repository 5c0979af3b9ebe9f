//! Reference ground states: dense diagonalization for small registers and a
//! restarted Lanczos solver with full reorthogonalization above that.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::state::{apply_sum, inner, Complex64, StateVec};

/// Registers up to this size are diagonalized densely.
pub const DENSE_GROUND_QUBITS: usize = 10;

/// Required residual `‖Hv − E₀v‖` in normalized units.
pub const GROUND_RESIDUAL_TOL: f64 = 1e-10;

const LANCZOS_BASIS: usize = 100;
const LANCZOS_RESTARTS: usize = 80;
const START_SEED: u64 = 0x6c61_6e63_7a6f_7321;

#[derive(Debug, Clone)]
pub struct GroundState {
    /// Lowest eigenvalue of the normalized Hamiltonian.
    pub energy: f64,
    pub state: StateVec,
    pub residual: f64,
    /// Physical units per normalized unit.
    pub scale: f64,
}

impl GroundState {
    pub fn energy_physical(&self) -> f64 {
        self.energy * self.scale
    }

    /// `|⟨ψ|ground⟩|`
    pub fn overlap(&self, psi: &StateVec) -> Result<f64> {
        Ok(inner(&self.state, psi)?.norm())
    }
}

/// Eigenvalues (ascending) and eigenvectors (columns) of the dense matrix.
pub fn dense_eigensystem(h: &PauliSum) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let m = h.to_dense()?;
    let dim = m.nrows();
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Lowest eigenpair of `h` with residual at most [`GROUND_RESIDUAL_TOL`].
pub fn ground_truth(h: &PauliSum) -> Result<GroundState> {
    if h.n_qubits() <= DENSE_GROUND_QUBITS {
        dense_ground(h)
    } else {
        lanczos_ground(h)
    }
}

fn residual_of(h: &PauliSum, v: &StateVec) -> Result<(f64, f64)> {
    let hv = apply_sum(h, v)?;
    let theta = inner(v, &hv)?.re;
    let mut r = hv;
    r.axpy(Complex64::new(-theta, 0.0), v)?;
    Ok((theta, r.norm()))
}

fn dense_ground(h: &PauliSum) -> Result<GroundState> {
    let (values, vectors) = dense_eigensystem(h)?;
    let mut state = StateVec::from_amps(vectors.column(0).iter().copied().collect())?;
    state.normalize()?;
    let (energy, residual) = residual_of(h, &state)?;
    if residual > GROUND_RESIDUAL_TOL {
        return Err(Error::ConvergenceFailure {
            residual,
            iterations: 0,
        });
    }
    debug_assert!((energy - values[0]).abs() < 1e-9);
    Ok(GroundState {
        energy,
        state,
        residual,
        scale: h.scale(),
    })
}

fn lanczos_ground(h: &PauliSum) -> Result<GroundState> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut start = StateVec::random(h.n_qubits(), &mut rng)?;
    let dim = start.len();
    let basis_cap = LANCZOS_BASIS.min(dim);
    let mut last_residual = f64::INFINITY;
    let mut iterations = 0;

    for _ in 0..LANCZOS_RESTARTS {
        let mut basis: Vec<StateVec> = vec![start.clone()];
        let mut alphas = Vec::with_capacity(basis_cap);
        let mut betas: Vec<f64> = Vec::with_capacity(basis_cap);
        for j in 0..basis_cap {
            iterations += 1;
            let mut w = apply_sum(h, &basis[j])?;
            let alpha = inner(&basis[j], &w)?.re;
            alphas.push(alpha);
            // Two passes of classical Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for v in &basis {
                    let c = inner(v, &w)?;
                    w.axpy(-c, v)?;
                }
            }
            let beta = w.norm();
            if j + 1 == basis_cap || beta < 1e-13 {
                break;
            }
            betas.push(beta);
            w.scale(Complex64::new(1.0 / beta, 0.0));
            basis.push(w);
        }

        let m = alphas.len();
        let tri = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                alphas[r]
            } else if r + 1 == c {
                betas[r]
            } else if c + 1 == r {
                betas[c]
            } else {
                0.0
            }
        });
        let eig = tri.symmetric_eigen();
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty tridiagonal");
        let coeffs: DVector<f64> = eig.eigenvectors.column(imin).into_owned();
        let mut ritz = StateVec::zeros(h.n_qubits())?;
        for (v, &s) in basis.iter().zip(coeffs.iter()) {
            ritz.axpy(Complex64::new(s, 0.0), v)?;
        }
        ritz.normalize()?;
        let (energy, residual) = residual_of(h, &ritz)?;
        last_residual = residual;
        if residual <= GROUND_RESIDUAL_TOL {
            return Ok(GroundState {
                energy,
                state: ritz,
                residual,
                scale: h.scale(),
            });
        }
        start = ritz;
    }
    Err(Error::ConvergenceFailure {
        residual: last_residual,
        iterations,
    })
}

/// Lanczos path regardless of register size; exposed for cross-checks.
pub fn ground_truth_iterative(h: &PauliSum) -> Result<GroundState> {
    lanczos_ground(h)
}
