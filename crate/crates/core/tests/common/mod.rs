//! Independent dense oracles shared by the integration tests.
#![allow(dead_code)]

use chebylanczos::{Complex64, PauliSum, PauliTerm, StateVec};
use nalgebra::{DMatrix, DVector};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2×2 matrix of a single-qubit Pauli letter.
pub fn letter(ch: char) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    match ch {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad letter {ch}"),
    }
}

/// Kronecker product over the label, leftmost letter as the most
/// significant factor.
pub fn kron_pauli(term: &PauliTerm) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for ch in term.label().chars() {
        m = m.kronecker(&letter(ch));
    }
    m * c(term.sign().value(), 0.0)
}

pub fn kron_sum(h: &PauliSum) -> DMatrix<Complex64> {
    let dim = 1usize << h.n_qubits();
    let mut m = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for (coeff, t) in h.terms() {
        m += kron_pauli(t) * c(*coeff, 0.0);
    }
    m
}

pub fn column(v: &StateVec) -> DVector<Complex64> {
    DVector::from_column_slice(v.amps())
}

/// `T_k(H)` through the eigendecomposition, `V diag(cos(k·acos λ)) V†`.
pub fn spectral_chebyshev(h: &DMatrix<Complex64>, k: usize) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let vals = eig
        .eigenvalues
        .map(|l| c((k as f64 * l.clamp(-1.0, 1.0).acos()).cos(), 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.adjoint()
}

/// Explicit Krylov vectors `T_k(H)|ψ₀⟩`, `k < d`, as columns.
pub fn krylov_basis(h: &DMatrix<Complex64>, psi: &DVector<Complex64>, d: usize) -> DMatrix<Complex64> {
    let mut k = DMatrix::from_element(psi.len(), d, c(0.0, 0.0));
    for j in 0..d {
        let v = spectral_chebyshev(h, j) * psi;
        k.set_column(j, &v);
    }
    k
}

/// Lowest eigenvalue of the pencil `(H, S)` via Cholesky of `S`.
pub fn gevp_lowest(h: &DMatrix<f64>, s: &DMatrix<f64>) -> f64 {
    let l = s.clone().cholesky().expect("S positive definite").l();
    let linv = l.try_inverse().expect("invertible factor");
    let m = &linv * h * linv.transpose();
    let m = (&m + m.transpose()) * 0.5;
    m.symmetric_eigenvalues().min()
}
