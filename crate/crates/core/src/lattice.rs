//! J1-J2 Heisenberg Hamiltonians on square lattices and their Néel states.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{normalize, PauliSum, PauliTerm};
use crate::state::StateVec;

/// Default statevector feasibility guard on `rows · cols`.
pub const DEFAULT_SITE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub rows: usize,
    pub cols: usize,
    #[serde(default = "default_j1")]
    pub j1: f64,
    #[serde(default = "default_j2")]
    pub j2: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default = "default_site_limit")]
    pub site_limit: usize,
}

fn default_j1() -> f64 {
    1.0
}

fn default_j2() -> f64 {
    0.5
}

fn default_site_limit() -> usize {
    DEFAULT_SITE_LIMIT
}

impl LatticeSpec {
    /// Open-boundary lattice with the benchmark couplings J1 = 1, J2 = 0.5.
    pub fn new(rows: usize, cols: usize) -> Self {
        LatticeSpec {
            rows,
            cols,
            j1: default_j1(),
            j2: default_j2(),
            boundary: Boundary::Open,
            site_limit: DEFAULT_SITE_LIMIT,
        }
    }

    pub fn with_couplings(mut self, j1: f64, j2: f64) -> Self {
        self.j1 = j1;
        self.j2 = j2;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn sites(&self) -> usize {
        self.rows * self.cols
    }

    /// Site index in row-major order; also the qubit index.
    pub fn site(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }

    pub fn label(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Config("lattice dimensions must be positive".into()));
        }
        if self.sites() > self.site_limit {
            return Err(Error::SizeGuard {
                what: "lattice sites",
                limit: self.site_limit,
                actual: self.sites(),
            });
        }
        Ok(())
    }

    fn neighbour(&self, r: usize, c: usize, dr: isize, dc: isize) -> Option<usize> {
        let (rows, cols) = (self.rows as isize, self.cols as isize);
        let (mut r2, mut c2) = (r as isize + dr, c as isize + dc);
        match self.boundary {
            Boundary::Open => {
                if !(0..rows).contains(&r2) || !(0..cols).contains(&c2) {
                    return None;
                }
            }
            Boundary::Periodic => {
                r2 = r2.rem_euclid(rows);
                c2 = c2.rem_euclid(cols);
            }
        }
        Some(self.site(r2 as usize, c2 as usize))
    }

    fn collect_pairs(&self, offsets: &[(isize, isize)]) -> Vec<(usize, usize)> {
        let mut pairs = BTreeSet::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.site(r, c);
                for &(dr, dc) in offsets {
                    if let Some(b) = self.neighbour(r, c, dr, dc) {
                        if a != b {
                            pairs.insert((a.min(b), a.max(b)));
                        }
                    }
                }
            }
        }
        pairs.into_iter().collect()
    }

    /// Distinct nearest-neighbour site pairs. Periodic wrap-around on an
    /// extent of 2 reproduces an existing bond and is not counted twice.
    pub fn nearest_pairs(&self) -> Vec<(usize, usize)> {
        self.collect_pairs(&[(0, 1), (1, 0)])
    }

    /// Distinct diagonal (next-nearest-neighbour) site pairs.
    pub fn diagonal_pairs(&self) -> Vec<(usize, usize)> {
        self.collect_pairs(&[(1, 1), (1, -1)])
    }
}

/// Unnormalized Pauli terms of `J Σ S⃗ᵢ·S⃗ⱼ` with `S⃗ᵢ·S⃗ⱼ = ¼(XX + YY + ZZ)`.
pub fn j1j2_terms(spec: &LatticeSpec) -> Result<Vec<(f64, PauliTerm)>> {
    spec.validate()?;
    let n = spec.sites();
    let mut raw = Vec::new();
    for (pairs, j) in [
        (spec.nearest_pairs(), spec.j1),
        (spec.diagonal_pairs(), spec.j2),
    ] {
        if j == 0.0 {
            continue;
        }
        for (a, b) in pairs {
            for letter in ['X', 'Y', 'Z'] {
                raw.push((0.25 * j, PauliTerm::product(n, &[(a, letter), (b, letter)])?));
            }
        }
    }
    Ok(raw)
}

pub fn build_j1j2(spec: &LatticeSpec) -> Result<PauliSum> {
    let raw = j1j2_terms(spec)?;
    if raw.is_empty() {
        return Err(Error::EmptyHamiltonian);
    }
    normalize(&raw)
}

/// Basis index of the checkerboard state: spin up (`0`) where `r + c` is
/// even, spin down (`1`) where it is odd.
pub fn antiferro_index(rows: usize, cols: usize) -> usize {
    let n = rows * cols;
    let mut index = 0usize;
    for r in 0..rows {
        for c in 0..cols {
            if (r + c) % 2 == 1 {
                index |= 1 << (n - 1 - (r * cols + c));
            }
        }
    }
    index
}

pub fn antiferro_state(rows: usize, cols: usize) -> Result<StateVec> {
    if rows == 0 || cols == 0 {
        return Err(Error::Config("lattice dimensions must be positive".into()));
    }
    if rows * cols > DEFAULT_SITE_LIMIT {
        return Err(Error::SizeGuard {
            what: "lattice sites",
            limit: DEFAULT_SITE_LIMIT,
            actual: rows * cols,
        });
    }
    StateVec::basis(rows * cols, antiferro_index(rows, cols))
}
