//! Ground-state energy estimation from Chebyshev moments `⟨ψ₀|T_k(H)|ψ₀⟩`
//! of a normalized Pauli-sum Hamiltonian, using a thresholded Krylov
//! generalized eigenvalue problem.
//!
//! The crate also builds the block encoding explicitly at small scale to
//! check the walk-operator identities, evaluates the associated error
//! bounds and gate counts, and runs noise-sweep experiments.

pub mod blockenc;
pub mod bounds;
pub mod chebyshev;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod ground;
pub mod krylov;
pub mod lattice;
pub mod moments;
pub mod pauli;
pub mod state;

pub use error::{Error, Result};
pub use krylov::{assemble, solve_thresholded, KrylovPair, ThresholdReport};
pub use moments::{add_noise, compute_moments, MomentSeq};
pub use pauli::{normalize, PauliSum, PauliTerm, Sign};
pub use state::{Complex64, StateVec};
