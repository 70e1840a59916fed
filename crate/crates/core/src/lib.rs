//! Numerics for eigenvector ensembles of a fixed Hermitian Hamiltonian.
//!
//! Given one Hamiltonian H, the toolkit works with the set of unitaries that
//! diagonalize it (the orbit of any one diagonalizer under diagonal phases
//! and eigenvalue permutations) and evaluates its moment operators, plateau
//! operator, two-point functions, OTOCs, frame potentials and volume/entropy
//! estimates, both in closed form and by Monte-Carlo/enumeration oracles.

pub mod correlators;
pub mod ensemble;
pub mod error;
pub mod haar;
pub mod models;
pub mod otoc;
pub mod plateau;
pub mod stats;
pub mod tensor;
pub mod volume;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use tensor::{CMat, EigenSystem, HermitianOperator};
