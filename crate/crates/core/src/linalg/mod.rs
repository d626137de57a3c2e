//! Dense complex linear algebra: matrices, states, Jacobi eigensolver,
//! SVD/Schmidt decomposition, partial traces and the ρ-norm.

mod decomp;
mod eig;
mod matrix;
pub mod random;
mod vector;

pub use decomp::{
    partial_trace, reduced_density, reshape, rho_norm, schmidt, solve, svd, DensityMatrix, Schmidt, Side, Svd,
};
pub use eig::{hermitian_eig, hermitian_eig_with, psd_sqrt, Eigen};
pub use matrix::{c, pauli, r, CMatrix, I, ONE, ZERO};
pub use vector::{distance, inner, kron_vec, norm, sub_vec, StateVector};
