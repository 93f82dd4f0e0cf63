//! Dense complex kernels: matrices, permutations, LU, thin QR.

mod lu;
mod matrix;
mod perm;
mod qr;

pub use lu::{lu_factor, lu_solve, tri_solve, LuFactor, SINGULARITY_TOL};
pub use matrix::ComplexMatrix;
pub use perm::Permutation;
pub use qr::{thin_qr, RANK_TOL};

pub use num_complex::Complex64 as C64;
