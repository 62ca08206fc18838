//! Dense complex Hermitian linear algebra.

mod eigen;
mod matrix;

pub(crate) use eigen::{fix_gauge, hermitian_eig_warm};
pub use eigen::{hermitian_eig, psd_project, von_neumann_entropy, EigenSystem};
pub use matrix::{HermitianMatrix, SquareMatrix};
