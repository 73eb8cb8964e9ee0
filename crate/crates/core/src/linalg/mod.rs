//! Dense complex linear algebra in floating and exact regimes.

pub mod dense;
pub mod eigen;
pub mod exact;
pub mod matrix;

pub use eigen::{eigenvalues_of, eigh, hermitian_eigenvalues, min_eigenvalue};
pub use exact::{nullspace, rational_is_psd, rational_psd_check, rref, solve_linear_exact, LinearSolution, PsdWitness};
pub use matrix::{HermitianMatrix, Matrix};
