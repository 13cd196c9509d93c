//! Dense complex linear algebra for density-matrix work.
//!
//! Matrices here are small (a few hundred rows at the very most), dense and
//! almost always Hermitian, so the module favors simple, accurate kernels
//! over generality: a cyclic Jacobi eigensolver, direct-index tensor and
//! partial-trace/-transpose kernels, and an LU determinant.

mod eigen;
pub(crate) mod matrix;

pub use eigen::{hermitian_eig, min_eigenvalue, numerical_rank, EigenDecomposition};
pub use matrix::{inner, matvec, outer, vec_norm, ComplexMatrix, Side};

/// Complex double, the scalar type of the whole crate.
pub type C64 = num_complex::Complex64;
