//! Dense linear-algebra kernels: SVD, symmetric eigendecomposition,
//! orthonormalization and randomized range finding.

mod eig;
mod matrix;
mod randomized;
mod subspace;
mod svd;

pub use eig::{cholesky, spd_inverse, sym_eig, SymEig};
pub use matrix::{axpy, dot, norm2, DenseMatrix};
pub use randomized::{randomized_range, randomized_range_with, sketch_width, DEFAULT_POWER_ITERATIONS};
pub use subspace::{orthonormalize, Subspace, RANK_TOL};
pub use svd::{svd, SvdResult};
