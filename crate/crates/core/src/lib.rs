//! Greedy least-squares dimensionality reduction for ℓp subspace
//! approximation, and a fast ℓ∞ subspace fit built on a minimum-volume
//! enclosing ellipsoid.
//!
//! Given `M` points in `R^N`, [`greedy::greedy_reduce`] finds a subspace of
//! dimension at most `n⌈log_ξ M⌉` that contains a near-best `n`-dimensional
//! fit for every `p ∈ (2, ∞]`. [`mvee::infinity_fit`] then extracts a
//! concrete `n`-dimensional ℓ∞ fit from that subspace.

pub mod error;
pub mod greedy;
pub mod linalg;
pub mod mvee;
pub mod oracle;
pub mod pointset;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, Subspace};
pub use pointset::{AffineSubspace, PNorm, PointSet, ResidualVector};
