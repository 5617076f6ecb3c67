use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::DenseMatrix;
use super::subspace::Subspace;
use super::svd::householder_qr;
use crate::error::{Error, Result};

pub const DEFAULT_POWER_ITERATIONS: usize = 2;

/// Sketch width used for a rank-`k` target: `max(2k, 7)`, capped at the
/// smaller matrix dimension.
pub fn sketch_width(target_rank: usize, rows: usize, cols: usize) -> usize {
    (2 * target_rank).max(7).min(rows.min(cols))
}

/// Randomized range finder with the default number of power iterations.
pub fn randomized_range(a: &DenseMatrix, target_rank: usize, seed: u64) -> Result<Subspace> {
    randomized_range_with(a, target_rank, seed, DEFAULT_POWER_ITERATIONS)
}

/// Orthonormal basis for an approximation of the range of `a`.
///
/// Draws a `cols x ℓ` standard Gaussian sketch from `ChaCha8Rng` seeded
/// with `seed`, forms `Y = AΩ`, and applies `power_iterations` rounds of
/// `Y ← A(AᵀQ)` with re-orthonormalization in between. The result always
/// has exactly `ℓ = sketch_width(target_rank, ..)` basis vectors.
pub fn randomized_range_with(
    a: &DenseMatrix,
    target_rank: usize,
    seed: u64,
    power_iterations: usize,
) -> Result<Subspace> {
    let (rows, cols) = (a.rows(), a.cols());
    let max = rows.min(cols);
    if target_rank == 0 || target_rank > max {
        return Err(Error::InvalidRank { rank: target_rank, max });
    }
    let width = sketch_width(target_rank, rows, cols);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega_data: Vec<f64> = (0..cols * width).map(|_| StandardNormal.sample(&mut rng)).collect();
    let omega = DenseMatrix::from_col_major_unchecked(cols, width, omega_data);

    let mut q = householder_qr(&a.matmul(&omega)?).0;
    for _ in 0..power_iterations {
        let z = householder_qr(&a.t_matmul(&q)?).0;
        q = householder_qr(&a.matmul(&z)?).0;
    }
    Ok(Subspace::from_basis_unchecked(rows, q.into_col_major()))
}
