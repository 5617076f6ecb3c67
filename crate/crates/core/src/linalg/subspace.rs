use super::matrix::{axpy, dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Relative threshold below which a column is considered dependent on the
/// ones before it.
pub const RANK_TOL: f64 = 1e-10;

/// Orthonormal basis of a linear subspace of `R^ambient`.
///
/// The basis may be empty (the zero subspace).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    dim: usize,
    // ambient x dim, column-major
    basis: Vec<f64>,
}

impl Subspace {
    /// The zero-dimensional subspace of `R^ambient`.
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            dim: 0,
            basis: Vec::new(),
        }
    }

    /// `R^ambient` with the standard basis.
    pub fn full(ambient: usize) -> Self {
        Self::from_basis_unchecked(ambient, DenseMatrix::identity(ambient).into_col_major())
    }

    /// Wraps columns that are already orthonormal, verifying to 1e-10.
    pub fn from_orthonormal(basis: &DenseMatrix) -> Result<Self> {
        let gram = basis.t_matmul(basis)?;
        let mut worst = 0.0_f64;
        for i in 0..gram.rows() {
            for j in 0..gram.cols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram.get(i, j) - target).abs());
            }
        }
        if worst > 1e-10 {
            return Err(Error::InvalidParameter {
                name: "basis",
                reason: format!("columns are not orthonormal (deviation {worst:e})"),
            });
        }
        Ok(Self::from_basis_unchecked(basis.rows(), basis.as_col_major().to_vec()))
    }

    pub(crate) fn from_basis_unchecked(ambient: usize, basis: Vec<f64>) -> Self {
        let dim = basis.len().checked_div(ambient).unwrap_or(0);
        debug_assert_eq!(dim * ambient, basis.len());
        Self { ambient, dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.basis[k * self.ambient..(k + 1) * self.ambient]
    }

    pub fn vectors(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.dim).map(move |k| self.vector(k))
    }

    /// Basis as an `ambient x dim` matrix.
    pub fn basis_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_col_major_unchecked(self.ambient, self.dim, self.basis.clone())
    }

    /// Coordinates `Bᵀx` of `x` in this basis.
    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        self.vectors().map(|b| dot(b, x)).collect()
    }

    /// Maps basis coordinates back to `R^ambient`.
    pub fn embed(&self, coords: &[f64]) -> Vec<f64> {
        debug_assert_eq!(coords.len(), self.dim);
        let mut out = vec![0.0; self.ambient];
        for (b, &c) in self.vectors().zip(coords) {
            axpy(c, b, &mut out);
        }
        out
    }

    /// Orthogonal projection `BBᵀx`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.embed(&self.coordinates(x))
    }

    /// `x - BBᵀx`.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = x.to_vec();
        for b in self.vectors() {
            axpy(-dot(b, x), b, &mut r);
        }
        r
    }

    /// `‖x - BBᵀx‖₂`, computed from the residual vector itself rather than
    /// by subtracting squared norms.
    pub fn residual_norm(&self, x: &[f64]) -> f64 {
        norm2(&self.residual(x))
    }

    /// Orthonormal basis of the span of both subspaces.
    pub fn union(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions differ");
        let mut cols: Vec<f64> = self.basis.clone();
        cols.extend_from_slice(&other.basis);
        let m = DenseMatrix::from_col_major_unchecked(self.ambient, self.dim + other.dim, cols);
        orthonormalize(&m)
    }

    /// Re-expresses a subspace given in this basis's coordinates as a
    /// subspace of `R^ambient`.
    pub fn compose(&self, inner: &Self) -> Self {
        assert_eq!(inner.ambient, self.dim, "inner subspace lives in wrong frame");
        let mut basis = Vec::with_capacity(self.ambient * inner.dim);
        for v in inner.vectors() {
            basis.extend(self.embed(v));
        }
        Self::from_basis_unchecked(self.ambient, basis)
    }

    /// Extends the basis with standard basis vectors until it has `dim`
    /// vectors (or spans everything).
    pub fn completed_to(&self, dim: usize) -> Self {
        let mut out = self.clone();
        let mut e = 0;
        while out.dim < dim.min(self.ambient) && e < self.ambient {
            let mut unit = vec![0.0; self.ambient];
            unit[e] = 1.0;
            let r = out.residual(&unit);
            let r = out.residual(&r);
            let nr = norm2(&r);
            if nr > 1e-6 {
                out.basis.extend(r.iter().map(|v| v / nr));
                out.dim += 1;
            }
            e += 1;
        }
        out
    }
}

/// Orthonormal basis of the column span of `vectors`, by modified
/// Gram-Schmidt with one re-orthogonalization pass.
///
/// Columns whose remaining norm after projection falls below
/// `RANK_TOL * (largest column norm)` are dropped, so the result has the
/// numerical rank as its dimension.
pub fn orthonormalize(vectors: &DenseMatrix) -> Subspace {
    let n = vectors.rows();
    let max_norm = vectors.columns().map(norm2).fold(0.0, f64::max);
    if max_norm == 0.0 {
        return Subspace::zero(n);
    }
    let cutoff = RANK_TOL * max_norm;
    let mut basis: Vec<f64> = Vec::new();
    let mut dim = 0;
    let mut w = vec![0.0; n];
    for col in vectors.columns() {
        w.copy_from_slice(col);
        for _pass in 0..2 {
            for k in 0..dim {
                let q = &basis[k * n..(k + 1) * n];
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let nw = norm2(&w);
        if nw > cutoff {
            basis.extend(w.iter().map(|v| v / nw));
            dim += 1;
            if dim == n {
                break;
            }
        }
    }
    Subspace::from_basis_unchecked(n, basis)
}
