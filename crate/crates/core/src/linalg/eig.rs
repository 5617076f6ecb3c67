use super::matrix::{dot, DenseMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DenseMatrix,
}

/// Cyclic two-sided Jacobi eigendecomposition.
///
/// Input must be square and symmetric to 1e-10 (relative to its largest
/// entry when that exceeds one). Eigenvectors follow the same sign
/// convention as the SVD: first component above 1e-12 in magnitude is
/// positive.
pub fn sym_eig(q: &DenseMatrix) -> Result<SymEig> {
    let n = q.rows();
    if n != q.cols() {
        return Err(Error::DimensionMismatch {
            context: "sym_eig needs a square matrix",
            left: n,
            right: q.cols(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
    }
    if let Some(k) = q.as_col_major().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: k % n, col: k / n });
    }
    let asym = q.asymmetry();
    if asym > 1e-10 * q.max_abs().max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }

    let mut a = q.clone();
    for j in 0..n {
        for i in 0..j {
            let avg = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, avg);
            a.set(j, i, avg);
        }
    }
    let mut v = DenseMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .map(|(i, j)| a.get(i, j).powi(2))
            .sum();
        if off.sqrt() <= f64::EPSILON * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                let apr = a.get(p, r);
                if apr == 0.0 {
                    continue;
                }
                let (app, arr) = (a.get(p, p), a.get(r, r));
                let theta = (arr - app) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akr) = (a.get(k, p), a.get(k, r));
                    a.set(k, p, c * akp - s * akr);
                    a.set(k, r, s * akp + c * akr);
                }
                for k in 0..n {
                    let (apk, ark) = (a.get(p, k), a.get(r, k));
                    a.set(p, k, c * apk - s * ark);
                    a.set(r, k, s * apk + c * ark);
                }
                for k in 0..n {
                    let (vkp, vkr) = (v.get(k, p), v.get(k, r));
                    v.set(k, p, c * vkp - s * vkr);
                    v.set(k, r, s * vkp + c * vkr);
                }
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]).then(x.cmp(&y)));
    let values = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = v.select_columns(&order);
    for k in 0..n {
        let flip = vectors
            .column(k)
            .iter()
            .find(|x| x.abs() > 1e-12)
            .is_some_and(|&x| x < 0.0);
        if flip {
            vectors.column_mut(k).iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(SymEig { values, vectors })
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
pub fn cholesky(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k).powi(2);
        }
        if d.is_nan() || d <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let djj = d.sqrt();
        l.set(j, j, djj);
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / djj);
        }
    }
    Ok(l)
}

/// Inverse of a symmetric positive definite matrix via Cholesky.
pub fn spd_inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    let l = cholesky(a)?;
    // L⁻¹ column by column (forward substitution on unit vectors)
    let mut linv = DenseMatrix::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in c..i {
                s -= l.get(i, k) * linv.get(k, c);
            }
            linv.set(i, c, s / l.get(i, i));
        }
    }
    // A⁻¹ = L⁻ᵀ L⁻¹
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = dot(&linv.column(i)[j..], &linv.column(j)[j..]);
            inv.set(i, j, v);
            inv.set(j, i, v);
        }
    }
    Ok(inv)
}
