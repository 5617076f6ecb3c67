use super::matrix::{axpy, dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U diag(σ) Vᵀ`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `rows x k` with orthonormal columns, `k = min(rows, cols)`.
    pub left_vectors: DenseMatrix,
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    /// `cols x k` with orthonormal columns.
    pub right_vectors: DenseMatrix,
}

impl SvdResult {
    /// `U diag(σ) Vᵀ`
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.left_vectors.clone();
        for (k, &s) in self.singular_values.iter().enumerate() {
            us.column_mut(k).iter_mut().for_each(|v| *v *= s);
        }
        us.matmul(&self.right_vectors.transpose())
            .expect("svd factors have matching shapes")
    }

    /// Number of singular values above `rel_tol * σ₁`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.singular_values.iter().take_while(|&&s| s > rel_tol * top).count()
    }
}

/// Full (thin) SVD by one-sided Jacobi rotations.
///
/// Wide inputs are transposed and tall inputs are first reduced to their
/// square triangular factor by Householder QR, so the Jacobi sweeps always
/// run on a `k x k` matrix with `k = min(rows, cols)`.
///
/// Each left singular vector is signed so that its first component with
/// magnitude above 1e-12 is positive; the matching right vector is flipped
/// with it.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::EmptyMatrix {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if let Some(k) = a.as_col_major().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: k % a.rows(),
            col: k / a.rows(),
        });
    }
    let mut out = if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.transpose());
        SvdResult {
            left_vectors: t.right_vectors,
            singular_values: t.singular_values,
            right_vectors: t.left_vectors,
        }
    };
    fix_signs(&mut out);
    Ok(out)
}

fn svd_tall(a: &DenseMatrix) -> SvdResult {
    let (m, n) = (a.rows(), a.cols());
    if m > n {
        let (q, r) = householder_qr(a);
        let inner = jacobi_square(&r);
        let left = q.matmul(&inner.left_vectors).expect("qr factor shapes agree");
        SvdResult {
            left_vectors: left,
            singular_values: inner.singular_values,
            right_vectors: inner.right_vectors,
        }
    } else {
        jacobi_square(a)
    }
}

/// One-sided Jacobi on a square matrix: rotate columns of `W = A V` until
/// they are mutually orthogonal; then `σ_j = ‖w_j‖` and `u_j = w_j / σ_j`.
fn jacobi_square(a: &DenseMatrix) -> SvdResult {
    let n = a.cols();
    debug_assert_eq!(a.rows(), n);
    let mut w = a.clone();
    let mut v = DenseMatrix::identity(n);
    let tol = f64::EPSILON * (n as f64).max(1.0);

    let mut norms: Vec<f64> = w.columns().map(|c| dot(c, c)).collect();
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let (ai, bj) = (norms[i], norms[j]);
                if ai == 0.0 || bj == 0.0 {
                    continue;
                }
                let g = dot(w.column(i), w.column(j));
                if g.abs() <= tol * (ai * bj).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (bj - ai) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, i, j, c, s);
                rotate_columns(&mut v, i, j, c, s);
                norms[i] = ai - t * g;
                norms[j] = bj + t * g;
            }
        }
        // refresh to keep the cached norms from drifting
        for (k, c) in w.columns().enumerate() {
            norms[k] = dot(c, c);
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = w.columns().map(norm2).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]).then(x.cmp(&y)));

    let singular_values: Vec<f64> = order.iter().map(|&k| sigma[k]).collect();
    let right = v.select_columns(&order);

    // Left vectors: normalized columns of W, cleaned by one Gram-Schmidt
    // pass in σ order; columns with σ = 0 are completed from the standard
    // basis.
    let mut left = DenseMatrix::zeros(n, n);
    let mut done: Vec<usize> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (pos, &k) in order.iter().enumerate() {
        let s = sigma[k];
        if s == 0.0 {
            missing.push(pos);
            continue;
        }
        let mut u: Vec<f64> = w.column(k).iter().map(|x| x / s).collect();
        for &q in &done {
            let c = dot(left.column(q), &u);
            axpy(-c, left.column(q), &mut u);
        }
        let nu = norm2(&u);
        if nu < 0.5 {
            missing.push(pos);
            continue;
        }
        u.iter_mut().for_each(|x| *x /= nu);
        left.column_mut(pos).copy_from_slice(&u);
        done.push(pos);
    }
    if !missing.is_empty() {
        complete_columns(&mut left, &missing);
    }

    SvdResult {
        left_vectors: left,
        singular_values,
        right_vectors: right,
    }
}

/// Fills the listed (zero) columns with unit vectors orthogonal to every
/// other column.
fn complete_columns(m: &mut DenseMatrix, missing: &[usize]) {
    let n = m.rows();
    let mut e = 0;
    for &pos in missing {
        loop {
            assert!(e < n, "cannot complete orthonormal basis");
            let mut u = vec![0.0; n];
            u[e] = 1.0;
            e += 1;
            for _pass in 0..2 {
                for q in 0..m.cols() {
                    // unfilled columns are still zero and contribute nothing
                    if q == pos {
                        continue;
                    }
                    let prev = m.column(q).to_vec();
                    let c = dot(&prev, &u);
                    axpy(-c, &prev, &mut u);
                }
            }
            let nu = norm2(&u);
            if nu > 1e-6 {
                u.iter_mut().for_each(|x| *x /= nu);
                m.column_mut(pos).copy_from_slice(&u);
                break;
            }
        }
    }
}

fn rotate_columns(m: &mut DenseMatrix, i: usize, j: usize, c: f64, s: f64) {
    let rows = m.rows();
    let data = m.as_col_major_mut();
    let (lo, hi) = data.split_at_mut(j * rows);
    let ci = &mut lo[i * rows..(i + 1) * rows];
    let cj = &mut hi[..rows];
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

/// Thin Householder QR of a tall matrix (`rows >= cols`): `A = Q R` with
/// `Q` of shape `rows x cols` and `R` upper triangular `cols x cols`.
pub(crate) fn householder_qr(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let x = &r.column(k)[k..];
        let alpha = norm2(x);
        let mut v = x.to_vec();
        if alpha == 0.0 {
            reflectors.push(v.iter().map(|_| 0.0).collect());
            continue;
        }
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let nv = norm2(&v);
        v.iter_mut().for_each(|t| *t /= nv);
        for j in k..n {
            let col = &mut r.column_mut(j)[k..];
            let c = 2.0 * dot(&v, col);
            axpy(-c, &v, col);
        }
        reflectors.push(v);
    }
    let mut q = DenseMatrix::zeros(m, n);
    for j in 0..n {
        q.set(j, j, 1.0);
    }
    for k in (0..n).rev() {
        let v = &reflectors[k];
        for j in 0..n {
            let col = &mut q.column_mut(j)[k..];
            let c = 2.0 * dot(v, col);
            if c != 0.0 {
                axpy(-c, v, col);
            }
        }
    }
    let mut rr = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            rr.set(i, j, r.get(i, j));
        }
    }
    (q, rr)
}

fn fix_signs(out: &mut SvdResult) {
    for k in 0..out.left_vectors.cols() {
        let flip = out
            .left_vectors
            .column(k)
            .iter()
            .find(|x| x.abs() > 1e-12)
            .is_some_and(|&x| x < 0.0);
        if flip {
            out.left_vectors.column_mut(k).iter_mut().for_each(|x| *x = -*x);
            out.right_vectors.column_mut(k).iter_mut().for_each(|x| *x = -*x);
        }
    }
}
