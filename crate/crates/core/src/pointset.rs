//! Point clouds, symmetrization, affine projections and the `d^(p)` family
//! of fitting distances.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm2, svd, DenseMatrix, Subspace, RANK_TOL};

/// Two points closer than this (Euclidean) are the same point.
pub const DUPLICATE_TOL: f64 = 1e-9;

/// Points with norm at or below this are treated as the origin.
pub const ZERO_TOL: f64 = 1e-9;

/// Exponent of the residual norm.
///
/// `Infinity` is a distinct variant rather than a large float so that the
/// max-norm path never goes through `powf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    /// Validated exponent for the public fitting API: `p > 2` or `+∞`.
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else if p.is_finite() && p > 2.0 {
            Ok(Self::Finite(p))
        } else {
            Err(invalid("p", format!("must be > 2 or infinite, got {p}")))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinity)
    }

    /// The exponent as a float (`f64::INFINITY` for the max norm).
    pub fn value(self) -> f64 {
        match self {
            Self::Finite(p) => p,
            Self::Infinity => f64::INFINITY,
        }
    }

    pub(crate) fn validate_public(self) -> Result<Self> {
        match self {
            Self::Finite(p) => Self::new(p),
            Self::Infinity => Ok(self),
        }
    }

    /// ℓp norm of a vector of nonnegative residuals. Works for any `p ≥ 1`,
    /// including the `p = 2` used internally by the least-squares step.
    pub fn norm(self, values: &[f64]) -> f64 {
        let top = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        match self {
            Self::Infinity => top,
            Self::Finite(p) => {
                if top == 0.0 {
                    return 0.0;
                }
                let s: f64 = values.iter().map(|v| (v.abs() / top).powf(p)).sum();
                top * s.powf(1.0 / p)
            }
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::Infinity => write!(f, "inf"),
        }
    }
}

/// `M` points in `R^N`, stored as the columns of an `N x M` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: DenseMatrix,
    is_symmetric: bool,
    mean: Option<Vec<f64>>,
}

impl PointSet {
    pub fn new(points: DenseMatrix) -> Self {
        Self {
            points,
            is_symmetric: false,
            mean: None,
        }
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        Ok(Self::new(DenseMatrix::from_columns(points)?))
    }

    /// Marks `points` as symmetric after checking that every point has a
    /// negation partner within [`DUPLICATE_TOL`] and that the origin is
    /// present.
    pub fn symmetric(points: DenseMatrix) -> Result<Self> {
        let set = Self {
            points,
            is_symmetric: true,
            mean: None,
        };
        set.negation_partners()?;
        if !set.points.columns().any(|c| norm2(c) <= ZERO_TOL) {
            return Err(invalid("points", "symmetric set must contain the origin"));
        }
        Ok(set)
    }

    pub(crate) fn from_parts(points: DenseMatrix, is_symmetric: bool, mean: Option<Vec<f64>>) -> Self {
        Self {
            points,
            is_symmetric,
            mean,
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.points
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.points
    }

    pub fn ambient_dim(&self) -> usize {
        self.points.rows()
    }

    pub fn len(&self) -> usize {
        self.points.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.cols() == 0
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_symmetric
    }

    /// The mean subtracted by [`symmetrize`], if this set came from it.
    pub fn mean(&self) -> Option<&[f64]> {
        self.mean.as_deref()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        self.points.column(j)
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.columns()
    }

    /// Number of points farther than [`ZERO_TOL`] from the origin.
    pub fn nonzero_count(&self) -> usize {
        self.points().filter(|p| norm2(p) > ZERO_TOL).count()
    }

    /// Arithmetic mean of the points.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.ambient_dim()];
        for p in self.points() {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        let m = self.len().max(1) as f64;
        c.iter_mut().for_each(|v| *v /= m);
        c
    }

    /// For each point, the index of a point equal to its negation (within
    /// [`DUPLICATE_TOL`]). Fails if some point has no partner.
    pub fn negation_partners(&self) -> Result<Vec<usize>> {
        let index = ProximityIndex::new(&self.points);
        let mut partners = Vec::with_capacity(self.len());
        for j in 0..self.len() {
            let neg: Vec<f64> = self.point(j).iter().map(|v| -v).collect();
            match index.nearest_within(&self.points, &neg, DUPLICATE_TOL) {
                Some(k) => partners.push(k),
                None => return Err(Error::NotSymmetricPointSet { index: j }),
            }
        }
        Ok(partners)
    }

    /// Euclidean distance of each point to the linear subspace `s`.
    pub fn residuals_to(&self, s: &Subspace) -> Vec<f64> {
        self.points().map(|p| s.residual_norm(p)).collect()
    }

    /// The points with the given indices, in order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            points: self.points.select_columns(idx),
            is_symmetric: false,
            mean: None,
        }
    }

    /// Points translated by `-shift`.
    pub fn translated(&self, shift: &[f64]) -> Self {
        let mut m = self.points.clone();
        for j in 0..m.cols() {
            for (v, s) in m.column_mut(j).iter_mut().zip(shift) {
                *v -= s;
            }
        }
        Self::new(m)
    }
}

/// Points sorted along a fixed generic direction, so that all points within
/// distance `tol` of a query lie in a contiguous key window.
struct ProximityIndex {
    direction: Vec<f64>,
    entries: Vec<(f64, usize)>,
}

impl ProximityIndex {
    fn new(points: &DenseMatrix) -> Self {
        let n = points.rows();
        let mut direction: Vec<f64> = (0..n).map(|i| 1.0 / ((i as f64) + 1.618_033_988_75)).collect();
        let dn = norm2(&direction);
        if dn > 0.0 {
            direction.iter_mut().for_each(|v| *v /= dn);
        }
        let mut entries: Vec<(f64, usize)> = points
            .columns()
            .enumerate()
            .map(|(j, c)| (dot(&direction, c), j))
            .collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Self { direction, entries }
    }

    /// Indices of points within `tol` of `x`, in ascending index order.
    fn within(&self, points: &DenseMatrix, x: &[f64], tol: f64) -> Vec<usize> {
        let key = dot(&self.direction, x);
        let start = self.entries.partition_point(|e| e.0 < key - tol);
        let mut hits: Vec<usize> = self.entries[start..]
            .iter()
            .take_while(|e| e.0 <= key + tol)
            .filter(|e| distance(points.column(e.1), x) <= tol)
            .map(|e| e.1)
            .collect();
        hits.sort_unstable();
        hits
    }

    fn nearest_within(&self, points: &DenseMatrix, x: &[f64], tol: f64) -> Option<usize> {
        self.within(points, x, tol).into_iter().min_by(|&a, &b| {
            distance(points.column(a), x)
                .total_cmp(&distance(points.column(b), x))
                .then(a.cmp(&b))
        })
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&d)
}

/// Symmetrized translation `(P - p̄) ∪ (p̄ - P) ∪ {0}`.
///
/// Points closer than [`DUPLICATE_TOL`] to an earlier one are merged (the
/// earlier one is kept); the order is `P - p̄`, then `p̄ - P`, then the
/// origin. The result records `p̄` as its mean.
pub fn symmetrize(p: &PointSet) -> PointSet {
    let n = p.ambient_dim();
    let m = p.len();
    let mean = p.centroid();
    let mut all = DenseMatrix::zeros(n, 2 * m + 1);
    for j in 0..m {
        for (i, mu) in mean.iter().enumerate() {
            let d = p.point(j)[i] - mu;
            all.set(i, j, d);
            all.set(i, m + j, -d);
        }
    }
    let index = ProximityIndex::new(&all);
    let mut kept = vec![false; all.cols()];
    let mut keep_idx = Vec::new();
    for j in 0..all.cols() {
        let dup = index
            .within(&all, all.column(j), DUPLICATE_TOL)
            .into_iter()
            .any(|k| k < j && kept[k]);
        if !dup {
            kept[j] = true;
            keep_idx.push(j);
        }
    }
    PointSet::from_parts(all.select_columns(&keep_idx), true, Some(mean))
}

/// Expresses `P` in an orthonormal basis of its linear span.
///
/// The basis is the set of left singular vectors of the point matrix whose
/// singular values exceed `RANK_TOL * σ₁`, so the new ambient dimension is
/// the numerical rank. Symmetry is preserved; the recorded mean is dropped
/// since it need not lie in the span.
pub fn reduce_to_span(p: &PointSet) -> Result<(PointSet, Subspace)> {
    let n = p.ambient_dim();
    let basis = if p.matrix().max_abs() == 0.0 {
        Subspace::zero(n)
    } else {
        let s = svd(p.matrix())?;
        let rank = s.numerical_rank(RANK_TOL);
        let cols: Vec<usize> = (0..rank).collect();
        Subspace::from_orthonormal(&s.left_vectors.select_columns(&cols))?
    };
    let mut coords = Vec::with_capacity(basis.dim() * p.len());
    for x in p.points() {
        coords.extend(basis.coordinates(x));
    }
    let reduced = DenseMatrix::from_col_major_unchecked(basis.dim(), p.len(), coords);
    Ok((PointSet::from_parts(reduced, p.is_symmetric, None), basis))
}

/// `{x + offset : x ∈ basis span}` with `offset ⟂ basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    basis: Subspace,
    offset: Vec<f64>,
}

impl AffineSubspace {
    /// Checks `offset ⟂ basis` to 1e-10 (scaled by `max(1, ‖offset‖)`).
    pub fn new(basis: Subspace, offset: Vec<f64>) -> Result<Self> {
        if offset.len() != basis.ambient_dim() {
            return Err(Error::DimensionMismatch {
                context: "affine offset length",
                left: basis.ambient_dim(),
                right: offset.len(),
            });
        }
        let scale = norm2(&offset).max(1.0);
        let leak = norm2(&basis.coordinates(&offset));
        if leak > 1e-10 * scale {
            return Err(invalid(
                "offset",
                format!("not orthogonal to the subspace (component {leak:e})"),
            ));
        }
        Ok(Self { basis, offset })
    }

    /// The linear subspace itself (zero offset).
    pub fn linear(basis: Subspace) -> Self {
        let offset = vec![0.0; basis.ambient_dim()];
        Self { basis, offset }
    }

    /// The translate of `basis` passing through `point`.
    pub fn through(basis: Subspace, point: &[f64]) -> Self {
        let offset = basis.residual(point);
        Self { basis, offset }
    }

    pub fn basis(&self) -> &Subspace {
        &self.basis
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.ambient_dim()
    }

    /// `Π_A x = Π_S x + a`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.basis.project(x);
        for (yi, ai) in y.iter_mut().zip(&self.offset) {
            *yi += ai;
        }
        y
    }

    /// `‖x - Π_A x‖₂`, evaluated as `‖(I - Π_S)x - a‖₂`.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let mut r = self.basis.residual(x);
        for (ri, ai) in r.iter_mut().zip(&self.offset) {
            *ri -= ai;
        }
        norm2(&r)
    }
}

/// Per-point distances `‖p_j - Π_A p_j‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector {
    pub values: Vec<f64>,
}

impl ResidualVector {
    pub fn norm(&self, p: PNorm) -> f64 {
        p.norm(&self.values)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(v))
    }
}

/// Projects every point onto `a`, returning the projected points and the
/// residual distances.
pub fn project(p: &PointSet, a: &AffineSubspace) -> Result<(PointSet, ResidualVector)> {
    if p.ambient_dim() != a.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "point set vs affine subspace",
            left: p.ambient_dim(),
            right: a.ambient_dim(),
        });
    }
    let mut projected = Vec::with_capacity(p.ambient_dim() * p.len());
    let mut values = Vec::with_capacity(p.len());
    for x in p.points() {
        projected.extend(a.project(x));
        values.push(a.distance(x));
    }
    let m = DenseMatrix::from_col_major_unchecked(p.ambient_dim(), p.len(), projected);
    Ok((PointSet::new(m), ResidualVector { values }))
}

/// Residual vector of `p` against `a`.
pub fn residuals(p: &PointSet, a: &AffineSubspace) -> Result<ResidualVector> {
    if p.ambient_dim() != a.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "point set vs affine subspace",
            left: p.ambient_dim(),
            right: a.ambient_dim(),
        });
    }
    Ok(ResidualVector {
        values: p.points().map(|x| a.distance(x)).collect(),
    })
}

/// `d^(p)(P, A) = ‖e_A‖_p`. Only `p > 2` and `p = ∞` are accepted.
pub fn distance_p(p: &PointSet, a: &AffineSubspace, exponent: PNorm) -> Result<f64> {
    let exponent = exponent.validate_public()?;
    Ok(residuals(p, a)?.norm(exponent))
}

/// Indices of the nonzero points sorted by nondecreasing distance to the
/// linear subspace `s`; ties keep ascending index order.
pub fn residual_ordering(p: &PointSet, s: &Subspace) -> Vec<usize> {
    let res = p.residuals_to(s);
    order_nonzero(p, &res)
}

pub(crate) fn order_nonzero(p: &PointSet, res: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).filter(|&j| norm2(p.point(j)) > ZERO_TOL).collect();
    idx.sort_by(|&a, &b| res[a].total_cmp(&res[b]).then(a.cmp(&b)));
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(points: &[&[f64]]) -> PointSet {
        PointSet::from_points(&points.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn line(dir: &[f64]) -> Subspace {
        let m = DenseMatrix::from_col_major(dir.len(), 1, dir.to_vec()).unwrap();
        Subspace::from_orthonormal(&m).unwrap()
    }

    fn random_points(n: usize, m: usize, rng: &mut ChaCha8Rng) -> PointSet {
        let data = (0..n * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        PointSet::new(DenseMatrix::from_col_major(n, m, data).unwrap())
    }

    #[test]
    fn symmetric_set_is_fixed_point() {
        let p = set(&[&[1., 0.], &[-1., 0.], &[0., 0.]]);
        let s = symmetrize(&p);
        assert!(s.is_symmetric());
        assert_eq!(s.matrix(), p.matrix());
        assert_eq!(s.mean(), Some(&[0.0, 0.0][..]));
    }

    #[test]
    fn single_point_collapses_to_origin() {
        let s = symmetrize(&set(&[&[2., 0.]]));
        assert_eq!(s.len(), 1);
        assert_eq!(s.point(0), &[0.0, 0.0]);
        assert_eq!(s.mean(), Some(&[2.0, 0.0][..]));
    }

    #[test]
    fn two_points_symmetrize_to_three() {
        let s = symmetrize(&set(&[&[1., 0.], &[3., 0.]]));
        let pts: Vec<Vec<f64>> = s.points().map(|p| p.to_vec()).collect();
        assert_eq!(pts, vec![vec![-1., 0.], vec![1., 0.], vec![0., 0.]]);
        assert_eq!(s.mean(), Some(&[2.0, 0.0][..]));
        assert_eq!(s.negation_partners().unwrap(), vec![1, 0, 2]);
    }

    #[test]
    fn symmetric_constructor_validates() {
        let ok = DenseMatrix::from_row_major(1, 3, &[1., -1., 0.]).unwrap();
        assert!(PointSet::symmetric(ok).is_ok());
        let unpaired = DenseMatrix::from_row_major(1, 3, &[1., -2., 0.]).unwrap();
        assert!(matches!(
            PointSet::symmetric(unpaired),
            Err(Error::NotSymmetricPointSet { index: 0 })
        ));
        let no_origin = DenseMatrix::from_row_major(1, 2, &[1., -1.]).unwrap();
        assert!(PointSet::symmetric(no_origin).is_err());
    }

    #[test]
    fn reduce_keeps_full_rank_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_points(3, 6, &mut rng);
        let (r, b) = reduce_to_span(&p).unwrap();
        assert_eq!(r.ambient_dim(), 3);
        assert_eq!(b.dim(), 3);
    }

    #[test]
    fn reduce_collinear_points_to_one_dimension() {
        let pts: Vec<Vec<f64>> = (0..5).map(|k| vec![k as f64, 2.0 * k as f64, -(k as f64)]).collect();
        let p = PointSet::from_points(&pts).unwrap();
        let (r, b) = reduce_to_span(&p).unwrap();
        assert_eq!(r.ambient_dim(), 1);
        for (j, x) in p.points().enumerate() {
            let back = b.embed(r.point(j));
            assert!(distance(&back, x) <= 1e-8);
        }
    }

    #[test]
    fn reduce_planted_plane_is_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let basis = random_points(6, 2, &mut rng).into_matrix();
        let coeffs = random_points(2, 10, &mut rng).into_matrix();
        let p = PointSet::new(basis.matmul(&coeffs).unwrap());
        let (r, b) = reduce_to_span(&p).unwrap();
        assert_eq!(r.ambient_dim(), 2);
        for i in 0..p.len() {
            assert!(distance(&b.embed(r.point(i)), p.point(i)) <= 1e-8);
            for j in 0..i {
                let d0 = distance(p.point(i), p.point(j));
                let d1 = distance(r.point(i), r.point(j));
                assert!((d0 - d1).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn axis_projection() {
        let a = AffineSubspace::linear(line(&[1., 0.]));
        let (proj, res) = project(&set(&[&[3., 4.]]), &a).unwrap();
        assert_eq!(proj.point(0), &[3.0, 0.0]);
        assert_eq!(res.values, vec![4.0]);
    }

    #[test]
    fn points_in_subspace_have_zero_residual() {
        let a = AffineSubspace::new(line(&[0., 1.]), vec![2., 0.]).unwrap();
        let p = set(&[&[2., 5.], &[2., -1.], &[2., 0.]]);
        let (_, res) = project(&p, &a).unwrap();
        assert!(res.values.iter().all(|&v| v <= 1e-10));
    }

    #[test]
    fn affine_offset_must_be_orthogonal() {
        assert!(AffineSubspace::new(line(&[1., 0.]), vec![1., 1.]).is_err());
        assert!(AffineSubspace::new(line(&[1., 0.]), vec![0., 1., 0.]).is_err());
    }

    #[test]
    fn projection_residual_is_orthogonal_and_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_points(4, 15, &mut rng);
        let s = crate::linalg::orthonormalize(&random_points(4, 2, &mut rng).into_matrix());
        let a = AffineSubspace::through(s.clone(), &[0.3, -0.2, 0.5, 0.1]);
        let (proj, _) = project(&p, &a).unwrap();
        for (x, px) in p.points().zip(proj.points()) {
            let diff: Vec<f64> = x.iter().zip(px).map(|(u, v)| u - v).collect();
            assert!(norm2(&s.coordinates(&diff)) <= 1e-10);
        }
        let (again, res) = project(&proj, &a).unwrap();
        assert!(again.matrix().sub(proj.matrix()).unwrap().max_abs() <= 1e-10);
        assert!(res.max() <= 1e-10);
    }

    #[test]
    fn projection_matches_grid_search() {
        // the closest point of A to p, found by scanning a dense grid over
        // a bounded patch of A, must match the closed-form residual
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = crate::linalg::orthonormalize(&random_points(4, 2, &mut rng).into_matrix());
        let a = AffineSubspace::through(s.clone(), &[0.5, 0.5, -0.5, 0.2]);
        let p = random_points(4, 3, &mut rng);
        let res = residuals(&p, &a).unwrap();
        for (j, x) in p.points().enumerate() {
            let center = s.coordinates(x);
            let steps = 400;
            let mut best = f64::INFINITY;
            for u in 0..=steps {
                for v in 0..=steps {
                    let c0 = center[0] - 0.1 + 0.2 * u as f64 / steps as f64;
                    let c1 = center[1] - 0.1 + 0.2 * v as f64 / steps as f64;
                    let mut y = s.embed(&[c0, c1]);
                    for (yi, ai) in y.iter_mut().zip(a.offset()) {
                        *yi += ai;
                    }
                    best = best.min(distance(x, &y));
                }
            }
            assert!((best - res.values[j]).abs() <= 1e-4, "{best} vs {}", res.values[j]);
        }
    }

    #[test]
    fn distance_p_values() {
        let a = AffineSubspace::linear(line(&[1., 0.]));
        let zero = set(&[&[1., 0.], &[-2., 0.]]);
        for p in [PNorm::Finite(3.0), PNorm::Finite(10.0), PNorm::Infinity] {
            assert_eq!(distance_p(&zero, &a, p).unwrap(), 0.0);
        }
        let two = set(&[&[0., 3.], &[1., 4.]]);
        assert_eq!(distance_p(&two, &a, PNorm::Infinity).unwrap(), 4.0);
        let four = set(&[&[0., 1.], &[0., -1.], &[2., 1.], &[3., -1.]]);
        let d = distance_p(&four, &a, PNorm::Finite(4.0)).unwrap();
        assert!((d - 4f64.powf(0.25)).abs() < 1e-12);
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn distance_p_rejects_small_exponents() {
        let a = AffineSubspace::linear(line(&[1., 0.]));
        let p = set(&[&[0., 1.]]);
        assert!(distance_p(&p, &a, PNorm::Finite(2.0)).is_err());
        assert!(distance_p(&p, &a, PNorm::Finite(1.5)).is_err());
        assert!(PNorm::new(2.0).is_err());
        assert!(PNorm::new(f64::NAN).is_err());
        assert_eq!(PNorm::new(f64::INFINITY).unwrap(), PNorm::Infinity);
    }

    #[test]
    fn ordering_sorts_residuals_with_index_ties() {
        let s = line(&[1., 0.]);
        let p = set(&[&[0., 5.], &[0., 1.], &[0., 3.]]);
        assert_eq!(residual_ordering(&p, &s), vec![1, 2, 0]);
        let inside = set(&[&[3., 0.], &[1., 0.], &[0., 0.], &[2., 0.]]);
        assert_eq!(residual_ordering(&inside, &s), vec![0, 1, 3]);
    }

    #[test]
    fn ordering_agrees_with_sorted_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_points(5, 50, &mut rng);
        let s = crate::linalg::orthonormalize(&random_points(5, 2, &mut rng).into_matrix());
        let ord = residual_ordering(&p, &s);
        let res = residuals(&p, &AffineSubspace::linear(s)).unwrap().values;
        let mut sorted = res.clone();
        sorted.sort_by(f64::total_cmp);
        let via_order: Vec<f64> = ord.iter().map(|&j| res[j]).collect();
        assert_eq!(via_order, sorted);
    }

    proptest::proptest! {
        #[test]
        fn p_norm_is_nonincreasing_in_p(values in proptest::collection::vec(0.0f64..10.0, 1..20),
                                        p in 2.0f64..50.0, dp in 0.0f64..50.0) {
            let lo = PNorm::Finite(p).norm(&values);
            let hi = PNorm::Finite(p + dp).norm(&values);
            let inf = PNorm::Infinity.norm(&values);
            proptest::prop_assert!(hi <= lo * (1.0 + 1e-12));
            proptest::prop_assert!(inf <= hi * (1.0 + 1e-12));
        }

        #[test]
        fn symmetrize_yields_symmetric_sets(seed in 0u64..1000, m in 1usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_points(3, m, &mut rng);
            let s = symmetrize(&p);
            proptest::prop_assert!(s.len() <= 2 * m + 1);
            let check = PointSet::symmetric(s.matrix().clone());
            proptest::prop_assert!(check.is_ok());
        }
    }
}
