//! Origin-centred John ellipsoids of symmetric point sets and the fast
//! ℓ∞ subspace fit built on them.
//!
//! [`mvee`] returns `E = {x : xᵀQx ≤ 1}` with `E ⊆ CH(P) ⊆ √((1+ε)m)·E`.
//! [`infinity_fit`] reduces the dimension greedily first, so that `m` is
//! `O(n log M)` rather than `N`, and then keeps the `n` longest axes of `E`.

use crate::error::{invalid, Error, Result};
use crate::greedy::{greedy_reduce, round_cap, FitReport, ReductionOptions};
use crate::linalg::{dot, spd_inverse, svd, sym_eig, DenseMatrix, Subspace, RANK_TOL};
use crate::pointset::{distance_p, reduce_to_span, symmetrize, AffineSubspace, PNorm, PointSet};

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const MAX_ITERATIONS: usize = 100_000;

/// Iterations between full recomputations of `Λ⁻¹`.
const REFRESH_EVERY: usize = 500;

/// `{x : xᵀQx ≤ 1}` in the coordinates of `frame`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    shape: DenseMatrix,
    frame: Subspace,
}

impl Ellipsoid {
    /// `shape` must be symmetric positive definite and match `frame.dim()`.
    pub fn new(shape: DenseMatrix, frame: Subspace) -> Result<Self> {
        if shape.rows() != frame.dim() || shape.cols() != frame.dim() {
            return Err(Error::DimensionMismatch {
                context: "ellipsoid shape vs frame dimension",
                left: shape.rows(),
                right: frame.dim(),
            });
        }
        let eig = sym_eig(&shape)?;
        if eig.values.last().is_some_and(|&v| v <= 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { shape, frame })
    }

    /// Ellipsoid in its own coordinates (`frame` is the identity).
    pub fn from_shape(shape: DenseMatrix) -> Result<Self> {
        let dim = shape.rows();
        Self::new(shape, Subspace::full(dim))
    }

    pub fn shape(&self) -> &DenseMatrix {
        &self.shape
    }

    pub fn frame(&self) -> &Subspace {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.shape.rows()
    }

    /// `xᵀQx` for `x` in frame coordinates.
    pub fn gauge_squared(&self, x: &[f64]) -> f64 {
        quad(&self.shape, x)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.gauge_squared(x) <= 1.0 + tol
    }

    /// Semi-axis lengths, longest first.
    pub fn semi_axes(&self) -> Result<Vec<f64>> {
        let eig = sym_eig(&self.shape)?;
        Ok(eig.values.iter().rev().map(|v| 1.0 / v.sqrt()).collect())
    }

    /// Point of `∂E` in direction `d` (frame coordinates).
    pub fn boundary_point(&self, d: &[f64]) -> Vec<f64> {
        let s = self.gauge_squared(d).sqrt();
        d.iter().map(|v| v / s).collect()
    }
}

fn quad(q: &DenseMatrix, x: &[f64]) -> f64 {
    let n = q.rows();
    let mut acc = 0.0;
    for j in 0..n {
        acc += x[j] * dot(q.column(j), x);
    }
    acc
}

fn mat_vec(q: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; q.rows()];
    for (j, &xj) in x.iter().enumerate() {
        for (o, v) in out.iter_mut().zip(q.column(j)) {
            *o += xj * v;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MveeStats {
    pub iterations: usize,
    pub away_steps: usize,
    /// Away steps that removed a point's weight entirely.
    pub drop_steps: usize,
    /// `max_i p_iᵀQp_i / m` at exit; at most `1 + ε`.
    pub achieved_ratio: f64,
    /// Final barycentric weights, one per input point.
    pub weights: Vec<f64>,
}

/// Minimum-volume-style enclosing ellipsoid for a symmetric set that spans
/// its ambient space.
pub fn mvee(p: &PointSet, epsilon: f64) -> Result<Ellipsoid> {
    Ok(mvee_with_stats(p, epsilon)?.0)
}

/// [`mvee`] plus solver diagnostics.
///
/// Khachiyan's weight ascent on `log det Σ uᵢpᵢpᵢᵀ`, with away steps that
/// shift weight off the point with the smallest `pᵢᵀΛ⁻¹pᵢ`. The returned
/// `Q = Λ⁻¹` satisfies `pᵀQp ≤ (1+ε)m` for every point, and since `P` is
/// symmetric, `E ⊆ CH(P)` holds for any weights.
pub fn mvee_with_stats(p: &PointSet, epsilon: f64) -> Result<(Ellipsoid, MveeStats)> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid("epsilon", format!("must be finite and > 0, got {epsilon}")));
    }
    if !p.is_symmetric() {
        return Err(invalid(
            "points",
            "a symmetric point set is required (see `symmetrize`)",
        ));
    }
    let m = p.ambient_dim();
    let rank = svd(p.matrix())?.numerical_rank(RANK_TOL);
    if rank < m {
        return Err(Error::Degenerate { dim: m, rank });
    }
    let x = p.matrix();
    let count = p.len();
    let mf = m as f64;
    let target = (1.0 + epsilon) * mf;

    let nonzero: Vec<usize> = (0..count).filter(|&j| x.column(j).iter().any(|&v| v != 0.0)).collect();
    let mut u = vec![0.0; count];
    for &j in &nonzero {
        u[j] = 1.0 / nonzero.len() as f64;
    }

    let refresh = |u: &[f64]| -> Result<(DenseMatrix, Vec<f64>)> {
        let mut lambda = DenseMatrix::zeros(m, m);
        for (j, &w) in u.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let pj = x.column(j);
            for c in 0..m {
                let s = w * pj[c];
                for (r, v) in lambda.column_mut(c).iter_mut().enumerate() {
                    *v += s * pj[r];
                }
            }
        }
        let inv = spd_inverse(&lambda).map_err(|_| Error::Degenerate { dim: m, rank })?;
        let g = (0..count).map(|j| quad(&inv, x.column(j))).collect();
        Ok((inv, g))
    };

    let (mut inv, mut g) = refresh(&u)?;
    let mut stats = MveeStats {
        iterations: 0,
        away_steps: 0,
        drop_steps: 0,
        achieved_ratio: f64::INFINITY,
        weights: Vec::new(),
    };
    let mut since_refresh = 0;
    loop {
        let (j_max, g_max) = argmax(&g);
        if g_max <= target {
            if since_refresh == 0 {
                break;
            }
            (inv, g) = refresh(&u)?;
            since_refresh = 0;
            continue;
        }
        if stats.iterations >= MAX_ITERATIONS {
            return Err(Error::NotConverged {
                algorithm: "mvee",
                iterations: stats.iterations,
            });
        }
        stats.iterations += 1;

        let (k_min, g_min) = (0..count)
            .filter(|&j| u[j] > 0.0)
            .map(|j| (j, g[j]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("weights never vanish entirely");
        let away = 1.0 - g_min / mf > g_max / mf - 1.0;

        let (idx, kappa, lam) = if away {
            let floor = -u[k_min] / (1.0 - u[k_min]);
            let lam = if g_min <= 1.0 {
                floor
            } else {
                ((g_min / mf - 1.0) / (g_min - 1.0)).max(floor)
            };
            (k_min, g_min, lam)
        } else {
            (j_max, g_max, (g_max / mf - 1.0) / (g_max - 1.0))
        };

        // Λ' = (1-λ)(Λ + t ppᵀ), t = λ/(1-λ)
        let t = lam / (1.0 - lam);
        let denom = 1.0 + t * kappa;
        if denom <= 1e-12 {
            // removing this point would make Λ singular: take the forward step instead
            let lam = (g_max / mf - 1.0) / (g_max - 1.0);
            apply_step(&mut u, &mut inv, &mut g, x, j_max, g_max, lam);
        } else {
            let drop = away && lam <= -u[idx] / (1.0 - u[idx]);
            stats.away_steps += usize::from(away);
            stats.drop_steps += usize::from(drop);
            apply_step(&mut u, &mut inv, &mut g, x, idx, kappa, lam);
            if drop {
                u[idx] = 0.0;
            }
        }
        since_refresh += 1;
        if since_refresh >= REFRESH_EVERY {
            (inv, g) = refresh(&u)?;
            since_refresh = 0;
        }
    }

    stats.achieved_ratio = g.iter().fold(0.0_f64, |a, &b| a.max(b)) / mf;
    stats.weights = u;
    let mut shape = inv;
    for c in 0..m {
        for r in 0..c {
            let avg = 0.5 * (shape.get(r, c) + shape.get(c, r));
            shape.set(r, c, avg);
            shape.set(c, r, avg);
        }
    }
    Ok((Ellipsoid::new(shape, Subspace::full(m))?, stats))
}

fn argmax(g: &[f64]) -> (usize, f64) {
    g.iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .expect("nonempty")
}

/// `u ← (1-λ)u + λe_j` with the matching rank-one update of `Λ⁻¹` and of
/// every `gᵢ = pᵢᵀΛ⁻¹pᵢ`.
fn apply_step(u: &mut [f64], inv: &mut DenseMatrix, g: &mut [f64], x: &DenseMatrix, j: usize, kappa: f64, lam: f64) {
    let t = lam / (1.0 - lam);
    let c = t / (1.0 + t * kappa);
    let scale = 1.0 / (1.0 - lam);
    let v = mat_vec(inv, x.column(j));
    let m = inv.rows();
    for col in 0..m {
        let vc = v[col];
        for (r, entry) in inv.column_mut(col).iter_mut().enumerate() {
            *entry = scale * (*entry - c * v[r] * vc);
        }
    }
    for (i, gi) in g.iter_mut().enumerate() {
        let a = dot(x.column(i), &v);
        *gi = scale * (*gi - c * a * a);
    }
    for w in u.iter_mut() {
        *w *= 1.0 - lam;
    }
    u[j] += lam;
    if u[j] < 1e-15 {
        u[j] = 0.0;
    }
}

/// Largest distance from `E` to its best `n`-dimensional subspace: the
/// `(n+1)`-th longest semi-axis, or 0 when `n` covers every axis.
pub fn ellipsoid_width(e: &Ellipsoid, n: usize) -> Result<f64> {
    check_n(e, n)?;
    let axes = e.semi_axes()?;
    Ok(axes.get(n).copied().unwrap_or(0.0))
}

/// Span of the `n` longest semi-axes (the eigenvectors of `Q` with the
/// smallest eigenvalues), in the ellipsoid's frame coordinates.
pub fn ellipsoid_top_subspace(e: &Ellipsoid, n: usize) -> Result<Subspace> {
    check_n(e, n)?;
    let eig = sym_eig(e.shape())?;
    let m = e.dim();
    let cols: Vec<usize> = (m - n..m).rev().collect();
    Subspace::from_orthonormal(&eig.vectors.select_columns(&cols))
}

fn check_n(e: &Ellipsoid, n: usize) -> Result<()> {
    if n == 0 || n > e.dim() {
        return Err(Error::InvalidRank { rank: n, max: e.dim() });
    }
    Ok(())
}

/// `√((1+ε)(1+√ξ)² n⌈log_ξ M⌉ + ξ)`: the guaranteed ratio of the fit's
/// ℓ∞ error to the optimal `n`-dimensional one.
pub fn fit_bound_factor(n: usize, m: usize, xi: f64, epsilon: f64) -> f64 {
    let rounds = round_cap(m, xi) as f64;
    ((1.0 + epsilon) * (1.0 + xi.sqrt()).powi(2) * n as f64 * rounds + xi).sqrt()
}

#[derive(Debug, Clone)]
pub struct InfinityFit {
    pub subspace: AffineSubspace,
    /// `d^(∞)(P, subspace)` on the input points.
    pub certificate: f64,
    pub bound_factor: f64,
    /// Dimension of the space the ellipsoid was computed in.
    pub reduced_dim: usize,
    /// `None` when the points already fit in `n` dimensions.
    pub reduction: Option<FitReport>,
    pub ellipsoid: Option<Ellipsoid>,
    pub mvee_stats: Option<MveeStats>,
}

/// Fast `n`-dimensional ℓ∞ fit: symmetrize, reduce greedily with `p = ∞`,
/// fit a John ellipsoid in the reduced coordinates and keep its `n`
/// longest axes. `opts.p` and `opts.xi` are overridden by `p = ∞` and `xi`.
pub fn infinity_fit(p: &PointSet, n: usize, xi: f64, epsilon: f64, opts: &ReductionOptions) -> Result<InfinityFit> {
    if n == 0 || n > p.ambient_dim() {
        return Err(Error::InvalidRank {
            rank: n,
            max: p.ambient_dim(),
        });
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid("epsilon", format!("must be finite and > 0, got {epsilon}")));
    }
    let opts = ReductionOptions {
        xi,
        p: PNorm::Infinity,
        ..opts.clone()
    };
    let sym = symmetrize(p);
    let center = sym.mean().map_or_else(|| vec![0.0; p.ambient_dim()], <[f64]>::to_vec);
    let (reduced, span) = reduce_to_span(&sym)?;
    let m = reduced.nonzero_count();
    let bound_factor = fit_bound_factor(n, m.max(1), xi, epsilon);
    opts.validate(m)?;

    let finish = |basis: Subspace,
                  reduced_dim: usize,
                  reduction: Option<FitReport>,
                  ellipsoid: Option<Ellipsoid>,
                  mvee_stats: Option<MveeStats>|
     -> Result<InfinityFit> {
        let subspace = AffineSubspace::through(basis.completed_to(n), &center);
        let certificate = distance_p(p, &subspace, PNorm::Infinity)?;
        Ok(InfinityFit {
            subspace,
            certificate,
            bound_factor,
            reduced_dim,
            reduction,
            ellipsoid,
            mvee_stats,
        })
    };

    if n >= span.dim() {
        return finish(span.clone(), span.dim(), None, None, None);
    }

    let report = greedy_reduce(&reduced, n, &opts)?;
    let s = report.reduced_subspace.clone();
    let coords: Vec<Vec<f64>> = reduced.points().map(|x| s.coordinates(x)).collect();
    let mut inner = PointSet::symmetric(DenseMatrix::from_columns(&coords)?)?;
    let mut inner_frame = Subspace::full(s.dim());
    let attempt = mvee_with_stats(&inner, epsilon);
    let (e, stats) = match attempt {
        Err(Error::Degenerate { .. }) => {
            let (r, f) = reduce_to_span(&inner)?;
            inner = r;
            inner_frame = f;
            if inner_frame.dim() <= n {
                let basis = span.compose(&s.compose(&inner_frame));
                return finish(basis, inner_frame.dim(), Some(report), None, None);
            }
            mvee_with_stats(&inner, epsilon)?
        }
        other => other?,
    };
    let top = ellipsoid_top_subspace(&e, n)?;
    let basis = span.compose(&s.compose(&inner_frame.compose(&top)));
    let frame = span.compose(&s.compose(&inner_frame));
    let e = Ellipsoid::new(e.shape().clone(), frame)?;
    finish(basis, inner.ambient_dim(), Some(report), Some(e), Some(stats))
}
