//! Ground truth for small instances: exact `p = 2` widths, exhaustive
//! angular search for `N ≤ 3`, and planted instances with known noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::linalg::{norm2, orthonormalize, svd, DenseMatrix, Subspace};
use crate::pointset::{PNorm, PointSet};

pub const DEFAULT_RESOLUTION: usize = 180;

/// Candidates from the grid that get refined.
const REFINE_STARTS: usize = 8;
const GOLDEN_ITERS: usize = 60;
const COORD_CYCLES: usize = 12;

/// `√(Σ_{l>n} σ_l²)` of the point matrix: the optimal `d^(2)` width over
/// `n`-dimensional linear subspaces.
pub fn exact_p2_width(p: &PointSet, n: usize) -> Result<f64> {
    let s = svd(p.matrix())?;
    let tail: f64 = s.singular_values.iter().skip(n).map(|v| v * v).sum();
    Ok(tail.sqrt())
}

/// Best subspace found by [`brute_force_fit`].
#[derive(Debug, Clone)]
pub struct OracleFit {
    pub width: f64,
    pub subspace: Subspace,
}

/// Brute-force `d_n^(p)` over linear subspaces of `R^N`, `N ≤ 3`.
pub fn brute_force_width(p: &PointSet, n: usize, exponent: PNorm, resolution: usize) -> Result<f64> {
    Ok(brute_force_fit(p, n, exponent, resolution)?.width)
}

pub fn brute_force_fit(p: &PointSet, n: usize, exponent: PNorm, resolution: usize) -> Result<OracleFit> {
    brute_force_fit_within(p, &Subspace::full(p.ambient_dim()), n, exponent, resolution)
}

/// Brute-force minimum of `d^(p)(P, A)` over `n`-dimensional linear
/// subspaces `A ⊆ s`, for `dim s ≤ 3`. The ambient dimension is free.
pub fn brute_force_fit_within(
    p: &PointSet,
    s: &Subspace,
    n: usize,
    exponent: PNorm,
    resolution: usize,
) -> Result<OracleFit> {
    let k = s.dim();
    if k > 3 {
        return Err(invalid(
            "subspace",
            format!("search space has dimension {k}; at most 3 supported"),
        ));
    }
    if n == 0 || n > p.ambient_dim() {
        return Err(Error::InvalidRank {
            rank: n,
            max: p.ambient_dim(),
        });
    }
    if n > k {
        return Err(invalid("n", format!("{n} exceeds the search space dimension {k}")));
    }
    if resolution < 4 {
        return Err(invalid("resolution", "must be at least 4"));
    }
    let problem = Problem::new(p, s, exponent);
    let (width, coords) = match (k, n) {
        (k, n) if n == k => (problem.value(&[]), DenseMatrix::identity(k)),
        (2, 1) => {
            let (t, v) = search_circle(&|t| problem.value(&[t.cos(), t.sin()]), resolution);
            let dir = [-t.sin(), t.cos()];
            (v, DenseMatrix::from_row_major(2, 1, &dir).expect("finite"))
        }
        (3, n) => {
            let f = |a: f64, b: f64| {
                let w = sphere(a, b);
                if n == 1 {
                    problem.value_line(&w)
                } else {
                    problem.value(&w)
                }
            };
            let polish = |w: [f64; 3], v: f64| match exponent {
                PNorm::Infinity => problem.polish_infinity(w, n == 1),
                PNorm::Finite(_) => (w, v),
            };
            let (w, v) = search_sphere(&f, &polish, resolution);
            let basis = if n == 1 {
                DenseMatrix::from_row_major(3, 1, &w).expect("finite")
            } else {
                plane_basis(&w)
            };
            (v, basis)
        }
        _ => unreachable!("k ≤ 3 and 1 ≤ n ≤ k"),
    };
    let embedded = s.basis_matrix().matmul(&coords)?;
    Ok(OracleFit {
        width,
        subspace: orthonormalize(&embedded),
    })
}

/// Points in the coordinates of the search space, plus the squared norm
/// each has outside it.
struct Problem {
    coords: Vec<Vec<f64>>,
    outside: Vec<f64>,
    exponent: PNorm,
}

impl Problem {
    fn new(p: &PointSet, s: &Subspace, exponent: PNorm) -> Self {
        let coords: Vec<Vec<f64>> = p.points().map(|x| s.coordinates(x)).collect();
        let outside = p.points().map(|x| s.residual_norm(x).powi(2)).collect();
        Self {
            coords,
            outside,
            exponent,
        }
    }

    /// Width for the subspace with unit normal `w` (empty `w`: the whole
    /// search space).
    fn value(&self, w: &[f64]) -> f64 {
        let res: Vec<f64> = self
            .coords
            .iter()
            .zip(&self.outside)
            .map(|(c, h)| {
                let along: f64 = c.iter().zip(w).map(|(a, b)| a * b).sum();
                (h + along * along).sqrt()
            })
            .collect();
        self.exponent.norm(&res)
    }

    /// Width for the line spanned by unit `w`.
    fn value_line(&self, w: &[f64]) -> f64 {
        let res: Vec<f64> = self
            .coords
            .iter()
            .zip(&self.outside)
            .map(|(c, h)| {
                let along: f64 = c.iter().zip(w).map(|(a, b)| a * b).sum();
                let sq: f64 = c.iter().map(|a| a * a).sum();
                (h + (sq - along * along).max(0.0)).sqrt()
            })
            .collect();
        self.exponent.norm(&res)
    }
}

impl Problem {
    /// Squared residuals and their gradients in `w` for the plane with
    /// normal `w` (`line == false`) or the line along `w`.
    fn squared(&self, w: &[f64; 3], line: bool) -> (Vec<f64>, Vec<[f64; 3]>) {
        let sign = if line { -2.0 } else { 2.0 };
        self.coords
            .iter()
            .zip(&self.outside)
            .map(|(c, h)| {
                let along: f64 = c.iter().zip(w).map(|(a, b)| a * b).sum();
                let g = if line {
                    h + (c.iter().map(|a| a * a).sum::<f64>() - along * along).max(0.0)
                } else {
                    h + along * along
                };
                (g, [sign * along * c[0], sign * along * c[1], sign * along * c[2]])
            })
            .unzip()
    }

    /// Trust-region descent for the largest residual: each step minimizes
    /// the linearized maximum over a box in the tangent plane at `w`.
    fn polish_infinity(&self, w: [f64; 3], line: bool) -> ([f64; 3], f64) {
        let mut w = w;
        let (mut g, mut grad) = self.squared(&w, line);
        let mut top = g.iter().copied().fold(0.0, f64::max);
        let mut delta = 0.05;
        let mut iters = 0;
        while delta > 1e-13 && iters < POLISH_ITERS {
            iters += 1;
            let (t1, t2) = tangent_basis(&w);
            let slopes: Vec<[f64; 2]> = grad.iter().map(|d| [dot3(d, &t1), dot3(d, &t2)]).collect();
            let reach = slopes.iter().map(|s| s[0].hypot(s[1])).fold(0.0, f64::max) * delta * 3.0;
            let mut active: Vec<usize> = (0..g.len()).filter(|&j| g[j] >= top - reach).collect();
            active.sort_by(|&a, &b| g[b].total_cmp(&g[a]));
            active.truncate(POLISH_ACTIVE);
            let model = |d: [f64; 2]| {
                active
                    .iter()
                    .map(|&j| g[j] + slopes[j][0] * d[0] + slopes[j][1] * d[1])
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let d = best_vertex(&active, &g, &slopes, delta, &model);
            if top - model(d) <= 1e-15 * top.max(1e-300) {
                delta *= 0.5;
                continue;
            }
            let moved: Vec<f64> = (0..3).map(|i| w[i] + d[0] * t1[i] + d[1] * t2[i]).collect();
            let len = norm2(&moved);
            let cand = [moved[0] / len, moved[1] / len, moved[2] / len];
            let (g_new, grad_new) = self.squared(&cand, line);
            let top_new = g_new.iter().copied().fold(0.0, f64::max);
            if top_new < top {
                (w, g, grad, top) = (cand, g_new, grad_new, top_new);
                delta = (delta * 2.0).min(0.5);
            } else {
                delta *= 0.5;
            }
        }
        (w, top.sqrt())
    }
}

const POLISH_ITERS: usize = 400;
const POLISH_ACTIVE: usize = 12;

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn tangent_basis(w: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let k = (0..3)
        .min_by(|&a, &b| w[a].abs().total_cmp(&w[b].abs()))
        .expect("three axes");
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let d = dot3(&e, w);
    let mut t1 = [e[0] - d * w[0], e[1] - d * w[1], e[2] - d * w[2]];
    let l = dot3(&t1, &t1).sqrt();
    t1.iter_mut().for_each(|v| *v /= l);
    let t2 = [
        w[1] * t1[2] - w[2] * t1[1],
        w[2] * t1[0] - w[0] * t1[2],
        w[0] * t1[1] - w[1] * t1[0],
    ];
    (t1, t2)
}

/// Minimizer of a max of affine functions over the box `|d_i| ≤ delta`,
/// found among the vertices of its linearity regions.
fn best_vertex(
    active: &[usize],
    g: &[f64],
    slopes: &[[f64; 2]],
    delta: f64,
    model: &dyn Fn([f64; 2]) -> f64,
) -> [f64; 2] {
    let mut cands: Vec<[f64; 2]> = vec![
        [0.0, 0.0],
        [delta, delta],
        [delta, -delta],
        [-delta, delta],
        [-delta, -delta],
    ];
    let inside = |d: &[f64; 2]| d[0].abs() <= delta * (1.0 + 1e-12) && d[1].abs() <= delta * (1.0 + 1e-12);
    for (x, &i) in active.iter().enumerate() {
        for &j in &active[x + 1..] {
            // g_i + s_i·d = g_j + s_j·d
            let (a, b, c) = (slopes[i][0] - slopes[j][0], slopes[i][1] - slopes[j][1], g[j] - g[i]);
            for edge in [delta, -delta] {
                if b.abs() > 1e-300 {
                    cands.push([edge, (c - a * edge) / b]);
                }
                if a.abs() > 1e-300 {
                    cands.push([(c - b * edge) / a, edge]);
                }
            }
            for &k in &active[x + 1..] {
                if k == j {
                    continue;
                }
                let (a2, b2, c2) = (slopes[i][0] - slopes[k][0], slopes[i][1] - slopes[k][1], g[k] - g[i]);
                let det = a * b2 - b * a2;
                if det.abs() > 1e-300 {
                    cands.push([(c * b2 - b * c2) / det, (a * c2 - c * a2) / det]);
                }
            }
        }
    }
    cands
        .into_iter()
        .filter(|d| d.iter().all(|v| v.is_finite()) && inside(d))
        .map(|d| (model(d), d))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map_or([0.0, 0.0], |(_, d)| d)
}

fn sphere(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn plane_basis(normal: &[f64; 3]) -> DenseMatrix {
    let mut cols = Vec::new();
    for e in 0..3 {
        let mut v = [0.0; 3];
        v[e] = 1.0;
        let d: f64 = v.iter().zip(normal).map(|(a, b)| a * b).sum();
        cols.extend(v.iter().zip(normal).map(|(a, b)| a - d * b));
    }
    let m = DenseMatrix::from_col_major(3, 3, cols).expect("finite");
    orthonormalize(&m).basis_matrix()
}

fn golden<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..GOLDEN_ITERS {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    if fa <= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

fn best_indices(values: &[f64], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx.truncate(count);
    idx
}

fn search_circle<F: Fn(f64) -> f64>(f: &F, resolution: usize) -> (f64, f64) {
    let step = std::f64::consts::PI / resolution as f64;
    let values: Vec<f64> = (0..resolution).map(|i| f(i as f64 * step)).collect();
    let mut best = (0.0, f64::INFINITY);
    for i in best_indices(&values, REFINE_STARTS) {
        let t0 = i as f64 * step;
        let cand = golden(f, t0 - step, t0 + step);
        let cand = if values[i] < cand.1 { (t0, values[i]) } else { cand };
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

fn search_sphere<F: Fn(f64, f64) -> f64>(
    f: &F,
    polish: &dyn Fn([f64; 3], f64) -> ([f64; 3], f64),
    resolution: usize,
) -> ([f64; 3], f64) {
    let step = std::f64::consts::PI / resolution as f64;
    let mut grid = Vec::with_capacity((resolution + 1) * resolution);
    for i in 0..=resolution {
        for j in 0..resolution {
            grid.push((i as f64 * step, j as f64 * step));
        }
    }
    let values: Vec<f64> = grid.iter().map(|&(a, b)| f(a, b)).collect();
    let mut best = (sphere(0.0, 0.0), f64::INFINITY);
    for k in best_indices(&values, REFINE_STARTS) {
        let (mut a, mut b) = grid[k];
        let mut v = values[k];
        let mut width = step;
        for _ in 0..COORD_CYCLES {
            let (na, va) = golden(&|x| f(x, b), a - width, a + width);
            if va < v {
                a = na;
                v = va;
            }
            let (nb, vb) = golden(&|y| f(a, y), b - width, b + width);
            if vb < v {
                b = nb;
                v = vb;
            }
            width *= 0.5;
        }
        // compass steps along diagonals catch ridges the axis passes miss
        let mut h = step;
        while h > 1e-12 {
            let mut moved = false;
            for (da, db) in [
                (1.0, 1.0),
                (1.0, -1.0),
                (-1.0, 1.0),
                (-1.0, -1.0),
                (1.0, 0.0),
                (-1.0, 0.0),
                (0.0, 1.0),
                (0.0, -1.0),
            ] {
                let cand = f(a + da * h, b + db * h);
                if cand < v {
                    a += da * h;
                    b += db * h;
                    v = cand;
                    moved = true;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        let (w, v) = polish(sphere(a, b), v);
        if v < best.1 {
            best = (w, v);
        }
    }
    best
}

/// Symmetric point set near a known `n`-dimensional subspace.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub points: PointSet,
    pub true_subspace: Subspace,
    /// Every point lies within this distance of `true_subspace`.
    pub noise_level: f64,
    pub seed: u64,
}

/// `m` random points `y + e` with `y` in a random `n`-dimensional subspace
/// (coordinates uniform in `[-1, 1]`) and `e` orthogonal to it with norm
/// uniform in `[0, noise]`, together with their negations and the origin.
pub fn make_planted(ambient: usize, m: usize, n: usize, noise: f64, seed: u64) -> Result<PlantedInstance> {
    if n == 0 || n >= ambient {
        return Err(Error::InvalidRank {
            rank: n,
            max: ambient.saturating_sub(1),
        });
    }
    if m < 2 {
        return Err(invalid("m", "at least two points are needed"));
    }
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(invalid("noise", format!("must be finite and >= 0, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss: Vec<f64> = (0..ambient * ambient).map(|_| rng.sample(StandardNormal)).collect();
    let frame = orthonormalize(&DenseMatrix::from_col_major(ambient, ambient, gauss)?);
    let true_subspace = Subspace::from_orthonormal(&frame.basis_matrix().select_columns(&(0..n).collect::<Vec<_>>()))?;

    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(2 * m + 1);
    while cols.len() < 2 * m {
        let mut x = vec![0.0; ambient];
        for k in 0..n {
            let c: f64 = rng.gen_range(-1.0..1.0);
            x.iter_mut().zip(frame.vector(k)).for_each(|(xi, bi)| *xi += c * bi);
        }
        let mut e = vec![0.0; ambient];
        for k in n..ambient {
            let g: f64 = rng.sample(StandardNormal);
            e.iter_mut().zip(frame.vector(k)).for_each(|(ei, bi)| *ei += g * bi);
        }
        let len = noise * rng.gen::<f64>();
        let en = norm2(&e);
        if en > 0.0 {
            x.iter_mut().zip(&e).for_each(|(xi, ei)| *xi += len / en * ei);
        }
        if norm2(&x) <= 1e-6 {
            continue;
        }
        cols.push(x.iter().map(|v| -v).collect());
        cols.push(x);
    }
    cols.push(vec![0.0; ambient]);
    Ok(PlantedInstance {
        points: PointSet::symmetric(DenseMatrix::from_columns(&cols)?)?,
        true_subspace,
        noise_level: noise,
        seed,
    })
}
