//! Greedy least-squares dimensionality reduction.
//!
//! Each round fits the best rank-`n` least-squares subspace to the points
//! still in play, keeps the `⌈(1 - 1/ξ)M⌉` best-fit points (plus negation
//! partners, so the kept set stays symmetric) and recurses on the rest.
//! After at most `⌈log_ξ M⌉` rounds every point has been claimed by some
//! round, and the span of the round subspaces contains a near-optimal
//! `n`-dimensional fit for every `p ∈ (2, ∞]`.

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    norm2, orthonormalize, randomized_range_with, svd, DenseMatrix, Subspace, DEFAULT_POWER_ITERATIONS, RANK_TOL,
};
use crate::pointset::{order_nonzero, PNorm, PointSet, ResidualVector, ZERO_TOL};

/// Early-stop threshold used when one is requested without a value.
pub const DEFAULT_ALPHA_STOP: f64 = 2.0;

/// Denominators below this make [`alpha_estimate`] report `+∞`.
pub const ALPHA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowRankMode {
    /// Top-`n` left singular vectors from a full SVD.
    DeterministicSvd,
    /// Randomized range finder with a `max(2n, 7)`-column sketch, then the
    /// top-`n` directions of the compressed matrix.
    Randomized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOptions {
    /// Peel parameter `ξ > 1`; each round keeps a `(1 - 1/ξ)` fraction.
    pub xi: f64,
    pub p: PNorm,
    pub lowrank_mode: LowRankMode,
    pub seed: u64,
    /// Stop once the round's α falls below this value.
    pub early_stop_alpha: Option<f64>,
    /// Replace leftover points by their components orthogonal to the
    /// accumulated subspace after each round.
    pub deflate: bool,
    /// Defaults to `⌈log_ξ M⌉`; a smaller cap is honoured.
    pub max_rounds: Option<usize>,
    pub power_iterations: usize,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self {
            xi: 2.0,
            p: PNorm::Infinity,
            lowrank_mode: LowRankMode::DeterministicSvd,
            seed: 0,
            early_stop_alpha: None,
            deflate: false,
            max_rounds: None,
            power_iterations: DEFAULT_POWER_ITERATIONS,
        }
    }
}

impl ReductionOptions {
    /// Checks the options against a symmetric set with `m` nonzero points.
    pub fn validate(&self, m: usize) -> Result<()> {
        if !(self.xi.is_finite() && self.xi > 1.0) {
            return Err(invalid("xi", format!("must be finite and > 1, got {}", self.xi)));
        }
        self.p.validate_public()?;
        if let PNorm::Finite(_) = self.p {
            if m >= 2 && self.xi > m as f64 / 2.0 {
                return Err(invalid(
                    "xi",
                    format!("finite p requires xi <= M/2 = {}, got {}", m as f64 / 2.0, self.xi),
                ));
            }
        }
        if let Some(a) = self.early_stop_alpha {
            if !(a.is_finite() && a > 1.0) {
                return Err(invalid("early_stop_alpha", format!("must be finite and > 1, got {a}")));
            }
        }
        if self.max_rounds == Some(0) {
            return Err(invalid("max_rounds", "must be at least 1"));
        }
        Ok(())
    }

    fn round_seed(&self, round: usize) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(round as u64)
    }
}

/// `⌈(1 - 1/ξ) m⌉`, computed as `m - ⌊m/ξ⌋` with a 1e-9 guard so that
/// exact integer quotients are not pushed across the floor by rounding.
pub fn keep_count(m: usize, xi: f64) -> usize {
    let q = m as f64 / xi;
    let mut f = q.floor();
    if q - f > 1.0 - 1e-9 {
        f += 1.0;
    }
    m - (f as usize).min(m)
}

/// `⌈log_ξ m⌉` (at least 1 when `m ≥ 1`).
pub fn round_cap(m: usize, xi: f64) -> usize {
    if m == 0 {
        return 0;
    }
    let target = m as f64;
    let mut pow = 1.0_f64;
    let mut k = 0;
    while pow * (1.0 + 1e-12) < target {
        pow *= xi;
        k += 1;
    }
    k.max(1)
}

/// Best rank-`n` subspace for the columns of `x`.
///
/// The result has dimension `min(n, numerical rank)`: directions with a
/// zero singular value carry no information about the points and are not
/// returned.
pub(crate) fn fit_rank_n(
    x: &DenseMatrix,
    n: usize,
    mode: LowRankMode,
    seed: u64,
    power_iterations: usize,
) -> Result<Subspace> {
    let ambient = x.rows();
    if x.cols() == 0 || x.max_abs() == 0.0 {
        return Ok(Subspace::zero(ambient));
    }
    let min_dim = x.rows().min(x.cols());
    let (frame, decomposition) = match mode {
        LowRankMode::Randomized if n < min_dim => {
            let q = randomized_range_with(x, n, seed, power_iterations)?;
            let compressed = q.basis_matrix().t_matmul(x)?;
            (Some(q), svd(&compressed)?)
        }
        _ => (None, svd(x)?),
    };
    let r = n.min(decomposition.numerical_rank(RANK_TOL));
    let cols: Vec<usize> = (0..r).collect();
    let top = decomposition.left_vectors.select_columns(&cols);
    let top = match frame {
        Some(q) => q.basis_matrix().matmul(&top)?,
        None => top,
    };
    Ok(orthonormalize(&top))
}

/// Best least-squares `n`-dimensional subspace for a symmetric set: the
/// span of the top-`n` left singular vectors of the matrix whose columns
/// are the nonzero points (or the randomized approximation of it).
pub fn best_rank_n_subspace(p: &PointSet, n: usize, opts: &ReductionOptions) -> Result<Subspace> {
    require_symmetric(p)?;
    if n == 0 || n > p.ambient_dim() {
        return Err(Error::InvalidRank {
            rank: n,
            max: p.ambient_dim(),
        });
    }
    let idx: Vec<usize> = (0..p.len()).filter(|&j| norm2(p.point(j)) > ZERO_TOL).collect();
    fit_rank_n(
        &p.matrix().select_columns(&idx),
        n,
        opts.lowrank_mode,
        opts.seed,
        opts.power_iterations,
    )
}

fn require_symmetric(p: &PointSet) -> Result<()> {
    if !p.is_symmetric() {
        return Err(invalid(
            "points",
            "a symmetric point set is required (see `symmetrize`)",
        ));
    }
    Ok(())
}

/// Indices chosen by one round: the first `keep_count` nonzero points in
/// residual order, then the negation partner of any kept point whose
/// partner was not kept. Returned sorted ascending.
fn select_indices(order: &[usize], keep: usize, partners: &[usize], active: &[bool]) -> Vec<usize> {
    let mut chosen = vec![false; partners.len()];
    for &j in &order[..keep] {
        chosen[j] = true;
    }
    for &j in &order[..keep] {
        let q = partners[j];
        if active[q] {
            chosen[q] = true;
        }
    }
    (0..chosen.len()).filter(|&j| chosen[j]).collect()
}

/// Well-fit symmetric subset `P' ⊂ P` for the linear subspace `s`: the
/// origin plus the `⌈(1 - 1/ξ)M⌉` nonzero points closest to `s`, closed
/// under negation.
pub fn select_well_fit_subset(p: &PointSet, s: &Subspace, xi: f64) -> Result<PointSet> {
    require_symmetric(p)?;
    if !(xi.is_finite() && xi > 1.0) {
        return Err(invalid("xi", format!("must be finite and > 1, got {xi}")));
    }
    let partners = p.negation_partners()?;
    let res = p.residuals_to(s);
    let order = order_nonzero(p, &res);
    let keep = keep_count(order.len(), xi);
    let active: Vec<bool> = (0..p.len()).map(|j| norm2(p.point(j)) > ZERO_TOL).collect();
    let mut idx = select_indices(&order, keep, &partners, &active);
    if let Some(z) = (0..p.len()).find(|&j| !active[j]) {
        idx.push(z);
        idx.sort_unstable();
    }
    let sub = p.subset(&idx);
    let with_origin = if idx.iter().any(|&j| !active[j]) {
        sub.into_matrix()
    } else {
        let mut cols: Vec<Vec<f64>> = sub.points().map(<[f64]>::to_vec).collect();
        cols.push(vec![0.0; p.ambient_dim()]);
        DenseMatrix::from_columns(&cols)?
    };
    Ok(PointSet::from_parts(with_origin, true, None))
}

/// Outcome of checking the order-statistic residual bound.
#[derive(Debug, Clone)]
pub struct OrderStatisticReport {
    /// `bound_m - r_m²` for `m = 1..=M` (1-based order statistics).
    pub margins: Vec<f64>,
    /// Largest `r_m² / bound_m`.
    pub worst_ratio: f64,
    pub holds: bool,
}

/// Checks `r_m² ≤ M^(1-2/p) / (M - m + 1) · d_ref²` for every order
/// statistic `r_1 ≤ … ≤ r_M` of the nonzero points' residuals to `s`,
/// within relative slack 1e-9.
///
/// `d_ref` may be any upper bound on the optimal `d_n^(p)` width.
pub fn check_lemma2_bound(p: &PointSet, s: &Subspace, exponent: PNorm, d_ref: f64) -> OrderStatisticReport {
    let res = p.residuals_to(s);
    let order = order_nonzero(p, &res);
    let m = order.len();
    let growth = match exponent {
        PNorm::Infinity => m as f64,
        PNorm::Finite(q) => (m as f64).powf(1.0 - 2.0 / q),
    };
    let mut margins = Vec::with_capacity(m);
    let mut worst_ratio = 0.0_f64;
    let mut holds = true;
    for (k, &j) in order.iter().enumerate() {
        let rank = k + 1;
        let bound = growth / (m - rank + 1) as f64 * d_ref * d_ref;
        let r2 = res[j] * res[j];
        margins.push(bound - r2);
        if r2 > bound * (1.0 + 1e-9) {
            holds = false;
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(r2 / bound);
        } else if r2 > 0.0 {
            worst_ratio = f64::INFINITY;
        }
    }
    OrderStatisticReport {
        margins,
        worst_ratio,
        holds,
    }
}

/// Closed-form per-round bound on `(d^(p)(P', S))^p / d_ref^p`:
/// `((2ξ)^(p/2 - 1) - 1) / (p/2 - 1)`. Valid while the kept fraction
/// leaves at least `M/(2ξ)` points out.
pub fn subset_bound_factor(p: f64, xi: f64) -> f64 {
    let e = p / 2.0 - 1.0;
    ((2.0 * xi).powf(e) - 1.0) / e
}

/// Sum form of the same bound for `k` kept nonzero points out of `m`:
/// `m^(p/2 - 1) Σ_{j=m-k+1}^{m} j^(-p/2)`. Holds for every `k ≤ m`.
pub fn subset_bound_sum(m: usize, k: usize, p: f64) -> f64 {
    let e = p / 2.0;
    let tail: f64 = ((m - k + 1)..=m).map(|j| (j as f64).powf(-e)).sum();
    (m as f64).powf(e - 1.0) * tail
}

/// `α = d^(p)(P, S) / d^(p)(P', S)`.
///
/// For `p = ∞` this is the largest residual over the largest kept
/// residual, i.e. the worst residual over the one at the keep boundary.
/// A denominator below [`ALPHA_FLOOR`] gives `+∞`, unless the numerator is
/// also that small (nothing left to fit), which gives 1.
pub fn alpha_estimate(p: &PointSet, p_prime: &PointSet, s: &Subspace, exponent: PNorm) -> f64 {
    alpha_from_residuals(&p.residuals_to(s), &p_prime.residuals_to(s), exponent)
}

fn alpha_from_residuals(all: &[f64], kept: &[f64], exponent: PNorm) -> f64 {
    let num = exponent.norm(all);
    let den = exponent.norm(kept);
    if den < ALPHA_FLOOR {
        if num < ALPHA_FLOOR {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundLog {
    /// 1-based.
    pub round: usize,
    pub subspace: Subspace,
    /// Nonzero points in play at the start of the round.
    pub points_in: usize,
    /// `|P'|`, counting the origin.
    pub subset_size: usize,
    pub worst_kept_residual: f64,
    /// `d^(p)(P_i, S^i)` over the round's points.
    pub round_distance: f64,
    /// `d^(p)(P'_i, S^i)`.
    pub subset_distance: f64,
    pub alpha: f64,
    /// Nonzero points left for later rounds.
    pub remaining: usize,
    /// The round's points had been deflated by earlier rounds.
    pub deflated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    /// Every point was claimed by some round.
    Exhausted,
    /// The round cap was reached with points left over.
    RoundCap,
    /// α fell below the threshold.
    EarlyStop { alpha: f64 },
}

#[derive(Debug, Clone)]
pub struct FitReport {
    /// Orthonormal basis of the span of all round subspaces.
    pub reduced_subspace: Subspace,
    pub rounds: Vec<RoundLog>,
    /// Distances of the input points to `reduced_subspace`.
    pub residuals: ResidualVector,
    /// `d^(p)(P, reduced_subspace)` for the requested `p`.
    pub achieved: f64,
    pub p: PNorm,
    /// `n ⌈log_ξ M⌉`.
    pub dimension_bound: usize,
    pub stop: StopReason,
}

/// Iterated greedy reduction of a symmetric point set to a subspace of
/// dimension at most `n ⌈log_ξ M⌉`, `M` the number of nonzero points.
pub fn greedy_reduce(p: &PointSet, n: usize, opts: &ReductionOptions) -> Result<FitReport> {
    require_symmetric(p)?;
    if n == 0 || n > p.ambient_dim() {
        return Err(Error::InvalidRank {
            rank: n,
            max: p.ambient_dim(),
        });
    }
    let partners = p.negation_partners()?;
    let total = p.len();
    let mut work = p.matrix().clone();
    let mut active: Vec<bool> = (0..total).map(|j| norm2(p.point(j)) > ZERO_TOL).collect();
    let m0 = active.iter().filter(|&&a| a).count();
    opts.validate(m0)?;

    let cap_default = round_cap(m0, opts.xi);
    let cap = opts.max_rounds.map_or(cap_default, |r| r.min(cap_default));
    let dimension_bound = n * cap_default;
    let scale = p.matrix().max_abs().max(1.0);

    let mut rounds: Vec<RoundLog> = Vec::new();
    let mut accumulated = Subspace::zero(p.ambient_dim());
    let mut stop = StopReason::Exhausted;

    for round in 1..=cap {
        let in_play: Vec<usize> = (0..total).filter(|&j| active[j]).collect();
        if in_play.is_empty() {
            break;
        }
        let x = work.select_columns(&in_play);
        let s_i = fit_rank_n(&x, n, opts.lowrank_mode, opts.round_seed(round), opts.power_iterations)?;

        let mut res = vec![0.0; total];
        for &j in &in_play {
            res[j] = s_i.residual_norm(work.column(j));
        }
        let mut order = in_play.clone();
        order.sort_by(|&a, &b| res[a].total_cmp(&res[b]).then(a.cmp(&b)));
        let keep = keep_count(order.len(), opts.xi);
        let kept = select_indices(&order, keep, &partners, &active);

        let round_res: Vec<f64> = in_play.iter().map(|&j| res[j]).collect();
        let kept_res: Vec<f64> = kept.iter().map(|&j| res[j]).collect();
        let alpha = alpha_from_residuals(&round_res, &kept_res, opts.p);
        for &j in &kept {
            active[j] = false;
        }

        accumulated = accumulated.union(&s_i);
        if opts.deflate {
            for (j, live) in active.iter_mut().enumerate() {
                if *live {
                    let r = accumulated.residual(work.column(j));
                    work.column_mut(j).copy_from_slice(&r);
                    if norm2(&r) <= ZERO_TOL {
                        *live = false;
                    }
                }
            }
        }
        let leftover: Vec<usize> = (0..total).filter(|&j| active[j]).collect();
        let all_on_span = leftover
            .iter()
            .all(|&j| accumulated.residual_norm(work.column(j)) <= ZERO_TOL * scale);
        if all_on_span {
            leftover.iter().for_each(|&j| active[j] = false);
        }
        let remaining = active.iter().filter(|&&a| a).count();
        rounds.push(RoundLog {
            round,
            subspace: s_i,
            points_in: in_play.len(),
            subset_size: kept.len() + 1,
            worst_kept_residual: kept_res.iter().fold(0.0, |m: f64, &v| m.max(v)),
            round_distance: opts.p.norm(&round_res),
            subset_distance: opts.p.norm(&kept_res),
            alpha,
            remaining,
            deflated: opts.deflate && round > 1,
        });

        if remaining == 0 {
            stop = StopReason::Exhausted;
            break;
        }
        if let Some(threshold) = opts.early_stop_alpha {
            if alpha < threshold {
                stop = StopReason::EarlyStop { alpha };
                break;
            }
        }
        if round == cap {
            stop = StopReason::RoundCap;
        }
    }

    let mut stacked = Vec::new();
    for r in &rounds {
        stacked.extend_from_slice(r.subspace.basis_matrix().as_col_major());
    }
    let dim_total: usize = rounds.iter().map(|r| r.subspace.dim()).sum();
    let reduced_subspace = orthonormalize(&DenseMatrix::from_col_major_unchecked(
        p.ambient_dim(),
        dim_total,
        stacked,
    ));
    let residuals = ResidualVector {
        values: p.residuals_to(&reduced_subspace),
    };
    let achieved = residuals.norm(opts.p);
    Ok(FitReport {
        reduced_subspace,
        rounds,
        residuals,
        achieved,
        p: opts.p,
        dimension_bound,
        stop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::symmetrize;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sym(points: &[Vec<f64>]) -> PointSet {
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for x in points {
            cols.push(x.clone());
            cols.push(x.iter().map(|v| -v).collect());
        }
        cols.push(vec![0.0; points[0].len()]);
        PointSet::symmetric(DenseMatrix::from_columns(&cols).unwrap()).unwrap()
    }

    fn random_symmetric(n_dim: usize, m: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n_dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        sym(&pts)
    }

    #[test]
    fn keep_and_cap_counts() {
        assert_eq!(keep_count(4, 4.0 / 3.0), 1);
        assert_eq!(keep_count(10, 2.0), 5);
        assert_eq!(keep_count(3, 2.0), 2);
        assert_eq!(keep_count(9, 3.0), 6);
        assert_eq!(keep_count(1, 1e9), 1);
        assert_eq!(round_cap(8, 2.0), 3);
        assert_eq!(round_cap(9, 2.0), 4);
        assert_eq!(round_cap(1, 2.0), 1);
        assert_eq!(round_cap(9, 3.0), 2);
    }

    #[test]
    fn alpha_matches_worst_over_boundary() {
        let p = sym(&[vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0, 1.0], vec![0.0, 10.0]]);
        let s = Subspace::from_orthonormal(&DenseMatrix::from_row_major(2, 1, &[1., 0.]).unwrap()).unwrap();
        let sub = select_well_fit_subset(&p, &s, 4.0 / 3.0).unwrap();
        assert_eq!(sub.nonzero_count(), 2);
        assert!(sub.is_symmetric());
        let a = alpha_estimate(&p, &sub, &s, PNorm::Infinity);
        assert!((a - 10.0).abs() < 1e-12);
        assert_eq!(alpha_estimate(&p, &p, &s, PNorm::Infinity), 1.0);
    }

    #[test]
    fn alpha_edge_cases() {
        assert_eq!(alpha_from_residuals(&[0.0, 0.0], &[0.0], PNorm::Infinity), 1.0);
        assert_eq!(
            alpha_from_residuals(&[1.0, 0.0], &[0.0], PNorm::Infinity),
            f64::INFINITY
        );
    }

    #[test]
    fn exact_subspace_needs_one_round() {
        let p = sym(&[
            vec![1.0, 2.0, 0.0],
            vec![-3.0, 0.5, 0.0],
            vec![0.2, 0.1, 0.0],
            vec![4.0, -1.0, 0.0],
        ]);
        let report = greedy_reduce(&p, 2, &ReductionOptions::default()).unwrap();
        assert_eq!(report.rounds.len(), 1);
        assert_eq!(report.stop, StopReason::Exhausted);
        assert!(report.achieved < 1e-12);
        assert_eq!(report.reduced_subspace.dim(), 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = random_symmetric(3, 6, 1);
        let base = ReductionOptions::default();
        assert!(greedy_reduce(&p, 0, &base).is_err());
        assert!(greedy_reduce(&p, 4, &base).is_err());
        let bad_xi = ReductionOptions {
            xi: 1.0,
            ..base.clone()
        };
        assert!(greedy_reduce(&p, 1, &bad_xi).is_err());
        let big_xi = ReductionOptions {
            xi: 7.0,
            p: PNorm::Finite(4.0),
            ..base.clone()
        };
        assert!(greedy_reduce(&p, 1, &big_xi).is_err());
        let p2 = ReductionOptions {
            p: PNorm::Finite(2.0),
            ..base.clone()
        };
        assert!(greedy_reduce(&p, 1, &p2).is_err());
        let alpha = ReductionOptions {
            early_stop_alpha: Some(0.5),
            ..base
        };
        assert!(greedy_reduce(&p, 1, &alpha).is_err());
        let asym = PointSet::from_points(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(best_rank_n_subspace(&asym, 1, &ReductionOptions::default()).is_err());
    }

    #[test]
    fn randomized_matches_svd_on_low_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..40)
            .map(|_| {
                let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                vec![a, b, a + b, a - b, 2.0 * a, 0.0, b]
            })
            .collect();
        let p = sym(&pts);
        let det = best_rank_n_subspace(&p, 2, &ReductionOptions::default()).unwrap();
        let rnd = best_rank_n_subspace(
            &p,
            2,
            &ReductionOptions {
                lowrank_mode: LowRankMode::Randomized,
                seed: 11,
                ..Default::default()
            },
        )
        .unwrap();
        for k in 0..2 {
            assert!(rnd.residual_norm(det.vector(k)) < 1e-8);
        }
    }

    #[test]
    fn deflation_and_early_stop_respect_bounds() {
        let p = random_symmetric(6, 60, 9);
        for deflate in [false, true] {
            for alpha in [None, Some(DEFAULT_ALPHA_STOP)] {
                let opts = ReductionOptions {
                    deflate,
                    early_stop_alpha: alpha,
                    ..Default::default()
                };
                let r = greedy_reduce(&p, 1, &opts).unwrap();
                assert!(r.reduced_subspace.dim() <= r.dimension_bound);
                assert!(r.rounds.len() <= round_cap(60 * 2, 2.0));
                if alpha.is_none() {
                    assert!(matches!(r.stop, StopReason::Exhausted | StopReason::RoundCap));
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn least_squares_fit_satisfies_order_bound(seed in 0u64..10_000, n in 1usize..3, q in 3.0f64..12.0) {
            let p = random_symmetric(4, 12, seed);
            let s = best_rank_n_subspace(&p, n, &ReductionOptions::default()).unwrap();
            for exponent in [PNorm::Finite(q), PNorm::Infinity] {
                let d_ref = exponent.norm(&p.residuals_to(&s));
                let report = check_lemma2_bound(&p, &s, exponent, d_ref);
                prop_assert!(report.holds, "ratio {}", report.worst_ratio);
            }
        }

        #[test]
        fn selected_subset_is_symmetric(seed in 0u64..10_000, xi in 1.1f64..5.0) {
            let p = symmetrize(&PointSet::new(
                DenseMatrix::from_col_major(3, 7, {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..21).map(|_| rng.gen_range(-1.0..1.0)).collect()
                }).unwrap(),
            ));
            let s = best_rank_n_subspace(&p, 1, &ReductionOptions::default()).unwrap();
            let sub = select_well_fit_subset(&p, &s, xi).unwrap();
            prop_assert!(sub.negation_partners().is_ok());
            prop_assert!(sub.nonzero_count() >= keep_count(p.nonzero_count(), xi));
        }

        #[test]
        fn reduction_dimension_bound(seed in 0u64..10_000, n in 1usize..3, xi in 1.5f64..4.0) {
            let p = random_symmetric(8, 20, seed);
            let r = greedy_reduce(&p, n, &ReductionOptions { xi, ..Default::default() }).unwrap();
            prop_assert!(r.reduced_subspace.dim() <= r.dimension_bound);
            prop_assert!(r.rounds.iter().all(|l| l.subspace.dim() <= n));
        }
    }
}
