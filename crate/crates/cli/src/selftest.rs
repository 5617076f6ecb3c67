//! A fast subset of the acceptance checks, runnable from the binary.

use sspn_core::greedy::{best_rank_n_subspace, check_lemma2_bound, greedy_reduce, ReductionOptions};
use sspn_core::linalg::spd_inverse;
use sspn_core::mvee::{infinity_fit, mvee_with_stats};
use sspn_core::oracle::{brute_force_fit_within, brute_force_width, exact_p2_width, make_planted};
use sspn_core::pointset::reduce_to_span;
use sspn_core::{PNorm, Result};

use crate::report::{Check, SelftestResult};

fn check(name: &str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check {
            name: name.into(),
            passed,
            detail,
        },
        Err(e) => Check {
            name: name.into(),
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn dimension_bound(seed: u64) -> Result<(bool, String)> {
    let mut worst = (0, 0);
    for k in 0..5 {
        let inst = make_planted(24, 120, 2, 1.0, seed.wrapping_add(k))?;
        let r = greedy_reduce(&inst.points, 2, &ReductionOptions::default())?;
        if r.reduced_subspace.dim() > r.dimension_bound {
            return Ok((
                false,
                format!("dim {} > bound {}", r.reduced_subspace.dim(), r.dimension_bound),
            ));
        }
        worst = worst.max((r.reduced_subspace.dim(), r.dimension_bound));
    }
    Ok((true, format!("largest dim {} (bound {})", worst.0, worst.1)))
}

fn p2_exactness(seed: u64) -> Result<(bool, String)> {
    let inst = make_planted(12, 60, 3, 1.0, seed)?;
    let s = best_rank_n_subspace(&inst.points, 3, &ReductionOptions::default())?;
    let got: f64 = inst.points.residuals_to(&s).iter().map(|r| r * r).sum::<f64>().sqrt();
    let exact = exact_p2_width(&inst.points, 3)?;
    let gap = (got - exact).abs();
    Ok((gap <= 1e-8, format!("|{got} - {exact}| = {gap:e}")))
}

fn mvee_containment(seed: u64) -> Result<(bool, String)> {
    let inst = make_planted(6, 80, 5, 1.0, seed)?;
    let (reduced, _) = reduce_to_span(&inst.points)?;
    let eps = 0.01;
    let (e, stats) = mvee_with_stats(&reduced, eps)?;
    let m = e.dim() as f64;
    let outer = reduced.points().map(|x| e.gauge_squared(x)).fold(0.0, f64::max);
    // support function of E must not exceed that of CH(P): √(cᵀQ⁻¹c) ≤ max |cᵀp|
    let inv = spd_inverse(e.shape())?;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut inner_ok = true;
    for k in 0..e.dim() {
        for c in [inv.column(k), e.shape().column(k)] {
            let inv_c: Vec<f64> = (0..e.dim()).map(|j| dot(inv.column(j), c)).collect();
            let h_e = dot(c, &inv_c).sqrt();
            let h_p = reduced.points().map(|x| dot(x, c).abs()).fold(0.0, f64::max);
            inner_ok &= h_e <= h_p * (1.0 + 1e-9);
        }
    }
    let ok = outer <= (1.0 + eps) * m * (1.0 + 1e-12) && inner_ok;
    Ok((
        ok,
        format!("max pᵀQp / m = {:.6}, {} iterations", outer / m, stats.iterations),
    ))
}

fn planted_certificate(seed: u64) -> Result<(bool, String)> {
    let (n, m, noise) = (2usize, 100usize, 0.05);
    let inst = make_planted(20, m, n, noise, seed)?;
    let fit = infinity_fit(&inst.points, n, 2.0, 0.1, &ReductionOptions::default())?;
    let limit = 10.0 * ((n as f64) * (inst.points.len() as f64).ln()).sqrt() * noise;
    Ok((
        fit.certificate <= limit,
        format!("certificate {:.6} vs limit {limit:.6}", fit.certificate),
    ))
}

fn order_statistic_bound(seed: u64) -> Result<(bool, String)> {
    let inst = make_planted(10, 50, 2, 0.1, seed)?;
    let s = best_rank_n_subspace(&inst.points, 2, &ReductionOptions::default())?;
    let m = inst.points.nonzero_count() as f64;
    let mut worst = 0.0_f64;
    for p in [PNorm::Finite(3.0), PNorm::Finite(10.0), PNorm::Infinity] {
        let d_ref = match p {
            PNorm::Infinity => inst.noise_level,
            PNorm::Finite(q) => inst.noise_level * m.powf(1.0 / q),
        };
        let r = check_lemma2_bound(&inst.points, &s, p, d_ref);
        if !r.holds {
            return Ok((false, format!("p = {p}: ratio {}", r.worst_ratio)));
        }
        worst = worst.max(r.worst_ratio);
    }
    Ok((true, format!("largest ratio {worst:.4}")))
}

fn oracle_scale(seed: u64) -> Result<(bool, String)> {
    let inst = make_planted(3, 10, 1, 1.0, seed)?;
    let r = greedy_reduce(&inst.points, 1, &ReductionOptions::default())?;
    let opt = brute_force_width(&inst.points, 1, PNorm::Infinity, 90)?;
    let inside = if r.reduced_subspace.dim() == 0 {
        PNorm::Infinity.norm(&inst.points.residuals_to(&r.reduced_subspace))
    } else {
        brute_force_fit_within(&inst.points, &r.reduced_subspace, 1, PNorm::Infinity, 90)?.width
    };
    let limit = (1.0 + 2f64.sqrt()) * opt + 1e-4;
    Ok((
        inside <= limit,
        format!("best inside S {inside:.6} vs limit {limit:.6}"),
    ))
}

pub fn run_selftest(seed: u64) -> SelftestResult {
    let checks = vec![
        check("dimension-bound", dimension_bound(seed)),
        check("p2-exactness", p2_exactness(seed)),
        check("mvee-containment", mvee_containment(seed)),
        check("planted-certificate", planted_certificate(seed)),
        check("order-statistic-bound", order_statistic_bound(seed)),
        check("oracle-near-optimality", oracle_scale(seed)),
    ];
    SelftestResult {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
