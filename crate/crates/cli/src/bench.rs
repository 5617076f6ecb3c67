//! Timing and accuracy over planted instances.
//!
//! Cell `k` draws a planted instance from seed `seed + k`: `M` points near a
//! random `n`-dimensional subspace of `R^N` with noise at most
//! [`BENCH_NOISE`], plus their negations and the origin. Accuracy columns
//! are deterministic; wall-clock medians go to the separate timing table.

use std::time::Instant;

use rayon::prelude::*;
use sspn_core::greedy::{best_rank_n_subspace, greedy_reduce, ReductionOptions};
use sspn_core::mvee::infinity_fit;
use sspn_core::oracle::make_planted;
use sspn_core::PNorm;

use crate::config::{BenchCell, RunConfig};
use crate::report::{BenchResult, BenchRow, BenchTiming};
use crate::CliError;

pub const BENCH_NOISE: f64 = 0.05;
pub const THREADS_ENV: &str = "SSPN_THREADS";

/// Worker cap from `SSPN_THREADS`; `None` leaves the choice to rayon.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        0.5 * (xs[k / 2 - 1] + xs[k / 2])
    }
}

fn millis<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

fn run_cell(index: usize, cell: &BenchCell, cfg: &RunConfig) -> Result<(BenchRow, BenchTiming), CliError> {
    let seed = cfg.seed.wrapping_add(index as u64);
    let inst = make_planted(cell.ambient, cell.points, cell.n, BENCH_NOISE, seed)?;
    let opts = ReductionOptions {
        xi: cell.xi,
        p: PNorm::Infinity,
        lowrank_mode: cell.lowrank.into(),
        seed,
        ..ReductionOptions::default()
    };
    let (mut t_low, mut t_red, mut t_fit) = (Vec::new(), Vec::new(), Vec::new());
    let mut last = None;
    for _ in 0..cfg.reps {
        let (s, ms) = millis(|| best_rank_n_subspace(&inst.points, cell.n, &opts));
        s?;
        t_low.push(ms);
        let (red, ms) = millis(|| greedy_reduce(&inst.points, cell.n, &opts));
        t_red.push(ms);
        let (fit, ms) = millis(|| infinity_fit(&inst.points, cell.n, cell.xi, cfg.epsilon, &opts));
        t_fit.push(ms);
        last = Some((red?, fit?));
    }
    let (red, fit) = last.expect("at least one repetition");
    let row = BenchRow {
        cell: cell.clone(),
        seed,
        noise_level: BENCH_NOISE,
        reduced_dim: red.reduced_subspace.dim(),
        dimension_bound: red.dimension_bound,
        rounds: red.rounds.len(),
        reduce_distance_inf: red.achieved,
        certificate: fit.certificate,
        certificate_over_noise: fit.certificate / BENCH_NOISE,
        bound_factor: fit.bound_factor,
    };
    let timing = BenchTiming {
        cell: index,
        lowrank_ms_median: median(t_low),
        reduce_ms_median: median(t_red),
        fit_ms_median: median(t_fit),
    };
    Ok((row, timing))
}

pub fn run_bench(cfg: &RunConfig) -> Result<(BenchResult, Vec<BenchTiming>), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = thread_cap()? {
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let cells: Vec<(BenchRow, BenchTiming)> = pool.install(|| {
        cfg.grid
            .par_iter()
            .enumerate()
            .map(|(k, cell)| run_cell(k, cell, cfg))
            .collect::<Result<_, _>>()
    })?;
    let (rows, timing) = cells.into_iter().unzip();
    Ok((BenchResult { reps: cfg.reps, rows }, timing))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
