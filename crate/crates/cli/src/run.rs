use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use sspn_core::greedy::{greedy_reduce, ReductionOptions};
use sspn_core::mvee::infinity_fit;
use sspn_core::oracle::{brute_force_fit, exact_p2_width};
use sspn_core::pointset::{residuals, symmetrize};
use sspn_core::{AffineSubspace, PNorm, PointSet};

use crate::config::{Cli, Mode, RunConfig};
use crate::ingest::{ingest, InputFormat};
use crate::report::{
    p_label, render, stop_label, FitInfResult, ModeResult, MveeJson, ReduceResult, Report, WidthsResult, SCHEMA,
};
use crate::{bench, exit, selftest, CliError};

/// A finished run. `success` is false only when a self-test check failed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub success: bool,
}

pub fn reduction_options(cfg: &RunConfig) -> ReductionOptions {
    ReductionOptions {
        xi: cfg.xi,
        p: cfg.p.unwrap_or(PNorm::Infinity),
        lowrank_mode: cfg.lowrank.into(),
        seed: cfg.seed,
        early_stop_alpha: cfg.alpha_stop,
        deflate: cfg.deflate,
        ..ReductionOptions::default()
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (result, timing, success) = match cfg.mode {
        Mode::Reduce => (ModeResult::Reduce(run_reduce(cfg, &load(cfg)?)?), None, true),
        Mode::FitInf => (ModeResult::FitInf(run_fit_inf(cfg, &load(cfg)?)?), None, true),
        Mode::Widths => (ModeResult::Widths(run_widths(cfg, &load(cfg)?)?), None, true),
        Mode::Bench => {
            let (rows, timing) = bench::run_bench(cfg)?;
            (ModeResult::Bench(rows), Some(timing), true)
        }
        Mode::Selftest => {
            let r = selftest::run_selftest(cfg.seed);
            let ok = r.passed;
            (ModeResult::Selftest(r), None, ok)
        }
    };
    let generated_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    Ok(Outcome {
        report: Report {
            schema: SCHEMA,
            mode: cfg.mode,
            generated_at,
            config: cfg.into(),
            result,
            timing,
        },
        success,
    })
}

fn load(cfg: &RunConfig) -> Result<PointSet, CliError> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Config("--input is required".into()))?;
    let p = ingest(path, InputFormat::Auto)?;
    if let Some(n) = cfg.n {
        if n > p.ambient_dim() {
            return Err(CliError::Config(format!(
                "--n {n} exceeds the input dimension {}",
                p.ambient_dim()
            )));
        }
    }
    Ok(p)
}

fn required_n(cfg: &RunConfig) -> Result<usize, CliError> {
    cfg.n.ok_or_else(|| CliError::Config("--n is required".into()))
}

pub fn run_reduce(cfg: &RunConfig, p: &PointSet) -> Result<ReduceResult, CliError> {
    let n = required_n(cfg)?;
    let opts = reduction_options(cfg);
    let sym = symmetrize(p);
    let center = sym.mean().map_or_else(|| vec![0.0; p.ambient_dim()], <[f64]>::to_vec);
    let report = greedy_reduce(&sym, n, &opts)?;
    let affine = AffineSubspace::through(report.reduced_subspace.clone(), &center);
    let res = residuals(p, &affine)?;
    Ok(ReduceResult {
        ambient_dim: p.ambient_dim(),
        input_points: p.len(),
        symmetric_points: sym.len(),
        nonzero_points: sym.nonzero_count(),
        center,
        dimension: report.reduced_subspace.dim(),
        dimension_bound: report.dimension_bound,
        stop: stop_label(report.stop),
        basis: (&report.reduced_subspace).into(),
        achieved: report.achieved,
        alpha_history: report.rounds.iter().map(|r| r.alpha).collect(),
        rounds: report.rounds.iter().map(Into::into).collect(),
        residual_max: res.max(),
        residuals: res.values,
    })
}

pub fn run_fit_inf(cfg: &RunConfig, p: &PointSet) -> Result<FitInfResult, CliError> {
    let n = required_n(cfg)?;
    let fit = infinity_fit(p, n, cfg.xi, cfg.epsilon, &reduction_options(cfg))?;
    let res = residuals(p, &fit.subspace)?;
    Ok(FitInfResult {
        ambient_dim: p.ambient_dim(),
        input_points: p.len(),
        n,
        basis: fit.subspace.basis().into(),
        offset: fit.subspace.offset().to_vec(),
        certificate: fit.certificate,
        bound_factor: fit.bound_factor,
        reduced_dim: fit.reduced_dim,
        reduction_rounds: fit.reduction.as_ref().map_or(0, |r| r.rounds.len()),
        mvee: fit.mvee_stats.as_ref().map(|s| MveeJson {
            iterations: s.iterations,
            away_steps: s.away_steps,
            drop_steps: s.drop_steps,
            achieved_ratio: s.achieved_ratio,
        }),
        residuals: res.values,
    })
}

pub fn run_widths(cfg: &RunConfig, p: &PointSet) -> Result<WidthsResult, CliError> {
    let n = required_n(cfg)?;
    if p.ambient_dim() > 3 {
        return Err(CliError::Input(format!(
            "widths mode supports at most 3 coordinates, input has {}",
            p.ambient_dim()
        )));
    }
    let exponent = cfg.p.ok_or_else(|| CliError::Config("--p is required".into()))?;
    let sym = symmetrize(p);
    let fit = brute_force_fit(&sym, n, exponent, cfg.resolution)?;
    Ok(WidthsResult {
        ambient_dim: p.ambient_dim(),
        input_points: p.len(),
        symmetric_points: sym.len(),
        n,
        p: p_label(exponent),
        width: fit.width,
        basis: (&fit.subspace).into(),
        exact_p2_width: exact_p2_width(&sym, n)?,
    })
}

/// Full command-line behaviour; returns the process exit status.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return if code == 0 { exit::OK } else { exit::CONFIG };
        }
    };
    match execute(cli, stdout) {
        Ok(true) => exit::OK,
        Ok(false) => {
            let _ = writeln!(stderr, "self-test failed");
            exit::SELFTEST
        }
        Err(e) => {
            let _ = writeln!(stderr, "sspn: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<bool, CliError> {
    let cfg = cli.into_config()?;
    let outcome = run(&cfg)?;
    let text = render(&outcome.report, cfg.format)?;
    match &cfg.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(e.to_string()))?,
    }
    Ok(outcome.success)
}
