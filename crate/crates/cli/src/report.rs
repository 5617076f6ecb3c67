//! Report schema. Bases are stored row-major with explicit dimensions;
//! non-finite numbers (an unbounded α) serialize as `null`.

use serde::Serialize;
use sspn_core::greedy::{RoundLog, StopReason};
use sspn_core::{DenseMatrix, PNorm, Subspace};

use crate::config::{BenchCell, LowRank, Mode, OutputFormat, RunConfig};
use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&DenseMatrix> for MatrixJson {
    fn from(m: &DenseMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.to_row_major(),
        }
    }
}

impl From<&Subspace> for MatrixJson {
    fn from(s: &Subspace) -> Self {
        if s.dim() == 0 {
            return Self {
                rows: s.ambient_dim(),
                cols: 0,
                data: Vec::new(),
            };
        }
        (&s.basis_matrix()).into()
    }
}

pub fn p_label(p: PNorm) -> String {
    match p {
        PNorm::Infinity => "inf".into(),
        PNorm::Finite(v) => v.to_string(),
    }
}

/// The effective parameters that apply to the mode, echoed so a report
/// is self-describing.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lowrank: Option<LowRank>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deflate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<BenchCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(c: &RunConfig) -> Self {
        let reducing = matches!(c.mode, Mode::Reduce | Mode::FitInf);
        let p = match c.mode {
            Mode::FitInf => Some(PNorm::Infinity),
            Mode::Reduce | Mode::Widths => c.p,
            Mode::Bench | Mode::Selftest => None,
        };
        Self {
            input: c.input.as_ref().map(|p| p.display().to_string()),
            n: c.n,
            p: p.map(p_label),
            xi: reducing.then_some(c.xi),
            epsilon: matches!(c.mode, Mode::FitInf | Mode::Bench).then_some(c.epsilon),
            lowrank: reducing.then_some(c.lowrank),
            seed: c.seed,
            deflate: reducing.then_some(c.deflate),
            alpha_stop: c.alpha_stop,
            grid: (c.mode == Mode::Bench).then(|| c.grid.clone()),
            reps: (c.mode == Mode::Bench).then_some(c.reps),
            resolution: (c.mode == Mode::Widths).then_some(c.resolution),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundJson {
    pub round: usize,
    pub subspace_dim: usize,
    pub points_in: usize,
    pub subset_size: usize,
    pub worst_kept_residual: f64,
    pub round_distance: f64,
    pub subset_distance: f64,
    pub alpha: f64,
    pub remaining: usize,
    pub deflated: bool,
    pub basis: MatrixJson,
}

impl From<&RoundLog> for RoundJson {
    fn from(r: &RoundLog) -> Self {
        Self {
            round: r.round,
            subspace_dim: r.subspace.dim(),
            points_in: r.points_in,
            subset_size: r.subset_size,
            worst_kept_residual: r.worst_kept_residual,
            round_distance: r.round_distance,
            subset_distance: r.subset_distance,
            alpha: r.alpha,
            remaining: r.remaining,
            deflated: r.deflated,
            basis: (&r.subspace).into(),
        }
    }
}

pub fn stop_label(s: StopReason) -> String {
    match s {
        StopReason::Exhausted => "exhausted".into(),
        StopReason::RoundCap => "round-cap".into(),
        StopReason::EarlyStop { .. } => "alpha".into(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReduceResult {
    pub ambient_dim: usize,
    pub input_points: usize,
    /// Size of the symmetrized set the reduction ran on.
    pub symmetric_points: usize,
    pub nonzero_points: usize,
    /// Mean of the input; the symmetrized set is centred on it.
    pub center: Vec<f64>,
    pub dimension: usize,
    pub dimension_bound: usize,
    pub stop: String,
    pub basis: MatrixJson,
    /// `d^(p)` of the symmetrized set to the reduced subspace.
    pub achieved: f64,
    pub alpha_history: Vec<f64>,
    pub rounds: Vec<RoundJson>,
    /// Distance of each input point to `center + span(basis)`.
    pub residuals: Vec<f64>,
    pub residual_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MveeJson {
    pub iterations: usize,
    pub away_steps: usize,
    pub drop_steps: usize,
    pub achieved_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitInfResult {
    pub ambient_dim: usize,
    pub input_points: usize,
    pub n: usize,
    pub basis: MatrixJson,
    pub offset: Vec<f64>,
    pub certificate: f64,
    pub bound_factor: f64,
    pub reduced_dim: usize,
    pub reduction_rounds: usize,
    pub mvee: Option<MveeJson>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WidthsResult {
    pub ambient_dim: usize,
    pub input_points: usize,
    pub symmetric_points: usize,
    pub n: usize,
    pub p: String,
    /// Brute-force optimum over linear subspaces for the symmetrized set.
    pub width: f64,
    pub basis: MatrixJson,
    pub exact_p2_width: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub cell: BenchCell,
    pub seed: u64,
    pub noise_level: f64,
    pub reduced_dim: usize,
    pub dimension_bound: usize,
    pub rounds: usize,
    pub reduce_distance_inf: f64,
    pub certificate: f64,
    pub certificate_over_noise: f64,
    pub bound_factor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchTiming {
    pub cell: usize,
    pub lowrank_ms_median: f64,
    pub reduce_ms_median: f64,
    pub fit_ms_median: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchResult {
    pub reps: usize,
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestResult {
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ModeResult {
    Reduce(ReduceResult),
    FitInf(FitInfResult),
    Widths(WidthsResult),
    Bench(BenchResult),
    Selftest(SelftestResult),
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub mode: Mode,
    /// Seconds since the Unix epoch; the only field besides `timing` that
    /// differs between identical runs.
    pub generated_at: u64,
    pub config: ConfigEcho,
    pub result: ModeResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Vec<BenchTiming>>,
}

pub fn render(report: &Report, format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Output(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => render_csv(report),
    }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        String::new()
    }
}

fn render_csv(report: &Report) -> Result<String, CliError> {
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match &report.result {
        ModeResult::Reduce(r) => (
            vec![
                "round",
                "subspace_dim",
                "points_in",
                "subset_size",
                "worst_kept_residual",
                "round_distance",
                "subset_distance",
                "alpha",
                "remaining",
            ],
            r.rounds
                .iter()
                .map(|l| {
                    vec![
                        l.round.to_string(),
                        l.subspace_dim.to_string(),
                        l.points_in.to_string(),
                        l.subset_size.to_string(),
                        num(l.worst_kept_residual),
                        num(l.round_distance),
                        num(l.subset_distance),
                        num(l.alpha),
                        l.remaining.to_string(),
                    ]
                })
                .collect(),
        ),
        ModeResult::FitInf(f) => (
            vec!["field", "value"],
            vec![
                vec!["n".into(), f.n.to_string()],
                vec!["certificate".into(), num(f.certificate)],
                vec!["bound_factor".into(), num(f.bound_factor)],
                vec!["reduced_dim".into(), f.reduced_dim.to_string()],
                vec!["reduction_rounds".into(), f.reduction_rounds.to_string()],
                vec![
                    "mvee_iterations".into(),
                    f.mvee.as_ref().map_or(String::new(), |m| m.iterations.to_string()),
                ],
            ],
        ),
        ModeResult::Widths(w) => (
            vec!["n", "p", "width", "exact_p2_width"],
            vec![vec![w.n.to_string(), w.p.clone(), num(w.width), num(w.exact_p2_width)]],
        ),
        ModeResult::Bench(b) => (
            vec![
                "N",
                "M",
                "n",
                "xi",
                "lowrank",
                "reduced_dim",
                "dimension_bound",
                "rounds",
                "certificate",
                "certificate_over_noise",
                "bound_factor",
                "lowrank_ms_median",
                "reduce_ms_median",
                "fit_ms_median",
            ],
            b.rows
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let t = report.timing.as_ref().and_then(|t| t.iter().find(|t| t.cell == k));
                    let ms = |f: fn(&BenchTiming) -> f64| t.map_or(String::new(), |t| num(f(t)));
                    vec![
                        r.cell.ambient.to_string(),
                        r.cell.points.to_string(),
                        r.cell.n.to_string(),
                        num(r.cell.xi),
                        format!("{:?}", r.cell.lowrank).to_lowercase(),
                        r.reduced_dim.to_string(),
                        r.dimension_bound.to_string(),
                        r.rounds.to_string(),
                        num(r.certificate),
                        num(r.certificate_over_noise),
                        num(r.bound_factor),
                        ms(|t| t.lowrank_ms_median),
                        ms(|t| t.reduce_ms_median),
                        ms(|t| t.fit_ms_median),
                    ]
                })
                .collect(),
        ),
        ModeResult::Selftest(s) => (
            vec!["check", "passed", "detail"],
            s.checks
                .iter()
                .map(|c| vec![c.name.clone(), c.passed.to_string(), c.detail.clone()])
                .collect(),
        ),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(&header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}
