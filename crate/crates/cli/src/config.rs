use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use sspn_core::greedy::LowRankMode;
use sspn_core::mvee::DEFAULT_EPSILON;
use sspn_core::oracle::DEFAULT_RESOLUTION;
use sspn_core::PNorm;

use crate::CliError;

pub const DEFAULT_XI: f64 = 2.0;
pub const DEFAULT_REPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Greedy reduction to an O(n log M)-dimensional subspace.
    Reduce,
    /// n-dimensional l-infinity fit via reduction plus John ellipsoid.
    FitInf,
    /// Brute-force widths for inputs with at most 3 coordinates.
    Widths,
    /// Timing and accuracy table over planted instances.
    Bench,
    /// Quick built-in correctness checks.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowRank {
    Svd,
    Randomized,
}

impl From<LowRank> for LowRankMode {
    fn from(l: LowRank) -> Self {
        match l {
            LowRank::Svd => LowRankMode::DeterministicSvd,
            LowRank::Randomized => LowRankMode::Randomized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "sspn",
    version,
    about = "Greedy subspace reduction and l-infinity subspace fitting"
)]
pub struct Cli {
    /// Point cloud: CSV (rows are points) or SSPN binary.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Target subspace dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Norm exponent: a real number > 2 or "inf".
    #[arg(long)]
    pub p: Option<String>,
    /// Peel parameter (> 1). Default 2.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Ellipsoid accuracy (> 0). Default 0.1.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Per-round low-rank fit. Default svd.
    #[arg(long, value_enum)]
    pub lowrank: Option<LowRank>,
    /// Seed for randomized fits and bench instances. Default 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Deflate leftover points against the accumulated subspace.
    #[arg(long)]
    pub deflate: bool,
    /// Stop once alpha falls below this value (default 2 when given bare).
    #[arg(long, num_args = 0..=1, default_missing_value = "2")]
    pub alpha_stop: Option<f64>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Bench cells as "N,M,n,xi,svd|randomized", separated by ';'. M points
    /// are drawn, then joined by their negations and the origin.
    #[arg(long)]
    pub grid: Option<String>,
    /// Bench repetitions per cell.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Angular grid resolution for widths.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchCell {
    pub ambient: usize,
    pub points: usize,
    pub n: usize,
    pub xi: f64,
    pub lowrank: LowRank,
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub mode: Mode,
    pub n: Option<usize>,
    pub p: Option<PNorm>,
    pub xi: f64,
    pub epsilon: f64,
    pub lowrank: LowRank,
    pub seed: u64,
    pub deflate: bool,
    pub alpha_stop: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub grid: Vec<BenchCell>,
    pub reps: usize,
    pub resolution: usize,
}

pub fn parse_p(text: &str) -> Result<PNorm, CliError> {
    let t = text.trim();
    if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
        return Ok(PNorm::Infinity);
    }
    let v: f64 = t
        .parse()
        .map_err(|_| CliError::Config(format!("--p: expected a number > 2 or \"inf\", got {text:?}")))?;
    PNorm::new(v).map_err(|e| CliError::Config(format!("--p: {e}")))
}

pub fn default_grid() -> Vec<BenchCell> {
    let mut cells = Vec::new();
    for (ambient, points, n) in [(32, 200, 2), (64, 400, 3)] {
        for lowrank in [LowRank::Svd, LowRank::Randomized] {
            cells.push(BenchCell {
                ambient,
                points,
                n,
                xi: DEFAULT_XI,
                lowrank,
            });
        }
    }
    cells
}

pub fn parse_grid(text: &str) -> Result<Vec<BenchCell>, CliError> {
    let bad = |cell: &str, why: &str| CliError::Config(format!("--grid cell {cell:?}: {why}"));
    let mut cells = Vec::new();
    for cell in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
        let parts: Vec<&str> = cell.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(bad(cell, "expected N,M,n,xi,mode"));
        }
        let num = |s: &str, what: &str| {
            s.parse::<usize>()
                .map_err(|_| bad(cell, &format!("{what} is not a count")))
        };
        let ambient = num(parts[0], "N")?;
        let points = num(parts[1], "M")?;
        let n = num(parts[2], "n")?;
        let xi: f64 = parts[3].parse().map_err(|_| bad(cell, "xi is not a number"))?;
        let lowrank = LowRank::from_str(parts[4], true).map_err(|_| bad(cell, "mode must be svd or randomized"))?;
        if n == 0 || n >= ambient {
            return Err(bad(cell, "need 1 <= n < N"));
        }
        if points < 2 {
            return Err(bad(cell, "need M >= 2"));
        }
        if !(xi.is_finite() && xi > 1.0) {
            return Err(bad(cell, "xi must be > 1"));
        }
        cells.push(BenchCell {
            ambient,
            points,
            n,
            xi,
            lowrank,
        });
    }
    if cells.is_empty() {
        return Err(CliError::Config("--grid: no cells given".into()));
    }
    Ok(cells)
}

impl Cli {
    fn provided(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let flags: [(&'static str, bool); 12] = [
            ("--input", self.input.is_some()),
            ("--n", self.n.is_some()),
            ("--p", self.p.is_some()),
            ("--xi", self.xi.is_some()),
            ("--epsilon", self.epsilon.is_some()),
            ("--lowrank", self.lowrank.is_some()),
            ("--seed", self.seed.is_some()),
            ("--deflate", self.deflate),
            ("--alpha-stop", self.alpha_stop.is_some()),
            ("--grid", self.grid.is_some()),
            ("--reps", self.reps.is_some()),
            ("--resolution", self.resolution.is_some()),
        ];
        for (name, given) in flags {
            if given {
                out.push(name);
            }
        }
        out
    }

    /// Checks flag consistency for the chosen mode; nothing is read or
    /// computed here.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let (required, allowed): (&[&str], &[&str]) = match self.mode {
            Mode::Reduce => (
                &["--input", "--n", "--p"],
                &["--xi", "--lowrank", "--seed", "--deflate", "--alpha-stop"],
            ),
            Mode::FitInf => (
                &["--input", "--n"],
                &[
                    "--p",
                    "--xi",
                    "--epsilon",
                    "--lowrank",
                    "--seed",
                    "--deflate",
                    "--alpha-stop",
                ],
            ),
            Mode::Widths => (&["--input", "--n", "--p"], &["--resolution"]),
            Mode::Bench => (&[], &["--grid", "--reps", "--seed", "--epsilon"]),
            Mode::Selftest => (&[], &["--seed"]),
        };
        let given = self.provided();
        let mode_name = self
            .mode
            .to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default();
        for r in required {
            if !given.contains(r) {
                return Err(CliError::Config(format!("mode {mode_name} requires {r}")));
            }
        }
        for g in &given {
            if !required.contains(g) && !allowed.contains(g) {
                return Err(CliError::Config(format!("{g} has no effect in mode {mode_name}")));
            }
        }

        let p = self.p.as_deref().map(parse_p).transpose()?;
        if self.mode == Mode::FitInf && p.is_some_and(|p| !p.is_infinite()) {
            return Err(CliError::Config("mode fit-inf only supports --p inf".into()));
        }
        let xi = self.xi.unwrap_or(DEFAULT_XI);
        if !(xi.is_finite() && xi > 1.0) {
            return Err(CliError::Config(format!("--xi must be a finite number > 1, got {xi}")));
        }
        let epsilon = self.epsilon.unwrap_or(DEFAULT_EPSILON);
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(CliError::Config(format!(
                "--epsilon must be a finite number > 0, got {epsilon}"
            )));
        }
        if let Some(a) = self.alpha_stop {
            if !(a.is_finite() && a > 1.0) {
                return Err(CliError::Config(format!(
                    "--alpha-stop must be a finite number > 1, got {a}"
                )));
            }
        }
        if self.n == Some(0) {
            return Err(CliError::Config("--n must be at least 1".into()));
        }
        let reps = self.reps.unwrap_or(DEFAULT_REPS);
        if reps == 0 {
            return Err(CliError::Config("--reps must be at least 1".into()));
        }
        let resolution = self.resolution.unwrap_or(DEFAULT_RESOLUTION);
        if resolution < 4 {
            return Err(CliError::Config("--resolution must be at least 4".into()));
        }
        let grid = match &self.grid {
            Some(g) => parse_grid(g)?,
            None => default_grid(),
        };
        Ok(RunConfig {
            input: self.input,
            mode: self.mode,
            n: self.n,
            p,
            xi,
            epsilon,
            lowrank: self.lowrank.unwrap_or(LowRank::Svd),
            seed: self.seed.unwrap_or(0),
            deflate: self.deflate,
            alpha_stop: self.alpha_stop,
            output: self.output,
            format: self.format,
            grid,
            reps,
            resolution,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sspn_core::greedy::DEFAULT_ALPHA_STOP;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        let mut full = vec!["sspn"];
        full.extend_from_slice(args);
        Cli::try_parse_from(full)
            .map_err(|e| CliError::Config(e.to_string()))?
            .into_config()
    }

    #[test]
    fn reduce_requires_n_and_p() {
        assert!(parse(&["--mode", "reduce", "--input", "x.csv", "--n", "2"]).is_err());
        let c = parse(&["--mode", "reduce", "--input", "x.csv", "--n", "2", "--p", "inf"]).unwrap();
        assert_eq!(c.p, Some(PNorm::Infinity));
        assert_eq!(c.xi, 2.0);
    }

    #[test]
    fn rejects_bad_values() {
        for bad in [
            vec!["--p", "2"],
            vec!["--p", "1.5"],
            vec!["--p", "abc"],
            vec!["--p", "inf", "--xi", "1"],
            vec!["--p", "inf", "--alpha-stop", "0.5"],
        ] {
            let mut args = vec!["--mode", "reduce", "--input", "x.csv", "--n", "1"];
            args.extend(bad.iter());
            assert!(matches!(parse(&args), Err(CliError::Config(_))), "{bad:?}");
        }
        assert!(parse(&["--mode", "fit-inf", "--input", "x", "--n", "1", "--epsilon", "0"]).is_err());
        assert!(parse(&["--mode", "fit-inf", "--input", "x", "--n", "1", "--p", "4"]).is_err());
    }

    #[test]
    fn rejects_irrelevant_flags() {
        let e = parse(&[
            "--mode",
            "widths",
            "--input",
            "x",
            "--n",
            "1",
            "--p",
            "inf",
            "--deflate",
        ])
        .unwrap_err();
        assert!(e.to_string().contains("--deflate"));
        assert!(parse(&["--mode", "selftest", "--n", "2"]).is_err());
    }

    #[test]
    fn bare_alpha_stop_defaults_to_two() {
        let c = parse(&[
            "--mode",
            "reduce",
            "--input",
            "x",
            "--n",
            "1",
            "--p",
            "inf",
            "--alpha-stop",
        ])
        .unwrap();
        assert_eq!(c.alpha_stop, Some(DEFAULT_ALPHA_STOP));
        let c = parse(&[
            "--mode",
            "reduce",
            "--input",
            "x",
            "--n",
            "1",
            "--p",
            "inf",
            "--alpha-stop",
            "3.5",
        ])
        .unwrap();
        assert_eq!(c.alpha_stop, Some(3.5));
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("10,50,2,2,svd; 20,80,3,1.5,randomized").unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[1].lowrank, LowRank::Randomized);
        assert!(parse_grid("10,50,2,2").is_err());
        assert!(parse_grid("10,50,10,2,svd").is_err());
        assert!(parse_grid("").is_err());
    }
}
