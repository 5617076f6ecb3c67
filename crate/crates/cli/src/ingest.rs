//! Point-cloud readers and writers.
//!
//! CSV: one point per row, one coordinate per column, optional header
//! (recognised by a non-numeric first row).
//!
//! Binary: `b"SSPN"`, a version byte (1), little-endian `u64` N and `u64`
//! M, then `N·M` little-endian `f64` in column-major order (point by point).

use std::fs;
use std::io::Write;
use std::path::Path;

use sspn_core::{DenseMatrix, PointSet};

use crate::CliError;

pub const MAGIC: &[u8; 4] = b"SSPN";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 8 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// Binary if the file starts with the magic bytes, CSV otherwise.
    Auto,
    Csv,
    Binary,
}

pub fn ingest(path: &Path, format: InputFormat) -> Result<PointSet, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let binary = match format {
        InputFormat::Auto => bytes.starts_with(MAGIC),
        InputFormat::Csv => false,
        InputFormat::Binary => true,
    };
    let ctx = |msg: String| CliError::Input(format!("{}: {msg}", path.display()));
    if binary {
        parse_binary(&bytes).map_err(ctx)
    } else {
        parse_csv(&bytes).map_err(ctx)
    }
}

pub fn parse_csv(bytes: &[u8]) -> Result<PointSet, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("malformed CSV: {e}"))?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, usize> = record
            .iter()
            .enumerate()
            .map(|(c, field)| field.parse::<f64>().map_err(|_| c))
            .collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if rows.is_empty() && width.is_none() => {
                width = Some(record.len());
                continue;
            }
            Err(c) => {
                return Err(format!(
                    "line {line}, column {}: {:?} is not a number",
                    c + 1,
                    &record[c]
                ))
            }
        };
        if let Some(c) = values.iter().position(|v| !v.is_finite()) {
            return Err(format!(
                "line {line}: row {} has a non-finite value in column {}",
                rows.len() + 1,
                c + 1
            ));
        }
        match width {
            Some(w) if w != values.len() => {
                return Err(format!("line {line}: expected {w} columns, found {}", values.len()));
            }
            _ => width = Some(values.len()),
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err("no data rows".into());
    }
    let matrix = DenseMatrix::from_columns(&rows).map_err(|e| e.to_string())?;
    Ok(PointSet::new(matrix))
}

pub fn parse_binary(bytes: &[u8]) -> Result<PointSet, String> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err("not an SSPN binary file".into());
    }
    if bytes[4] != VERSION {
        return Err(format!("unsupported SSPN version {}", bytes[4]));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
    let (n, m) = (word(5), word(13));
    let count = n
        .checked_mul(m)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| usize::try_from(c).ok())
        .ok_or("dimensions overflow")?;
    if bytes.len() - HEADER_LEN != count {
        return Err(format!(
            "payload is {} bytes, expected {count} for N={n}, M={m}",
            bytes.len() - HEADER_LEN
        ));
    }
    if n == 0 || m == 0 {
        return Err(format!("empty point set (N={n}, M={m})"));
    }
    let (n, m) = (n as usize, m as usize);
    let data: Vec<f64> = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if let Some(k) = data.iter().position(|v| !v.is_finite()) {
        return Err(format!(
            "row {} has a non-finite value in column {}",
            k / n + 1,
            k % n + 1
        ));
    }
    let matrix = DenseMatrix::from_col_major(n, m, data).map_err(|e| e.to_string())?;
    Ok(PointSet::new(matrix))
}

pub fn encode_binary(p: &PointSet) -> Vec<u8> {
    let data = p.matrix().as_col_major();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * data.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(p.ambient_dim() as u64).to_le_bytes());
    out.extend_from_slice(&(p.len() as u64).to_le_bytes());
    for v in data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_binary(path: &Path, p: &PointSet) -> Result<(), CliError> {
    fs::write(path, encode_binary(p)).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Rows are points; values use Rust's shortest round-trip formatting.
pub fn write_csv(path: &Path, p: &PointSet) -> Result<(), CliError> {
    let err = |e: std::io::Error| CliError::Output(format!("{}: {e}", path.display()));
    let mut f = fs::File::create(path).map_err(err)?;
    for x in p.points() {
        let line: Vec<String> = x.iter().map(f64::to_string).collect();
        writeln!(f, "{}", line.join(",")).map_err(err)?;
    }
    Ok(())
}
