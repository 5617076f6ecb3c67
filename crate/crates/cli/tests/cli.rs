use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use sspn_cli::ingest::{ingest, write_binary, write_csv, InputFormat};
use sspn_core::greedy::select_well_fit_subset;
use sspn_core::oracle::make_planted;
use sspn_core::pointset::symmetrize;
use sspn_core::{DenseMatrix, PNorm, PointSet, Subspace};
use tempfile::TempDir;

fn sspn(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sspn"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("valid JSON report")
}

fn matrix(v: &Value) -> DenseMatrix {
    let rows = v["rows"].as_u64().unwrap() as usize;
    let cols = v["cols"].as_u64().unwrap() as usize;
    let data: Vec<f64> = v["data"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    DenseMatrix::from_row_major(rows, cols, &data).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn planted_csv(dir: &Path, name: &str, ambient: usize, m: usize, n: usize, noise: f64, seed: u64) -> String {
    let inst = make_planted(ambient, m, n, noise, seed).unwrap();
    let path = dir.join(name);
    write_csv(&path, &inst.points).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn reduce_on_exact_low_rank_input() {
    let dir = TempDir::new().unwrap();
    // rank-2 data that does not pass through the origin
    let mut text = String::from("a,b,c,d\n");
    for k in 0..12 {
        let (s, t) = (k as f64 * 0.37 - 1.0, (k * k) as f64 * 0.05);
        text.push_str(&format!("{},{},{},{}\n", 1.0 + s, 2.0 + t, 3.0 + s + t, 4.0 - s));
    }
    let path = dir.path().join("rank2.csv");
    fs::write(&path, text).unwrap();
    let (code, out, err) = sspn(&[
        "--mode",
        "reduce",
        "--input",
        path.to_str().unwrap(),
        "--n",
        "2",
        "--p",
        "inf",
    ]);
    assert_eq!(code, 0, "{err}");
    let r = json(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["result"]["rounds"].as_array().unwrap().len(), 1);
    assert!(r["result"]["residual_max"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn reduce_report_is_self_consistent() {
    let dir = TempDir::new().unwrap();
    let input = planted_csv(dir.path(), "p.csv", 8, 40, 2, 0.3, 11);
    let (code, out, err) = sspn(&[
        "--mode", "reduce", "--input", &input, "--n", "2", "--p", "4", "--xi", "2",
    ]);
    assert_eq!(code, 0, "{err}");
    let r = json(&out);
    let res = &r["result"];
    let p = ingest(Path::new(&input), InputFormat::Auto).unwrap();
    let basis = Subspace::from_orthonormal(&matrix(&res["basis"])).unwrap();
    assert_eq!(basis.dim() as u64, res["dimension"].as_u64().unwrap());
    assert!(basis.dim() <= res["dimension_bound"].as_u64().unwrap() as usize);

    let center = floats(&res["center"]);
    let reported = floats(&res["residuals"]);
    for (x, r) in p.points().zip(&reported) {
        let shifted: Vec<f64> = x.iter().zip(&center).map(|(a, b)| a - b).collect();
        assert!((basis.residual_norm(&shifted) - r).abs() <= 1e-10);
    }
    let sym = symmetrize(&p);
    let achieved = PNorm::Finite(4.0).norm(&sym.residuals_to(&basis));
    assert!((achieved - res["achieved"].as_f64().unwrap()).abs() <= 1e-10 * achieved.max(1.0));

    // first-round alpha from the serialized round basis
    let round = &res["rounds"][0];
    let s1 = Subspace::from_orthonormal(&matrix(&round["basis"])).unwrap();
    let kept = select_well_fit_subset(&sym, &s1, 2.0).unwrap();
    let alpha = sspn_core::greedy::alpha_estimate(&sym, &kept, &s1, PNorm::Finite(4.0));
    assert!((alpha - round["alpha"].as_f64().unwrap()).abs() <= 1e-10 * alpha);
    assert_eq!(round["subset_size"].as_u64().unwrap() as usize, kept.len());
}

#[test]
fn fit_inf_planted_certificate() {
    let dir = TempDir::new().unwrap();
    let noise = 0.05;
    let input = planted_csv(dir.path(), "planted.csv", 40, 250, 3, noise, 3);
    let (code, out, err) = sspn(&["--mode", "fit-inf", "--input", &input, "--n", "3"]);
    assert_eq!(code, 0, "{err}");
    let r = json(&out);
    let cert = r["result"]["certificate"].as_f64().unwrap();
    assert!(cert / noise <= 10.0 * (3.0 * 500f64.ln()).sqrt());
    let p = ingest(Path::new(&input), InputFormat::Auto).unwrap();
    let basis = Subspace::from_orthonormal(&matrix(&r["result"]["basis"])).unwrap();
    let offset = floats(&r["result"]["offset"]);
    let worst = p
        .points()
        .map(|x| {
            let shifted: Vec<f64> = x.iter().zip(&offset).map(|(a, b)| a - b).collect();
            basis.residual_norm(&shifted)
        })
        .fold(0.0, f64::max);
    assert!((worst - cert).abs() <= 1e-10);
}

#[test]
fn widths_mode_on_cross() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("cross.csv");
    fs::write(&path, "1,0\n-1,0\n0,1\n0,-1\n").unwrap();
    let (code, out, err) = sspn(&[
        "--mode",
        "widths",
        "--input",
        path.to_str().unwrap(),
        "--n",
        "1",
        "--p",
        "inf",
    ]);
    assert_eq!(code, 0, "{err}");
    let w = json(&out)["result"]["width"].as_f64().unwrap();
    assert!((w - 0.5f64.sqrt()).abs() < 1e-9);
}

#[test]
fn csv_output_format() {
    let dir = TempDir::new().unwrap();
    let input = planted_csv(dir.path(), "p.csv", 5, 20, 1, 0.2, 1);
    let out_path = dir.path().join("rounds.csv");
    let (code, _, err) = sspn(&[
        "--mode",
        "reduce",
        "--input",
        &input,
        "--n",
        "1",
        "--p",
        "inf",
        "--format",
        "csv",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(out_path).unwrap();
    assert!(text.starts_with("round,subspace_dim"));
    assert!(text.lines().count() >= 2);
}

#[test]
fn binary_input_matches_csv_input() {
    let dir = TempDir::new().unwrap();
    let inst = make_planted(6, 30, 2, 0.1, 9).unwrap();
    let csv_path = dir.path().join("p.csv");
    let bin_path = dir.path().join("p.sspn");
    write_csv(&csv_path, &inst.points).unwrap();
    write_binary(&bin_path, &inst.points).unwrap();
    let a = ingest(&csv_path, InputFormat::Auto).unwrap();
    let b = ingest(&bin_path, InputFormat::Auto).unwrap();
    assert_eq!(a.matrix(), b.matrix());
    assert_eq!(b.matrix(), inst.points.matrix());
}

#[test]
fn exit_codes_by_category() {
    let dir = TempDir::new().unwrap();
    let good = planted_csv(dir.path(), "p.csv", 4, 10, 1, 0.1, 0);
    let ragged = dir.path().join("ragged.csv");
    fs::write(&ragged, "1,2\n3\n").unwrap();

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["--mode", "reduce", "--input", &good, "--n", "1", "--p", "2"], 2),
        (vec!["--mode", "reduce", "--input", &good, "--n", "1"], 2),
        (
            vec![
                "--mode", "reduce", "--input", &good, "--n", "1", "--p", "inf", "--xi", "0.5",
            ],
            2,
        ),
        (vec!["--mode", "selftest", "--deflate"], 2),
        (vec!["--mode", "nonsense"], 2),
        (vec!["--mode", "reduce", "--input", &good, "--n", "9", "--p", "inf"], 2),
        (
            vec![
                "--mode",
                "reduce",
                "--input",
                "/nonexistent/x.csv",
                "--n",
                "1",
                "--p",
                "inf",
            ],
            3,
        ),
        (
            vec![
                "--mode",
                "reduce",
                "--input",
                ragged.to_str().unwrap(),
                "--n",
                "1",
                "--p",
                "inf",
            ],
            3,
        ),
        (vec!["--mode", "widths", "--input", &good, "--n", "1", "--p", "inf"], 3),
        // xi above M/2 is only detectable once the point count is known
        (
            vec![
                "--mode", "reduce", "--input", &good, "--n", "1", "--p", "4", "--xi", "50",
            ],
            4,
        ),
    ];
    for (args, expected) in cases {
        let (code, _, err) = sspn(&args);
        assert_eq!(code, expected, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
    let (code, out, _) = sspn(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("--alpha-stop"));
}

#[test]
fn thread_cap_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_sspn"))
        .args(["--mode", "bench", "--grid", "6,20,1,2,svd", "--reps", "1"])
        .env("SSPN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_sspn"))
        .args([
            "--mode",
            "bench",
            "--grid",
            "6,20,1,2,svd;8,30,2,2,randomized",
            "--reps",
            "1",
        ])
        .env("SSPN_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = json(&String::from_utf8_lossy(&out.stdout));
    assert_eq!(r["result"]["rows"].as_array().unwrap().len(), 2);
    assert_eq!(r["timing"].as_array().unwrap().len(), 2);
}

#[test]
fn selftest_passes() {
    let (code, out, err) = sspn(&["--mode", "selftest"]);
    assert_eq!(code, 0, "{err}\n{out}");
    assert_eq!(json(&out)["result"]["passed"], true);
}

#[test]
fn ingest_header_and_rows() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("h.csv");
    fs::write(&path, "x,y\n1,0\n0,1\n0,0\n").unwrap();
    let p: PointSet = ingest(&path, InputFormat::Csv).unwrap();
    assert_eq!((p.len(), p.ambient_dim()), (3, 2));
}
