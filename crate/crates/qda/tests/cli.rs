use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use qda::io::{read_matrix, write_matrix};
use qda_core::{ComplexMatrix, C64};

fn qda(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qda")).args(args).current_dir(cwd).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path).unwrap();
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn diagonal_pencil_gives_zero_x() {
    let dir = tempfile::tempdir().unwrap();
    let d = [-1.0, -2.0, -3.0, 1.0, 2.0];
    let a = ComplexMatrix::from_diag(&d.map(|v| C64::new(v, 0.0)));
    write_matrix(&dir.path().join("A.json"), &a).unwrap();
    let o = qda(&["solve", "--a", "A.json", "--m", "3", "--out", "out"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let x = read_matrix(&dir.path().join("out/X.json")).unwrap();
    assert_eq!((x.rows(), x.cols()), (2, 3));
    assert!(x.max_abs() == 0.0, "X = {x:?}");
    let rows = csv_rows(&dir.path().join("out/history.csv"));
    assert_eq!(rows[0], ["i", "absUpdateX", "relUpdateX"]);
    let m = json(&dir.path().join("out/manifest.json"));
    for k in ["command", "parameters", "seed", "toolVersion", "timestamps"] {
        assert!(m.get(k).is_some(), "manifest lacks {k}");
    }
    assert_eq!(m["command"], "solve");
}

#[test]
fn tiny_eta_separates_qda_from_sdasf1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = qda(&["gen", "split", "--m", "20", "--n", "25", "--eta", "1e-7", "--seed", "1", "--out", "g"], p);
    assert_eq!(code(&o), 0);

    let o = qda(&["solve", "--a", "g/A.json", "--m", "20", "--algorithm", "sdasf1", "--out", "s1"], p);
    let s: Value = serde_json::from_slice(&o.stdout).unwrap();
    let x_norm = s["xNormFro"].as_f64().unwrap_or(f64::INFINITY);
    assert!(code(&o) == 3 || x_norm >= 1e4, "sdasf1 exit {} with ||X||_F {x_norm:e}", code(&o));
    assert_eq!(s["exitCode"].as_i64().unwrap(), code(&o) as i64);

    let o = qda(&["solve", "--a", "g/A.json", "--m", "20", "--out", "q"], p);
    assert_eq!(code(&o), 0);
    let s = json(&p.join("q/summary.json"));
    assert!(s["nres2"].as_f64().unwrap() <= 1e-8);
    assert_eq!(s["status"], "Converged");

    // the residual subcommand reproduces the summary from the written files
    let o = qda(&["residual", "--a", "g/A.json", "--x", "q/X.json", "--q1", "q/Q1.json"], p);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["nres2"], s["nres2"]);
    assert_eq!(r["nres1"], s["nres1"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&qda(&["gen", "split", "--m", "4", "--n", "5", "--out", "g"], p)), 0);
    assert_eq!(code(&qda(&["solve", "--a", "g/A.json", "--m", "4", "--max-iter", "1", "--out", "o"], p)), 2);
    assert_eq!(code(&qda(&["solve", "--a", "missing.json", "--m", "4", "--out", "o"], p)), 1);
    assert_eq!(code(&qda(&["solve", "--a", "g/A.json", "--m", "12", "--out", "o"], p)), 1);
    assert_eq!(code(&qda(&["solve", "--a", "g/A.json", "--m", "4", "--gamma", "1", "--out", "o"], p)), 1);
    assert_eq!(code(&qda(&["solve", "--a", "g/A.json", "--m", "4", "--algorithm", "sdasf2", "--out", "o"], p)), 1);
    assert_eq!(code(&qda(&["solve", "--frobnicate"], p)), 1);
    assert_eq!(code(&qda(&["gen", "split", "--m", "2", "--n", "2", "--alpha", "1", "--out", "bad"], p)), 1);
    fs::write(p.join("bad.json"), r#"{"rows": 2, "cols": 2, "re": [1], "im": [0]}"#).unwrap();
    assert_eq!(code(&qda(&["solve", "--a", "bad.json", "--m", "1", "--out", "o"], p)), 1);

    // singular pencil: breaks down in the initial reduction
    write_matrix(&p.join("Z.json"), &ComplexMatrix::zeros(2, 2)).unwrap();
    let o = qda(&["solve", "--a", "Z.json", "--b", "Z.json", "--m", "1", "--disk", "--out", "z"], p);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&p.join("z/summary.json"))["status"], "Breakdown");
}

fn same_files(a: &Path, b: &Path) {
    for f in ["A.json", "B.json", "Z.json", "M.json", "instance.json"] {
        let (x, y) = (a.join(f), b.join(f));
        if x.exists() || y.exists() {
            assert_eq!(fs::read(&x).unwrap(), fs::read(&y).unwrap(), "{f} differs");
        }
    }
}

#[test]
fn every_family_replays_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let runs: [&[&str]; 3] = [
        &["gen", "split", "--m", "5", "--n", "6", "--eta", "1e-3", "--seed", "9", "--out", "split"],
        &["gen", "bse", "--n", "8", "--seed", "9", "--out", "bse"],
        &["gen", "critical", "--m-prime", "2", "--n-prime", "1", "--block", "2:1:0", "--block", "1:0:1", "--seed", "9", "--out", "critical"],
    ];
    for args in runs {
        assert_eq!(code(&qda(args, p)), 0, "{args:?}");
        let name = args[1];
        let m = json(&p.join(name).join("manifest.json"));
        assert_eq!(m["seed"], 9);
        assert_eq!(m["parameters"]["family"], name);
        let again = format!("{name}-again");
        let manifest = format!("{name}/manifest.json");
        assert_eq!(code(&qda(&["gen", "replay", "--manifest", &manifest, "--out", &again], p)), 0);
        same_files(&p.join(name), &p.join(&again));
    }
    let info = json(&p.join("critical/instance.json"));
    assert_eq!((info["m"].as_u64(), info["n"].as_u64()), (Some(5), Some(4)));
    assert_eq!(info["circleEigs"].as_array().unwrap().len(), 6);
    assert_eq!(info["hasGroundTruth"], true);
    assert_eq!(json(&p.join("bse/instance.json"))["hasGroundTruth"], false);
}

fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rows = csv_rows(path);
    let header = rows.remove(0);
    (header, rows)
}

#[test]
fn eta_sweep_table() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = qda(&["experiment", "eta_sweep", "--out", "eta"], p);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = table(&p.join("eta/table.csv"));
    assert_eq!(header, ["seed", "algorithm", "metric", "eta=1e-4", "eta=1e-5", "eta=1e-6", "eta=1e-7"]);
    let labels = ["‖X‖_F", "CPU", "NRes₁", "NRes₂", "#it'n"];
    for chunk in rows.chunks(5) {
        let got: Vec<&str> = chunk.iter().map(|r| r[2].as_str()).collect();
        assert_eq!(got, labels);
    }
    for r in &rows {
        match r[1].as_str() {
            "QDA" => assert!(r[3..].iter().all(|c| c != "--" && !c.is_empty()), "{r:?}"),
            "SDASF1" => assert!(r[5..].iter().all(|c| c == "--"), "{r:?}"),
            other => panic!("unexpected algorithm {other}"),
        }
    }
    let hist = p.join("eta/history/qda_eta1e-7_seed2.csv");
    assert_eq!(csv_rows(&hist)[0], ["i", "absUpdateX", "relUpdateX"]);
    assert!(p.join("eta/results.json").exists() && p.join("eta/manifest.json").exists());
}

#[test]
fn critical_rate_history_has_half_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&qda(&["experiment", "critical_rate", "--out", "cr"], p)), 0);
    for seed in 1..=3 {
        let rows = csv_rows(&p.join(format!("cr/history/qda_m12_seed{seed}.csv")));
        assert_eq!(rows[0], ["i", "absUpdateX", "relUpdateX", "errorX", "errorRatio", "asymptotic"]);
        let tail: Vec<f64> = rows[1..].iter().filter(|r| r[5] == "true").map(|r| r[4].parse().unwrap()).collect();
        assert!(tail.len() >= 3, "seed {seed}: {tail:?}");
        assert!(tail.iter().all(|r| (0.35..=0.65).contains(r)), "seed {seed}: {tail:?}");
    }
}

#[test]
fn bse_like_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&qda(&["experiment", "bse_like", "--out", "bse"], p)), 0);
    let (header, rows) = table(&p.join("bse/table.csv"));
    assert_eq!(header[3], "n=64");
    let its: Vec<usize> = rows.iter().filter(|r| r[1] == "QDA" && r[2] == "#it'n").map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(its.len(), 3);
    assert!(its.iter().all(|&k| k <= 10), "{its:?}");
}
