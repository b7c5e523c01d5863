//! End-to-end runs of the `equilibria` binary: modes, file formats, exit
//! codes, and record determinism.

use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_equilibria"))
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("equilibria-test-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        TempDir(dir)
    }
    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn write_config(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let p = dir.path(name);
    std::fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p
}

fn read_records(path: &PathBuf) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn bounds_mode_reports_the_paper_numbers() {
    let dir = TempDir::new("bounds");
    let cfg = write_config(
        &dir,
        "bounds.json",
        &json!({
            "sites": [[0.0, 0.0], [1.0, 0.0], [0.5, 0.875]],
            "charges": [1.0, 1.0, 1.0],
            "alpha": 1.0
        }),
    );
    let out = dir.path("bounds.jsonl");
    let status = bin()
        .args(["bounds", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("139314069504"));
    let records = read_records(&out);
    assert_eq!(records[0]["outputs"]["three_charge_bound"], json!(12));
    assert_eq!(records[0]["status"], json!("ok"));
}

#[test]
fn sweep_mode_reproduces_the_five_charge_counts() {
    let dir = TempDir::new("sweep");
    let cfg = write_config(
        &dir,
        "sweep.json",
        &json!({
            "mode": "sweep",
            "sites": [[-30.0, 5.0], [-20.0, 7.0], [-2.0, 12.0], [20.0, 7.0], [30.0, 5.0]],
            "charges": [1.0, 1.0, 1.0, 1.0, 1.0],
            "alphas": [0.1, 0.2, 0.3, 1.64, 1.7],
            "subspace": {"base": [0.0, 0.0], "directions": [[1.0, 0.0]]}
        }),
    );
    let out = dir.path("sweep.jsonl");
    let status = bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let records = read_records(&out);
    let totals: Vec<u64> = records
        .iter()
        .map(|r| r["outputs"]["total"].as_u64().unwrap())
        .collect();
    assert_eq!(totals, vec![3, 7, 3, 7, 9]);
    // report renders a table with the non-monotonicity annotation
    let report = bin().args(["report", "--records"]).arg(&out).output().unwrap();
    assert_eq!(report.status.code(), Some(0));
    let table = String::from_utf8(report.stdout).unwrap();
    assert!(table.contains("NOT monotone"), "{table}");
}

#[test]
fn solve_mode_single_charge_finds_nothing() {
    let dir = TempDir::new("solve1");
    let cfg = write_config(
        &dir,
        "solve.json",
        &json!({
            "sites": [[0.25, -0.5]],
            "charges": [2.0],
            "alpha": 1.0
        }),
    );
    let out = dir.path("solve.jsonl");
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let records = read_records(&out);
    assert_eq!(records[0]["outputs"]["total"], json!(0));
}

#[test]
fn validation_failures_exit_2() {
    let dir = TempDir::new("invalid");
    // duplicate sites
    let cfg = write_config(
        &dir,
        "dup.json",
        &json!({"sites": [[0.0, 0.0], [0.0, 0.0]], "charges": [1.0, 1.0], "alpha": 1.0}),
    );
    let out = dir.path("out.jsonl");
    let r = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("sites"));
    // zero charge
    let cfg = write_config(
        &dir,
        "zero.json",
        &json!({"sites": [[0.0, 0.0], [1.0, 0.0]], "charges": [1.0, 0.0], "alpha": 1.0}),
    );
    let r = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(2));
    // mode mismatch
    let cfg = write_config(
        &dir,
        "mode.json",
        &json!({"mode": "sweep", "sites": [[0.0, 0.0]], "charges": [1.0], "alpha": 1.0}),
    );
    let r = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(2));
    // missing config file
    let r = bin()
        .args(["solve", "--config"])
        .arg(dir.path("nope.json"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn grid_mode_emits_csv() {
    let dir = TempDir::new("grid");
    let cfg = write_config(
        &dir,
        "grid.json",
        &json!({
            "sites": [[1.0, 0.0], [-0.5, 0.8660254037844386], [-0.5, -0.8660254037844386]],
            "charges": [1.0, 1.0, 1.0],
            "alpha": 1.0,
            "grid": {"window": [-2.0, 2.0, -2.0, 2.0], "resolution": [2, 2]}
        }),
    );
    let out = dir.path("grid.csv");
    let status = bin()
        .args(["grid", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,v");
    assert_eq!(lines.len(), 5);
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 3);
    }
}

#[test]
fn records_are_deterministic_modulo_timestamp() {
    let dir = TempDir::new("determinism");
    let cfg = write_config(
        &dir,
        "cfg.json",
        &json!({
            "sites": [[0.0, 0.0], [2.0, 0.0], [1.0, 0.5]],
            "charges": [1.0, 1.0, 1.0],
            "alpha": 1.0,
            "seed": 42
        }),
    );
    let strip_ts = |path: &PathBuf| -> Vec<Value> {
        read_records(path)
            .into_iter()
            .map(|mut v| {
                v.as_object_mut().unwrap().remove("timestamp");
                v
            })
            .collect()
    };
    let out1 = dir.path("a.jsonl");
    let out2 = dir.path("b.jsonl");
    for (out, jobs) in [(&out1, "0"), (&out2, "1")] {
        let status = bin()
            .args(["solve", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .args(["--jobs", jobs])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    // identical across parallel and sequential execution
    assert_eq!(strip_ts(&out1), strip_ts(&out2));
    // rerun reproduces byte-identically minus the timestamp
    let out3 = dir.path("c.jsonl");
    bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out3)
        .status()
        .unwrap();
    assert_eq!(strip_ts(&out1), strip_ts(&out3));
    // run ids derive from the inputs digest
    let recs = read_records(&out1);
    let digest = recs[0]["inputs_digest"].as_str().unwrap();
    assert!(recs[0]["run_id"].as_str().unwrap().starts_with(digest));
}

#[test]
fn voronoi_mode_tetrahedron_census() {
    let dir = TempDir::new("voronoi");
    let cfg = write_config(
        &dir,
        "tetra.json",
        &json!({
            "sites": [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]],
            "charges": [1.0, 1.0, 1.0, 1.0]
        }),
    );
    let out = dir.path("voronoi.jsonl");
    let status = bin()
        .args(["voronoi", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let records = read_records(&out);
    assert_eq!(records[0]["outputs"]["num_cells"], json!(15));
    assert_eq!(records[0]["outputs"]["effective_census"]["total"], json!(11));
    assert_eq!(records[0]["outputs"]["complexity_bounds"]["maxwell"], json!(9));
}

#[test]
fn report_handles_empty_and_malformed_files() {
    let dir = TempDir::new("report");
    let empty = dir.path("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let r = bin().args(["report", "--records"]).arg(&empty).output().unwrap();
    assert_eq!(r.status.code(), Some(0));
    let bad = dir.path("bad.jsonl");
    std::fs::write(&bad, "not json\n").unwrap();
    let r = bin().args(["report", "--records"]).arg(&bad).output().unwrap();
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn three_mode_cross_checks_the_solver() {
    let dir = TempDir::new("three");
    let cfg = write_config(
        &dir,
        "three.json",
        &json!({
            "sites": [[0.0, 0.0], [1.0, 0.0], [0.5, 0.875]],
            "charges": [1.0, 1.0, 1.0],
            "alpha": 1.0
        }),
    );
    let out = dir.path("three.jsonl");
    let status = bin()
        .args(["three", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let records = read_records(&out);
    let o = &records[0]["outputs"];
    assert_eq!(o["pipeline"]["bound"], json!(12));
    assert_eq!(o["pipeline"]["certified"], json!(true));
    assert_eq!(o["gamma_matches_solver"], json!(true));
}

#[test]
fn report_flags_the_tetrahedron_maxwell_excess() {
    let dir = TempDir::new("tetra-report");
    let cfg = write_config(
        &dir,
        "tetra.json",
        &json!({
            "sites": [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]],
            "charges": [1.0, 1.0, 1.0, 1.0],
            "alpha": 30.0
        }),
    );
    let out = dir.path("solve.jsonl");
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let records = read_records(&out);
    assert_eq!(records[0]["outputs"]["total"], json!(11));
    assert_eq!(records[0]["outputs"]["effective_census"]["total"], json!(11));
    let report = bin().args(["report", "--records"]).arg(&out).output().unwrap();
    let table = String::from_utf8(report.stdout).unwrap();
    assert!(table.contains("11 vs 9 EXCEEDED"), "{table}");
}
