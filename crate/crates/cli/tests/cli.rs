use std::path::Path;
use std::process::{Command, Output};

fn tatspin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tatspin")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn empty_field_grid_is_rejected_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "engine = \"collective\"\nsizes = [32]\nfields = []\nt_max = 2.0\n");
    for cmd in ["validate", "run"] {
        let out = tatspin(&[cmd, &cfg]);
        assert!(!out.status.success(), "{cmd} should fail");
        let msg = stderr(&out);
        assert!(msg.contains("line 3") && msg.contains("fields"), "{msg}");
    }
}

#[test]
fn stability_preset_writes_the_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let out = tatspin(&["preset", "fig3a", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("stability.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("omega,L,lambda_max,critical_field"));
    assert_eq!(lines.count(), 20 * 5);
    assert!(!csv.contains('#'));
    let fits: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fits.json")).unwrap()).unwrap();
    assert_eq!(fits["critical_field"].as_array().unwrap().len(), 5);
    assert_eq!(manifest(dir.path())["preset"], "fig3a");
}

#[test]
fn collective_scaling_run_reports_the_squeezing_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "engine = \"scaling\"\nsource = \"collective\"\nsizes = [32, 64, 128, 256]\nfields = [0.5]\nt_max = 12.0\nt_points = 601\n",
    );
    let out = tatspin(&["run", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let fits: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fits.json")).unwrap()).unwrap();
    let nu = -fits["fits"][0]["squeezing_exponent"]["slope"].as_f64().expect("exponent present");
    assert!(nu > 0.3 && nu < 0.8, "nu = {nu}");
    let rows = std::fs::read_to_string(dir.path().join("scaling.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 4);
}

#[test]
fn same_seed_gives_identical_output() {
    let text = "engine = \"dtwa\"\ndimension = 1\nsizes = [6]\nfields = [0.3]\nt_max = 0.5\nt_points = 11\ntrajectories = 64\n";
    let run = |threads: &str, seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), text);
        let out = tatspin(&["run", &cfg, "--out", dir.path().to_str().unwrap(), "--threads", threads, "--seed", seed]);
        assert!(out.status.success(), "{}", stderr(&out));
        std::fs::read(dir.path().join("dtwa_omega0.3_l6.csv")).unwrap()
    };
    let a = run("1", "7");
    assert_eq!(a, run("1", "7"));
    assert_eq!(a, run("3", "7"));
    assert_ne!(a, run("1", "8"));
}

#[test]
fn unknown_preset_lists_the_available_ones() {
    let out = tatspin(&["preset", "fig99"]);
    assert!(!out.status.success());
    let msg = stderr(&out);
    assert!(msg.contains("fig99") && msg.contains("fig1a") && msg.contains("fig8"), "{msg}");
}

#[test]
fn manifest_records_warnings_and_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "engine = \"bosonic\"\nsizes = [64]\nfields = [0.5]\nt_max = 10.0\nt_points = 101\nseed = 11\n",
    );
    let out = tatspin(&["run", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let m = manifest(dir.path());
    let warnings = m["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("truncated")), "{warnings:?}");
    assert_eq!(m["seed"], 11);
    assert!(m["runtime_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(m["files"][0], "bosonic_omega0.5_n64.csv");
    assert!(stderr(&out).contains("warning:"));
}

#[test]
fn oversized_dtwa_lattice_needs_large() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "engine = \"dtwa\"\nsizes = [40]\nfields = [0.2]\nt_max = 1.0\n");
    let out = tatspin(&["validate", &cfg]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--large"));
    assert!(tatspin(&["validate", &cfg, "--large"]).status.success());
}
