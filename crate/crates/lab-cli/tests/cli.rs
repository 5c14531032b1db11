use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn qnslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnslab")).args(args).env_remove("QNSLAB_THREADS").output().expect("spawn qnslab")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("lab.cfg");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn verify_semigroup_passes_quickly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let t = Instant::now();
    let o = qnslab(&["verify", "--suite", "semigroup", "--out", &out, "--format", "json,csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(t.elapsed().as_secs_f64() < 5.0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert!(!v["convention_notes"].as_array().unwrap().is_empty());
    assert!(dir.path().join("verify.csv").exists() && dir.path().join("metadata.json").exists());
}

#[test]
fn verify_output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = qnslab(&["verify", "--suite", "semigroup", "--out", &d.path().display().to_string()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let ja = std::fs::read(a.path().join("verify.json")).unwrap();
    let jb = std::fs::read(b.path().join("verify.json")).unwrap();
    assert_eq!(ja, jb);
}

#[test]
fn failing_tolerance_exits_one_with_diff() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[suite]\nname = semigroup\ntolerances = semigroup_law:0\n");
    let o = qnslab(&["verify", "--config", &cfg]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(1), "{stdout}");
    assert!(stdout.contains("FAIL") && stdout.contains("semigroup_law"));
}

#[test]
fn norm_of_zero_field_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.qnsf");
    let g = spectral_core::TorusGrid::new(2, 16, 1.0).unwrap();
    let mut buf = Vec::new();
    spectral_core::qnsf::write_field(&mut buf, &spectral_core::SpectralField::zeros(g, 1)).unwrap();
    std::fs::write(&path, buf).unwrap();
    for which in ["q", "bmo", "q-inverse", "wavelet"] {
        let o = qnslab(&["norm", &path.display().to_string(), "--which", which]);
        assert_eq!(o.status.code(), Some(0), "{which}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["report"]["value"], 0.0, "{which}");
    }
}

#[test]
fn solve_above_threshold_is_flagged_not_failed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[grid]\nn = 2\nN = 16\n[family]\nkmax = 3\n[solve]\namplitude = 3\nnodes = 12\nratio = 1.5\nj_max = 15\n",
    );
    let out = dir.path().join("run");
    let o = qnslab(&["solve", "--config", &cfg, "--out", &out.display().to_string(), "--format", "json,csv,svg"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{stdout}{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout.contains("outside small-data regime"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("solve.json")).unwrap()).unwrap();
    assert_eq!(v["regime"], "outside small-data regime");
    assert!(out.join("solve.svg").exists());

    std::fs::remove_file(out.join("solve.csv")).unwrap();
    let o = qnslab(&["report", "--out", &out.display().to_string(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("solve.csv").exists());
}

#[test]
fn gen_then_decompose_and_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let cfg = write_config(dir.path(), "[grid]\nn = 1\nN = 32\nL = 1\n[family]\ncount = 2\nkmax = 6\n");
    let o = qnslab(&["gen", "--config", &cfg, "--out", &out, "--format", "json,csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("field_001.qnsf").exists() && dir.path().join("gen.csv").exists());

    let f = dir.path().join("field_000.qnsf").display().to_string();
    let o = qnslab(&["decompose", &f, "--config", &cfg, "--out", &out, "--omega", "maximal-sqrt"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("decompose.json")).unwrap()).unwrap();
    assert!(v["residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["disjoint"], true);

    let o = qnslab(&["capacity", "cube:2:0;cube:2:8", "--config", &cfg, "--dim", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["samples"], 8);
    assert!(v["lower"].as_f64().unwrap() <= v["upper"].as_f64().unwrap());
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["[grid]\nbogus = 1\n", "[grid]\nN = 30\n", "[weird]\n", "n = 2\n", "[params]\nbeta = 0.2\n"] {
        let cfg = write_config(dir.path(), text);
        let o = qnslab(&["verify", "--config", &cfg, "--suite", "semigroup"]);
        assert_eq!(o.status.code(), Some(2), "{text}");
    }
    assert_eq!(qnslab(&["verify", "--suite", "nonexistent"]).status.code(), Some(2));
    assert_eq!(qnslab(&["gen"]).status.code(), Some(2));
}
