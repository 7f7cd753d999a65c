use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn eit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eit")).current_dir(dir).args(args).output().expect("eit runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SCENARIO: &str = r#"
[scenario]
domain = { shape = "disk", radius = 1.0 }
gamma_arc = { start = -1.0, end = 1.0 }
obstacle = { center = [0.0, 0.0], radius = 0.5 }

[[scenario.regions]]
shape = { kind = "band", r_in = 0.0, r_out = 1.0 }
conductivity = 1.0

[mesh]
h = 0.1
"#;

#[test]
fn dtn_output_is_byte_identical_for_identical_configs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.toml", SCENARIO);
    let b = write(dir.path(), "b.toml", SCENARIO);
    for (cfg, out) in [(&a, "a.json"), (&b, "b.json")] {
        let o = eit(dir.path(), &["dtn", "--config", cfg.to_str().unwrap(), "--out", out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ja = std::fs::read(dir.path().join("a.json")).unwrap();
    let jb = std::fs::read(dir.path().join("b.json")).unwrap();
    assert!(!ja.is_empty());
    assert_eq!(ja, jb);
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "dtn");
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn gamma_arc_override() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.toml", SCENARIO);
    let o = eit(dir.path(), &["dtn", "--config", a.to_str().unwrap(), "--gamma-arc", "-0.5,0.5", "--out", "d.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let d: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("d.json")).unwrap()).unwrap();
    assert_eq!(d["gamma_arc"]["start"], -0.5);
}

#[test]
fn coercivity_reports_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = eit(dir.path(), &["coercivity", "--a-ratio", "2", "--b1", "2", "--b2", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["feasible"], true);
    assert!((v["epsilon0"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!((v["c5"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(dir.path().join("eit-coercivity.manifest.json").exists());

    let o = eit(dir.path(), &["coercivity", "--a-ratio", "1", "--b1", "2", "--b2", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["feasible"], false);
}

#[test]
fn missing_arc_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = SCENARIO.replace("gamma_arc = { start = -1.0, end = 1.0 }\n", "");
    let cfg = write(dir.path(), "bad.toml", &text);
    let o = eit(dir.path(), &["dtn", "--config", cfg.to_str().unwrap(), "--out", "d.json"]);
    assert_eq!(o.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("gamma_arc"));
    assert!(!dir.path().join("d.json").exists());
}

#[test]
fn geometry_and_solver_failures_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let overlapping = SCENARIO.replace("radius = 0.5 }", "radius = 1.5 }");
    let cfg = write(dir.path(), "g.toml", &overlapping);
    let o = eit(dir.path(), &["mesh", "--config", cfg.to_str().unwrap(), "--out", "m.json"]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "geometry");
}

#[test]
fn oracle_annulus_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = eit(dir.path(), &["oracle", "--case", "annulus", "--n", "1", "--r0", "0.5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["kappa"].as_f64().unwrap() - 5.0 / 3.0).abs() < 1e-12);
}

#[test]
fn solve_writes_vtk() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.toml", SCENARIO);
    let o = eit(dir.path(), &["solve", "--config", cfg.to_str().unwrap(), "--mode", "2", "--out", "u.vtk"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("u.vtk")).unwrap();
    assert!(text.starts_with("# vtk DataFile Version"));
}
