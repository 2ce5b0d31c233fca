use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eps-lab"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL_COMPARE: &str = r#"
experiment = "compare-gauges"
gauge = "both"
solver = "both"

[drive]
E0 = 0.1
omega = 2.0

[initial]
kind = "gaussian"
sq = 10.0
sp = 20.0

# The phi-gauge momentum range is ~1600 wide: keep cells narrower than sp.
[grid]
nq = 32
np = 128

[time]
horizon = 20.0
"#;

#[test]
fn compare_gauges_writes_artifacts_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_COMPARE);
    let out = dir.path().join("out");
    let status = bin().args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).output().unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    for name in [
        "summary.json",
        "series_A_characteristics.csv",
        "series_phi_characteristics.csv",
        "series_A_grid.csv",
        "series_phi_grid.csv",
        "grid_A_grid.csv",
        "grid_phi_grid.bin",
    ] {
        assert!(out.join(name).exists(), "{name}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let run = &summary["runs"][0];
    for key in
        ["gauge", "sigma_re", "sigma_im", "magnitude", "phase", "residual", "reference_re", "reference_im", "window"]
    {
        assert!(!run[key].is_null(), "{key}");
    }
    assert_eq!(summary["passed"], serde_json::json!(true));
}

#[test]
fn identical_configs_give_byte_identical_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_COMPARE);
    let read = |sub: &str| {
        let out = dir.path().join(sub);
        let s = bin().args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).status().unwrap();
        assert!(s.success());
        std::fs::read(out.join("summary.json")).unwrap()
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn selftest_echoes_seed_and_override_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "experiment = \"transient\"\n[drive]\nE0 = 0.0\n");
    let out = dir.path().join("out");
    let s = bin()
        .args(["run", cfg.to_str().unwrap(), "--experiment", "algebra-selftest", "--seed", "42", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], serde_json::json!(42));
    assert_eq!(summary["generator_sign"], serde_json::json!("minus"));
    assert!(summary["checks"].as_array().unwrap().iter().all(|c| c["pass"] == serde_json::json!(true)));
}

#[test]
fn tolerance_failure_exits_with_two() {
    // Linear interpolation on a coarse grid cannot reach second order.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "experiment = \"convergence\"\ngauge = \"phi\"\n[grid]\ninterpolation = \"linear\"\n[convergence]\nlevels = [16, 32]\n",
    );
    let out = dir.path().join("out");
    let s = bin().args(["run", cfg.to_str().unwrap(), "--out"]).arg(&out).output().unwrap();
    assert_eq!(s.status.code(), Some(2), "{}", String::from_utf8_lossy(&s.stdout));
    assert!(out.join("summary.json").exists());
}

#[test]
fn errors_exit_with_one_and_explain() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "experiment = \"drude-sweep\"\n[drive]\nE0 = 0.0\n");
    let s = bin().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(s.status.code(), Some(1));
    let err = String::from_utf8_lossy(&s.stderr);
    assert!(err.contains("line 3, key `drive.E0`"), "{err}");

    let s = bin().args(["run", "/nonexistent/config.toml"]).output().unwrap();
    assert_eq!(s.status.code(), Some(1));

    let cfg = write(dir.path(), "d.toml", "");
    let s = bin().args(["run", cfg.to_str().unwrap(), "--experiment", "bogus"]).output().unwrap();
    assert_eq!(s.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&s.stderr).contains("unknown experiment `bogus`"));
    let s = bin().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(s.status.code(), Some(1));
}

#[test]
fn hamiltonian_subcommand_prints_sorted_terms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[drive]\nE0 = 0.1\nomega = 2.0\n");
    let s = bin()
        .args(["hamiltonian", cfg.to_str().unwrap(), "--picture", "sn", "--gauge", "a", "--t", "0.5"])
        .output()
        .unwrap();
    assert!(s.status.success());
    let terms: serde_json::Value = serde_json::from_slice(&s.stdout).unwrap();
    let names: Vec<&str> = terms.as_array().unwrap().iter().map(|t| t["monomial"].as_str().unwrap()).collect();
    assert_eq!(names, ["pi_q", "pi_q^2", "p*pi_q"]);
}
