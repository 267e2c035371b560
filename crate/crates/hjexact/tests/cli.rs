//! End-to-end tests of the `hjx` binary: exit codes, output layout,
//! determinism, and the informational subcommands.

use std::path::Path;
use std::process::{Command, Output};

fn hjx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hjx"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL_CONFIG: &str = r#"{
  "version": 1,
  "jobs": [
    {
      "verify": {
        "name": "closure",
        "family": { "family": "ConstantForce1D", "params": { "F": 1.0, "P": 0.5 } },
        "checks": ["HamiltonJacobi", "Laplace"],
        "grids": [{ "axes": [{ "min": -2.0, "max": 2.0, "n": 129 }] }],
        "times": [0.0, 0.7]
      }
    },
    {
      "dump": {
        "name": "table",
        "family": { "family": "ConstantForce1D", "params": { "F": 2.0, "P": 0.0 } },
        "what": "V",
        "grid": { "axes": [{ "min": -2.0, "max": 2.0, "n": 9 }] },
        "times": [0.0]
      }
    }
  ]
}"#;

#[test]
fn run_is_deterministic_and_reports_status() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_CONFIG);
    let out1 = dir.path().join("out1");
    let out2 = dir.path().join("out2");

    let r1 = hjx(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out1.to_str().unwrap(),
    ]);
    assert!(
        r1.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&r1.stderr)
    );
    assert_eq!(
        String::from_utf8_lossy(&r1.stdout).trim(),
        "pass: 2  fail: 0"
    );

    let r2 = hjx(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
        "--workers",
        "3",
    ]);
    assert!(r2.status.success());

    for name in ["report.json", "00_closure_reports.csv", "01_table.csv"] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    let strip_meta = |p: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_slice(&std::fs::read(p.join("summary.json")).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("meta").unwrap();
        v
    };
    assert_eq!(strip_meta(&out1), strip_meta(&out2));
}

#[test]
fn failing_job_yields_nonzero_exit_but_all_jobs_still_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
          "version": 1,
          "jobs": [
            {
              "verify": {
                "name": "mismatch",
                "family": { "family": "ConstantForce1D", "params": { "F": 1.0, "P": 0.5 } },
                "checks": ["HamiltonJacobi"],
                "potential": { "kind": "UniformForce", "params": { "F": 2.0 } },
                "grids": [{ "axes": [{ "min": -2.0, "max": 2.0, "n": 65 }] }],
                "times": [0.0]
              }
            },
            {
              "dump": {
                "name": "table",
                "family": { "family": "Free1D", "params": { "P": 1.0 } },
                "what": "S",
                "grid": { "axes": [{ "min": -1.0, "max": 1.0, "n": 5 }] },
                "times": [0.0]
              }
            }
          ]
        }"#,
    );
    let out = dir.path().join("out");
    let r = hjx(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert_eq!(
        String::from_utf8_lossy(&r.stdout).trim(),
        "pass: 1  fail: 1"
    );
    // The failing verify job must not stop the dump job from producing output.
    assert!(out.join("01_table.csv").exists());
}

#[test]
fn empty_job_list_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{ "version": 1, "jobs": [] }"#);
    let out = dir.path().join("out");
    let r = hjx(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], 0);
    assert_eq!(summary["fail"], 0);
}

#[test]
fn config_errors_abort_before_any_job_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
          "version": 1,
          "jobs": [
            {
              "dump": {
                "family": { "family": "Free1D", "params": { "P": 1.0 } },
                "what": "S",
                "grid": { "axes": [{ "min": -1.0, "max": 1.0, "n": 5 }] },
                "timez": [0.0]
              }
            }
          ]
        }"#,
    );
    let out = dir.path().join("out");
    let r = hjx(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&r.stderr);
    assert!(
        stderr.contains("timez"),
        "stderr should name the unknown key: {stderr}"
    );
    // Nothing was executed, so the output directory was never created.
    assert!(!out.exists());
}

#[test]
fn families_lists_every_family_and_its_potential() {
    let r = hjx(&["families"]);
    assert!(r.status.success());
    let text = String::from_utf8_lossy(&r.stdout).into_owned();
    for needle in [
        "Free1D",
        "ConstantForce1D",
        "GrowingForce1D",
        "GeneralLinear1D",
        "AnalyticPoly2D",
        "RepulsiveOscillator2D",
        "LogCentral2D",
        "Composite",
        "p - F t",
        "-F x",
        "e^{wt} (p_x - m w x)",
    ] {
        assert!(
            text.contains(needle),
            "missing {needle:?} in families output"
        );
    }
}

#[test]
fn version_prints_name_and_semver() {
    let r = hjx(&["version"]);
    assert!(r.status.success());
    let text = String::from_utf8_lossy(&r.stdout);
    assert_eq!(text.trim(), concat!("hjexact ", env!("CARGO_PKG_VERSION")));
}
