//! The batch runner, called as a library.
//!
//! Everything the `hjx` binary does is reachable through `cli::run`: parse
//! a strict JSON config, execute the jobs (all of them, even after a
//! failure), and write deterministic reports.  This builds a tiny config in
//! code — one passing closure check and one deliberately mismatched
//! potential — and shows the aggregated verdict.

use hjexact::cli::{parse_config_str, run};

fn main() -> anyhow::Result<()> {
    let config_text = r#"{
        "version": 1,
        "jobs": [
            {"verify": {
                "name": "closure",
                "family": {"family": "ConstantForce1D", "params": {"F": 1.0, "P": 0.5}},
                "checks": ["HamiltonJacobi"],
                "grids": [{"axes": [{"min": -2.0, "max": 2.0, "n": 257}]}],
                "times": [0.0, 0.7, 2.0]
            }},
            {"verify": {
                "name": "wrong-potential",
                "family": {"family": "ConstantForce1D", "params": {"F": 1.0, "P": 0.5}},
                "checks": ["HamiltonJacobi"],
                "potential": {"kind": "UniformForce", "params": {"F": 2.0}},
                "grids": [{"axes": [{"min": -2.0, "max": 2.0, "n": 257}]}],
                "times": [0.0]
            }}
        ]
    }"#;

    let config = parse_config_str(config_text)?;
    let outdir = std::env::temp_dir().join("hjx-batch-run-example");
    let summary = run(&config, &outdir, None, 2)?;

    println!(
        "pass: {}  fail: {}  (exit code {})",
        summary.pass,
        summary.fail,
        summary.exit_code()
    );
    println!("reports in {}", outdir.display());

    let report = std::fs::read_to_string(outdir.join("report.json"))?;
    let doc: serde_json::Value = serde_json::from_str(&report)?;
    for job in doc["jobs"].as_array().expect("jobs array") {
        println!(
            "  {:<16} pass = {}",
            job["name"].as_str().unwrap_or("?"),
            job["pass"]
        );
    }
    println!("(the mismatched potential is supposed to fail: that's the suite detecting it)");

    Ok(())
}
