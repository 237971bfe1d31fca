use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn collapse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_collapse"))
        .args(args)
        .env_remove("COLLAPSE_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

const CUSTOM: &str = r#"
name = "three-level"
seed = 11
paths = 300

[spectrum]
levels = ["0 meV", "0.5meV", "1 meV"]

[initial_state]
probabilities = [0.2, 0.3, 0.5]

[noise]
kind = "brownian"
q = 1.0
lambda = "1000 /eV"

[grid]
steps = 60
horizon = "auto"
horizon_rates = 15
"#;

#[test]
fn clock_bound_reproduces_quoted_value() {
    let o = collapse(&["clock-bound", "--delta-e", "3.801e-5eV", "--ramsey", "1s"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("5.537e21 MeV⁻² s⁻¹"), "{text}");
    assert!(text.contains("within bound"), "{text}");
}

#[test]
fn clock_bound_accepts_frequency_gap() {
    // the cesium hyperfine splitting written as a frequency
    let o = collapse(&["clock-bound", "--delta-e", "9.192631770GHz", "--ramsey", "1000ms"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("5.5"));
}

#[test]
fn scenario_list_names_presets() {
    let o = collapse(&["scenario", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["appendix-a", "appendix-b", "appendix-c", "custom"] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, CUSTOM.replace("kind = \"brownian\"", "kind = \"cauchy\"")).unwrap();
    for args in [
        vec!["ensemble", "--config", bad.to_str().unwrap()],
        vec!["ensemble", "--scenario", "appendix-z"],
        vec!["ensemble", "--scenario", "appendix-a", "--config", bad.to_str().unwrap()],
        vec!["clock-bound", "--delta-e", "-1eV", "--ramsey", "1s"],
        vec!["validate", "--only", "11"],
        vec!["simulate"],
    ] {
        let o = collapse(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = collapse(&["ensemble", "--config", bad.to_str().unwrap()]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("{\"error\":\"config\""), "{err}");
}

#[test]
fn domain_violation_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gamma.toml");
    // λE = 2 lies outside the gamma domain α < 1/φ = 1
    let text = "[spectrum]\nlevels = [0.0, 2.0]\n[initial_state]\nprobabilities = [0.5, 0.5]\n[noise]\nkind = \"gamma\"\nm = 1.0\nphi = 1.0\nlambda = 1.0\n";
    fs::write(&path, text).unwrap();
    let o = collapse(&["simulate", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ensemble_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let o = collapse(&[
            "ensemble",
            "--scenario",
            "appendix-b",
            "--paths",
            "5000",
            "--seed",
            "42",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        runs.push(read_all(&out));
    }
    assert_eq!(runs[0], runs[1]);
    let names: Vec<&str> = runs[0].iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["paths.csv", "series.csv", "summary.json"]);
    let summary: serde_json::Value = serde_json::from_slice(&runs[0][2].1).unwrap();
    assert_eq!(summary["paths"], 5000);
    assert_eq!(summary["provenance"]["seed"], 42);
    assert_eq!(summary["pass"], true);
}

#[test]
fn custom_config_with_units_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("three.toml");
    fs::write(&cfg, CUSTOM).unwrap();
    let out = dir.path().join("out");
    let o = collapse(&["ensemble", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&o.stderr));
    let series = fs::read_to_string(out.join("series.csv")).unwrap();
    assert!(series.starts_with("t,mean_H,se_H,mean_V,se_V,collapsed_E1,collapsed_E2,collapsed_E3,rho_11_re"));
    assert_eq!(series.lines().count(), 62);
    let o = collapse(&["decoherence", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    // Brownian rate ⅛q(λΔE)² for λΔE = 0.5
    assert!(stdout(&o).contains("3.12500000e-2"), "{}", stdout(&o));
    assert!(out.join("decoherence.csv").exists());
}

#[test]
fn environment_overrides_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_collapse"))
        .args(["simulate", "--scenario", "appendix-a", "--path", "3"])
        .env("COLLAPSE_OUTPUT_DIR", dir.path())
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("path-3.csv").exists());
    assert!(dir.path().join("path-3.json").exists());
}

#[test]
fn validate_single_criterion() {
    let o = collapse(&["validate", "--only", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS C8"));
}
