//! CSV time series and JSON run summaries.
//!
//! Numbers are written in Rust's shortest round-trip form and the summary
//! carries no timestamps, so reruns with the same seed are byte-identical.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use collapse_core::{CMatrix, DecoherenceTable};
use serde::Serialize;

use crate::checks::Report;
use crate::config::{Scenario, ScenarioConfig};
use crate::ensemble::{EnsembleResult, InvariantStats, PathTrace};

/// Environment variable that overrides the output directory.
pub const OUTPUT_DIR_ENV: &str = "COLLAPSE_OUTPUT_DIR";

/// Directory used when neither the command line, the environment nor the
/// scenario names one.
pub const DEFAULT_OUTPUT_DIR: &str = "collapse-out";

/// Command-line flag, then [`OUTPUT_DIR_ENV`], then the scenario's
/// `output_dir`, then `collapse-out/<name>`.
pub fn resolve_output_dir(flag: Option<&Path>, scenario_dir: Option<&Path>, name: &str) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    if let Some(p) = scenario_dir {
        return p.to_path_buf();
    }
    Path::new(DEFAULT_OUTPUT_DIR).join(name)
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn density_header(d: usize) -> Vec<String> {
    let mut h = Vec::with_capacity(2 * d * d);
    for i in 0..d {
        for j in 0..d {
            h.push(format!("rho_{}{}_re", i + 1, j + 1));
            h.push(format!("rho_{}{}_im", i + 1, j + 1));
        }
    }
    h
}

fn density_cells(m: &CMatrix<f64>) -> impl Iterator<Item = String> + '_ {
    let d = m.nrows();
    (0..d).flat_map(move |i| (0..d).flat_map(move |j| [num(m[(i, j)].re), num(m[(i, j)].im)]))
}

fn write_csv(path: &Path, header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()
}

/// `t, mean_H, se_H, mean_V, se_V, collapsed_E*, rho_*` per grid time.
pub fn write_series(path: &Path, result: &EnsembleResult) -> io::Result<()> {
    let n = result.levels.len();
    let s = &result.series;
    let mut header: Vec<String> = ["t", "mean_H", "se_H", "mean_V", "se_V"].iter().map(|x| x.to_string()).collect();
    header.extend((1..=n).map(|j| format!("collapsed_E{j}")));
    if let Some(m) = s.mean_density.as_ref().and_then(|m| m.first()) {
        header.extend(density_header(m.nrows()));
    }
    let rows = (0..result.times.len()).map(|k| {
        let mut r = vec![num(result.times[k]), num(s.mean_h[k]), num(s.se_h[k]), num(s.mean_v[k]), num(s.se_v[k])];
        r.extend(s.collapsed[k].iter().map(|x| num(*x)));
        if let Some(m) = &s.mean_density {
            r.extend(density_cells(&m[k]));
        }
        r
    });
    write_csv(path, header, rows)
}

/// One row per path.
pub fn write_paths(path: &Path, result: &EnsembleResult) -> io::Result<()> {
    let n = result.levels.len();
    let mut header: Vec<String> = ["index", "seed", "true_outcome", "collapse_outcome", "collapse_time", "final_xi"]
        .iter()
        .map(|x| x.to_string())
        .collect();
    header.extend((1..=n).map(|j| format!("final_pi_{j}")));
    let opt = |x: Option<String>| x.unwrap_or_default();
    let rows = result.records.iter().map(|p| {
        let mut r = vec![
            p.index.to_string(),
            format!("{:016x}", p.seed),
            (p.true_outcome + 1).to_string(),
            opt(p.collapse_outcome.map(|j| (j + 1).to_string())),
            opt(p.collapse_time.map(num)),
            num(p.final_xi),
        ];
        r.extend(p.final_posteriors.iter().map(|x| num(*x)));
        r
    });
    write_csv(path, header, rows)
}

/// Full time series of one path.
pub fn write_trace(path: &Path, trace: &PathTrace) -> io::Result<()> {
    let n = trace.posteriors.first().map_or(0, |p| p.len());
    let mut header: Vec<String> = ["t", "xi", "H", "V"].iter().map(|x| x.to_string()).collect();
    header.extend((1..=n).map(|j| format!("pi_{j}")));
    if let Some(s) = trace.states.first() {
        header.extend(density_header(s.nrows()));
    }
    let rows = (0..trace.times.len()).map(|k| {
        let mut r = vec![num(trace.times[k]), num(trace.xi[k]), num(trace.h[k]), num(trace.v[k])];
        r.extend(trace.posteriors[k].iter().map(|x| num(*x)));
        if let Some(s) = trace.states.get(k) {
            r.extend(density_cells(s));
        }
        r
    });
    write_csv(path, header, rows)
}

pub fn write_decoherence(path: &Path, table: &DecoherenceTable<f64>) -> io::Result<()> {
    let header = ["m", "n", "E_m", "E_n", "gamma", "effective_q"].iter().map(|x| x.to_string()).collect();
    let rows = table.rows().into_iter().map(|r| {
        vec![(r.m + 1).to_string(), (r.n + 1).to_string(), num(r.em), num(r.en), num(r.gamma), num(r.effective_q)]
    });
    write_csv(path, header, rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProvenanceDoc {
    pub scenario: String,
    pub config_sha256: String,
    pub version: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantsDoc {
    pub holds: bool,
    pub states_checked: u64,
    pub posteriors_checked: u64,
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
    pub max_hermitian_error: f64,
    pub max_posterior_sum_error: f64,
    pub min_posterior: f64,
}

impl From<&InvariantStats> for InvariantsDoc {
    fn from(s: &InvariantStats) -> Self {
        Self {
            holds: s.holds(),
            states_checked: s.states_checked,
            posteriors_checked: s.posteriors_checked,
            max_trace_error: s.max_trace_error,
            min_eigenvalue: s.min_eigenvalue,
            max_hermitian_error: s.max_hermitian_error,
            max_posterior_sum_error: s.max_posterior_sum_error,
            min_posterior: s.min_posterior,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub provenance: ProvenanceDoc,
    pub config: String,
    pub model: String,
    pub lambda: f64,
    pub levels: Vec<f64>,
    pub prior: Vec<f64>,
    pub paths: usize,
    pub grid_points: usize,
    pub horizon: f64,
    pub collapse_threshold: f64,
    pub outcome_counts: Vec<u64>,
    pub collapsed_fraction: f64,
    pub invariants: InvariantsDoc,
    pub pass: bool,
    pub reports: Vec<Report>,
}

impl EnsembleSummary {
    pub fn new(config: &ScenarioConfig, scenario: &Scenario, result: &EnsembleResult, reports: Vec<Report>) -> Self {
        let pass = reports.iter().all(|r| r.pass) && result.invariants.holds();
        Self {
            provenance: ProvenanceDoc {
                scenario: result.provenance.scenario.clone(),
                config_sha256: result.provenance.config_hash.clone(),
                version: result.provenance.version.to_string(),
                seed: result.provenance.seed,
            },
            config: config.to_toml(),
            model: scenario.model.to_string(),
            lambda: scenario.lambda,
            levels: result.levels.clone(),
            prior: result.prior.clone(),
            paths: result.paths(),
            grid_points: result.times.len(),
            horizon: *result.times.last().expect("non-empty grid"),
            collapse_threshold: result.delta,
            outcome_counts: result.outcome_counts(),
            collapsed_fraction: result.collapsed_fraction(),
            invariants: (&result.invariants).into(),
            pass,
            reports,
        }
    }
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Writes `series.csv`, `paths.csv` and `summary.json` into `dir`.
pub fn write_ensemble(dir: &Path, result: &EnsembleResult, summary: &EnsembleSummary) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let files = [dir.join("series.csv"), dir.join("paths.csv"), dir.join("summary.json")];
    write_series(&files[0], result)?;
    write_paths(&files[1], result)?;
    write_json(&files[2], summary)?;
    Ok(files.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::run_ensemble;
    use crate::presets;

    #[test]
    fn files_are_reproducible() {
        let mut cfg = presets::find("appendix-b").unwrap().config();
        cfg.paths = 100;
        cfg.grid.steps = Some(20);
        let s = cfg.resolve().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = Vec::new();
        for run in 0..2 {
            let r = run_ensemble(&s).unwrap();
            let summary = EnsembleSummary::new(&cfg, &s, &r, vec![crate::checks::born_test(&r)]);
            let out = dir.path().join(format!("run{run}"));
            let files = write_ensemble(&out, &r, &summary).unwrap();
            bytes.push(files.iter().map(|f| fs::read(f).unwrap()).collect::<Vec<_>>());
        }
        assert_eq!(bytes[0], bytes[1]);
        let series = String::from_utf8(bytes[0][0].clone()).unwrap();
        assert!(series.starts_with("t,mean_H,se_H,mean_V,se_V,collapsed_E1,collapsed_E2,rho_11_re"));
        assert_eq!(series.lines().count(), 22);
    }

    #[test]
    fn output_dir_precedence() {
        let flag = Path::new("from-flag");
        let cfg = Path::new("from-config");
        assert_eq!(resolve_output_dir(Some(flag), Some(cfg), "x"), flag);
        if std::env::var_os(OUTPUT_DIR_ENV).is_none() {
            assert_eq!(resolve_output_dir(None, Some(cfg), "x"), cfg);
            assert_eq!(resolve_output_dir(None, None, "x"), Path::new("collapse-out/x"));
        }
    }
}
