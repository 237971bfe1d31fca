//! `collapse`: run scenarios, ensembles and the validation suite.
//!
//! Exit status is 0 when every check passes, 1 when a statistical check or
//! a simulation fails, and 2 when the configuration or command line is
//! unusable. Diagnostics go to standard error as one JSON object per line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use collapse_core::{clock_bound, DecoherenceTable, PLANCK_SIGMA_SQUARED};
use collapse_harness::checks::{born_test, martingale_test, mean_density_test, supermartingale_test, Report};
use collapse_harness::constants::DEFAULT_VALIDATION_SEED;
use collapse_harness::output::{self, resolve_output_dir, EnsembleSummary};
use collapse_harness::presets::{self, CUSTOM, PRESETS};
use collapse_harness::units::{parse_quantity, Dimension};
use collapse_harness::validation::{run_selected, ValidationRun};
use collapse_harness::{run_ensemble_with, simulate_path, ConfigError, EnsembleOptions, Scenario, ScenarioConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "collapse", version, about = "Energy-driven state reduction with Lévy noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and write its full time series.
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Path index within the ensemble; selects the RNG stream.
        #[arg(long, default_value_t = 0)]
        path: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an ensemble and its statistical checks.
    Ensemble {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the ensemble-mean density matrix and its check.
        #[arg(long)]
        no_density: bool,
    },
    /// Print the decoherence rates of a scenario.
    Decoherence {
        #[command(flatten)]
        source: Source,
        /// Also write `decoherence.csv` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upper bound on σ² from an atomic-clock coherence time.
    ClockBound {
        /// Energy gap, e.g. `3.801e-5eV` or `9.192631770GHz`.
        #[arg(long, allow_hyphen_values = true)]
        delta_e: String,
        /// Ramsey time, e.g. `1s`.
        #[arg(long, allow_hyphen_values = true)]
        ramsey: String,
        /// Candidate σ² in MeV⁻² s⁻¹ to compare against the bound.
        #[arg(long, default_value_t = PLANCK_SIGMA_SQUARED)]
        sigma_squared: f64,
    },
    /// Run the acceptance criteria and module property suites.
    Validate {
        #[arg(long, default_value_t = DEFAULT_VALIDATION_SEED)]
        seed: u64,
        /// Comma-separated criterion numbers (1 to 10); all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Write `validation.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print every measurement, not only failures.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Named scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    /// List the named presets.
    List,
    /// Print a preset as a scenario file.
    Show { name: String },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Named preset (see `scenario list`).
    #[arg(long)]
    scenario: Option<String>,
    /// Scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Runtime(String),
    Checks,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Config(format!("cannot write {}: {e}", path.display()))
}

fn load(source: &Source) -> Result<ScenarioConfig, Failure> {
    match (&source.scenario, &source.config) {
        (Some(name), None) if name == CUSTOM => {
            Err(Failure::Config("`custom` names a scenario file; pass it with --config".into()))
        }
        (Some(name), None) => presets::find(name).map(|p| p.config()).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
            Failure::Config(format!("unknown scenario {name:?}; expected one of {}", names.join(", ")))
        }),
        (None, Some(path)) => Ok(ScenarioConfig::load(path)?),
        _ => Err(Failure::Config("exactly one of --scenario and --config is required".into())),
    }
}

fn resolve(cfg: &ScenarioConfig) -> Result<Scenario, Failure> {
    Ok(cfg.resolve()?)
}

fn print_report(r: &Report, verbose: bool) {
    let verdict = if r.pass { "pass" } else { "FAIL" };
    match r.worst() {
        Some(m) => println!(
            "  {verdict} {:<44} {}: {:.6} vs {:.6} (se {:.3e})",
            r.name, m.label, m.estimate, m.reference, m.se
        ),
        None => println!("  {verdict} {}", r.name),
    }
    if verbose || !r.pass {
        for m in &r.measurements {
            if verbose || !m.pass {
                println!(
                    "      {} {}: {:.6e} vs {:.6e}, effect {:.3e}, se {:.3e}, limit {}",
                    if m.pass { "ok " } else { "bad" },
                    m.label,
                    m.estimate,
                    m.reference,
                    m.effect,
                    m.se,
                    m.limit
                );
            }
        }
        for n in &r.notes {
            println!("      note: {n}");
        }
    }
}

fn simulate(source: &Source, path: usize, seed: Option<u64>, out: Option<&Path>) -> Result<(), Failure> {
    let mut cfg = load(source)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let scenario = resolve(&cfg)?;
    let trace = simulate_path(&scenario, path).map_err(|e| Failure::Runtime(e.to_string()))?;
    let dir = resolve_output_dir(out, scenario.output_dir.as_deref(), &scenario.name);
    std::fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
    let csv = dir.join(format!("path-{path}.csv"));
    output::write_trace(&csv, &trace).map_err(|e| io_failure(&csv, e))?;
    let r = &trace.record;
    let summary = json!({
        "provenance": {
            "scenario": scenario.name,
            "config_sha256": scenario.config_hash,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": scenario.seed,
        },
        "config": cfg.to_toml(),
        "path": path,
        "path_seed": format!("{:016x}", r.seed),
        "true_outcome": r.true_outcome + 1,
        "collapse_outcome": r.collapse_outcome.map(|j| j + 1),
        "collapse_time": r.collapse_time,
        "final_xi": r.final_xi,
        "final_posteriors": r.final_posteriors,
    });
    let json_path = dir.join(format!("path-{path}.json"));
    output::write_json(&json_path, &summary).map_err(|e| io_failure(&json_path, e))?;
    match (r.collapse_outcome, r.collapse_time) {
        (Some(j), Some(t)) => {
            println!("path {path}: collapsed to level {} (E = {}) at t = {t}", j + 1, scenario.levels()[j])
        }
        _ => println!("path {path}: no collapse by t = {}", scenario.grid.horizon()),
    }
    println!("wrote {} and {}", csv.display(), json_path.display());
    Ok(())
}

fn ensemble(
    source: &Source,
    paths: Option<usize>,
    seed: Option<u64>,
    out: Option<&Path>,
    no_density: bool,
) -> Result<(), Failure> {
    let mut cfg = load(source)?;
    if let Some(n) = paths {
        cfg.paths = n;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let scenario = resolve(&cfg)?;
    let result = run_ensemble_with(&scenario, EnsembleOptions { track_density: !no_density })
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    let mut reports = vec![born_test(&result), martingale_test(&result), supermartingale_test(&result, &scenario)];
    if !no_density {
        reports.push(mean_density_test(&result, &scenario));
    }
    let summary = EnsembleSummary::new(&cfg, &scenario, &result, reports);
    let dir = resolve_output_dir(out, scenario.output_dir.as_deref(), &scenario.name);
    let files = output::write_ensemble(&dir, &result, &summary).map_err(|e| io_failure(&dir, e))?;
    println!(
        "{}: {} paths, {} grid points, horizon {}, collapsed fraction {:.4}",
        scenario.name,
        result.paths(),
        result.times.len(),
        scenario.grid.horizon(),
        result.collapsed_fraction()
    );
    for r in &summary.reports {
        print_report(r, false);
    }
    println!("  {} state invariants", if summary.invariants.holds { "pass" } else { "FAIL" });
    for f in files {
        println!("wrote {}", f.display());
    }
    if summary.pass {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn decoherence(source: &Source, out: Option<&Path>) -> Result<(), Failure> {
    let cfg = load(source)?;
    let scenario = resolve(&cfg)?;
    let table = DecoherenceTable::new(&scenario.model, scenario.levels(), scenario.lambda)
        .map_err(|e| Failure::Config(e.to_string()))?;
    println!("{} with λ = {}", scenario.model, scenario.lambda);
    println!("{:>3} {:>3} {:>14} {:>14} {:>16} {:>16}", "m", "n", "E_m", "E_n", "gamma", "effective_q");
    for r in table.rows() {
        println!(
            "{:>3} {:>3} {:>14.6e} {:>14.6e} {:>16.8e} {:>16.8e}",
            r.m + 1,
            r.n + 1,
            r.em,
            r.en,
            r.gamma,
            r.effective_q
        );
    }
    if let Some(dir) =
        out.map(Path::to_path_buf).or_else(|| std::env::var_os(output::OUTPUT_DIR_ENV).map(PathBuf::from))
    {
        std::fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
        let path = dir.join("decoherence.csv");
        output::write_decoherence(&path, &table).map_err(|e| io_failure(&path, e))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn clock(delta_e: &str, ramsey: &str, sigma_squared: f64) -> Result<(), Failure> {
    let de = parse_quantity(delta_e, Dimension::Energy).map_err(|e| Failure::Config(e.to_string()))?;
    let t = parse_quantity(ramsey, Dimension::Time).map_err(|e| Failure::Config(e.to_string()))?;
    let bound = clock_bound(de, t).map_err(|e| Failure::Config(e.to_string()))?;
    println!("ΔE = {de:e} eV, T = {t} s");
    println!("σ² < 8/(ΔE² T) = {bound:.3e} MeV⁻² s⁻¹");
    if sigma_squared <= bound {
        println!("σ² = {sigma_squared} MeV⁻² s⁻¹ is within bound");
    } else {
        println!("σ² = {sigma_squared} MeV⁻² s⁻¹ exceeds the bound");
    }
    Ok(())
}

fn validate(seed: u64, only: &[u8], out: Option<&Path>, verbose: bool) -> Result<(), Failure> {
    if let Some(bad) = only.iter().find(|c| !(1..=10).contains(*c)) {
        return Err(Failure::Config(format!("no criterion {bad}; expected 1 to 10")));
    }
    let run: ValidationRun = run_selected(seed, only);
    for c in &run.criteria {
        println!("{}", c.line());
        if verbose || !c.pass {
            for r in &c.reports {
                print_report(r, verbose);
            }
        }
    }
    println!(
        "{} in {:.1} s (seed {seed})",
        if run.pass { "all criteria pass" } else { "some criteria FAILED" },
        run.seconds
    );
    let dir = out.map(Path::to_path_buf).or_else(|| std::env::var_os(output::OUTPUT_DIR_ENV).map(PathBuf::from));
    if let Some(dir) = dir {
        std::fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
        let path = dir.join("validation.json");
        output::write_json(&path, &run).map_err(|e| io_failure(&path, e))?;
        println!("wrote {}", path.display());
    }
    if run.pass {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn scenario(action: &ScenarioAction) -> Result<(), Failure> {
    match action {
        ScenarioAction::List => {
            for p in PRESETS {
                println!("{:<22} {}", p.name, p.summary);
            }
            println!("{:<22} any scenario file, passed with --config", CUSTOM);
            Ok(())
        }
        ScenarioAction::Show { name } => {
            let p = presets::find(name).ok_or_else(|| Failure::Config(format!("unknown scenario {name:?}")))?;
            print!("{}", p.config().to_toml());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Simulate { source, path, seed, out } => simulate(source, *path, *seed, out.as_deref()),
        Command::Ensemble { source, paths, seed, out, no_density } => {
            ensemble(source, *paths, *seed, out.as_deref(), *no_density)
        }
        Command::Decoherence { source, out } => decoherence(source, out.as_deref()),
        Command::ClockBound { delta_e, ramsey, sigma_squared } => clock(delta_e, ramsey, *sigma_squared),
        Command::Validate { seed, only, out, verbose } => validate(*seed, only, out.as_deref(), *verbose),
        Command::Scenario { action } => scenario(action),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => {
            eprintln!("{}", json!({"error": "checks", "message": "one or more statistical checks failed"}));
            ExitCode::from(1)
        }
        Err(Failure::Runtime(message)) => {
            eprintln!("{}", json!({"error": "simulation", "message": message}));
            ExitCode::from(1)
        }
        Err(Failure::Config(message)) => {
            eprintln!("{}", json!({"error": "config", "message": message}));
            ExitCode::from(2)
        }
    }
}
