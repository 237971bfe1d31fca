//! Scenario files.
//!
//! A scenario is a TOML document whose keys mirror [`ScenarioConfig`].
//! Physical quantities may carry unit suffixes; they are converted to eV and
//! seconds at load time, so the core crate only ever sees plain numbers.
//!
//! ```toml
//! name = "two-level"
//! seed = 42
//! paths = 5000
//!
//! [spectrum]
//! levels = ["0 eV", "1 eV"]
//!
//! [initial_state]
//! probabilities = [0.3, 0.7]
//!
//! [noise]
//! kind = "brownian"
//! q = 1.0
//! lambda = "1 /eV"
//!
//! [grid]
//! steps = 400
//! horizon = "auto"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use collapse_core::{CMatrix, Density, Grid, Levy, LevyKind, Pure, Spectrum, C};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::{DEFAULT_COLLAPSE_THRESHOLD, DEFAULT_HORIZON_RATES, DEFAULT_STEPS};
use crate::units::{parse_quantity, Dimension, HBAR_EV_S};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed scenario file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("invalid scenario: {0}")]
    Core(#[from] collapse_core::Error),
    #[error("invalid scenario: {0}")]
    Unit(#[from] crate::units::UnitError),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// A number, or a string with a unit suffix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

impl Quantity {
    pub fn resolve(&self, dim: Dimension) -> Result<f64, ConfigError> {
        let v = match self {
            Quantity::Number(x) => *x,
            Quantity::Text(s) => parse_quantity(s, dim)?,
        };
        if !v.is_finite() {
            return Err(invalid(format!("{self} is not finite")));
        }
        Ok(v)
    }
}

impl From<f64> for Quantity {
    fn from(x: f64) -> Self {
        Quantity::Number(x)
    }
}

impl From<&str> for Quantity {
    fn from(s: &str) -> Self {
        Quantity::Text(s.to_string())
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Number(x) => write!(f, "{x}"),
            Quantity::Text(s) => write!(f, "{s:?}"),
        }
    }
}

/// Matrix or amplitude entry: a real quantity or `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(Quantity),
}

impl Entry {
    fn resolve(&self, dim: Dimension) -> Result<C<f64>, ConfigError> {
        match self {
            Entry::Complex([re, im]) => Ok(C::new(*re, *im)),
            Entry::Real(q) => Ok(C::new(q.resolve(dim)?, 0.0)),
        }
    }
}

impl From<f64> for Entry {
    fn from(x: f64) -> Self {
        Entry::Real(Quantity::Number(x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Hbar {
    Value(f64),
    /// `"inf"` (phases off) or `"physical"` (ħ in eV·s).
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Checkpoints {
    Count(usize),
    Times(Vec<Quantity>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Distinct energies, increasing. Without `projectors` or
    /// `multiplicities` each level is one basis vector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Quantity>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projectors: Option<Vec<Vec<Vec<Entry>>>>,
    /// Dense Hermitian matrix, in energy units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<Vec<Vec<Entry>>>,
    /// Eigenvalues closer than this are merged into one level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy_tol: Option<Quantity>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<Entry>>,
    /// Diagonal populations in the basis of the Hamiltonian's matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<Vec<Entry>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// `brownian`, `poisson`, `compound-poisson-exp` or `gamma`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Quantity>,
    /// Brownian only: `σ = λ√q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Quantity>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// A time, or `"auto"` for `horizon_rates / Γ_min`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_rates: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Checkpoints>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<Hbar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub spectrum: SpectrumConfig,
    pub initial_state: InitialStateConfig,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub grid: GridConfig,
}

fn default_name() -> String {
    "custom".into()
}

fn default_paths() -> usize {
    1000
}

/// A fully resolved, validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub spectrum: Spectrum,
    pub rho0: Density,
    pub model: Levy,
    pub lambda: f64,
    pub grid: Grid,
    /// Grid indices at which per-path snapshots are kept, increasing.
    pub checkpoints: Vec<usize>,
    pub paths: usize,
    pub seed: u64,
    pub delta: f64,
    pub output_dir: Option<PathBuf>,
    /// SHA-256 of the canonical serialization, hex encoded.
    pub config_hash: String,
}

impl Scenario {
    pub fn prior(&self) -> Vec<f64> {
        self.spectrum.probabilities(&self.rho0).expect("dimensions checked at load")
    }

    pub fn levels(&self) -> &[f64] {
        self.spectrum.levels()
    }

    pub fn checkpoint_times(&self) -> Vec<f64> {
        self.checkpoints.iter().map(|&i| self.grid.times()[i]).collect()
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    /// Canonical text form; parsing it back gives an equal config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    /// Validates everything, including that every `λE_j` lies in the
    /// exponent's domain, and builds the objects the simulation needs.
    pub fn resolve(&self) -> Result<Scenario, ConfigError> {
        if self.paths == 0 {
            return Err(invalid("paths must be at least 1"));
        }
        let delta = self.collapse_threshold.unwrap_or(DEFAULT_COLLAPSE_THRESHOLD);
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid("collapse_threshold must lie in (0, 1)"));
        }
        let hbar = match &self.hbar {
            None => 1.0,
            Some(Hbar::Value(h)) if *h > 0.0 => *h,
            Some(Hbar::Value(_)) => return Err(invalid("hbar must be positive")),
            Some(Hbar::Named(s)) => match s.as_str() {
                "inf" | "infinity" => f64::INFINITY,
                "physical" => HBAR_EV_S,
                other => return Err(invalid(format!("hbar {other:?}: expected a number, \"inf\" or \"physical\""))),
            },
        };
        let spectrum = self.spectrum.resolve()?.with_hbar(hbar)?;
        let rho0 = self.initial_state.resolve(spectrum.dim())?;
        let (model, lambda) = self.noise.resolve()?;
        let levels = spectrum.levels();
        let prior = spectrum.probabilities(&rho0)?;
        for (j, e) in levels.iter().enumerate() {
            let alpha = lambda * e;
            if !model.in_domain(alpha) {
                return Err(invalid(format!(
                    "λE_{} = {alpha} lies outside the {} exponent's domain {}",
                    j + 1,
                    model.name(),
                    model.domain_string()
                )));
            }
        }
        let grid_cfg = &self.grid;
        let horizon = match &grid_cfg.horizon {
            Some(Quantity::Text(s)) if s == "auto" => None,
            None => None,
            Some(q) => Some(q.resolve(Dimension::Time)?),
        };
        let horizon = match horizon {
            Some(t) if t > 0.0 => t,
            Some(_) => return Err(invalid("horizon must be positive")),
            None => {
                let rates = grid_cfg.horizon_rates.unwrap_or(DEFAULT_HORIZON_RATES);
                if !(rates > 0.0) {
                    return Err(invalid("horizon_rates must be positive"));
                }
                let gamma = slowest_rate(&model, levels, &prior, lambda)?;
                if !(gamma > 0.0) {
                    return Err(invalid(
                        "horizon = \"auto\" needs two occupied levels with a positive decoherence rate; give a horizon",
                    ));
                }
                rates / gamma
            }
        };
        let dt = match (&grid_cfg.dt, grid_cfg.steps) {
            (Some(_), Some(_)) => return Err(invalid("give grid.dt or grid.steps, not both")),
            (Some(dt), None) => dt.resolve(Dimension::Time)?,
            (None, Some(0)) => return Err(invalid("grid.steps must be positive")),
            (None, Some(n)) => horizon / n as f64,
            (None, None) => horizon / DEFAULT_STEPS as f64,
        };
        if !(dt > 0.0) {
            return Err(invalid("grid.dt must be positive"));
        }
        if dt > horizon {
            return Err(invalid("grid.dt exceeds the horizon"));
        }
        let grid = Grid::uniform(dt, horizon)?;
        let checkpoints = match &grid_cfg.checkpoints {
            None => even_checkpoints(&grid, 10),
            Some(Checkpoints::Count(0)) => return Err(invalid("checkpoint count must be positive")),
            Some(Checkpoints::Count(n)) => even_checkpoints(&grid, *n),
            Some(Checkpoints::Times(ts)) => {
                let mut idx = Vec::with_capacity(ts.len());
                for t in ts {
                    let t = t.resolve(Dimension::Time)?;
                    if !(0.0..=horizon).contains(&t) {
                        return Err(invalid(format!("checkpoint {t} lies outside [0, {horizon}]")));
                    }
                    idx.push(grid.nearest(t));
                }
                idx.sort_unstable();
                idx.dedup();
                idx
            }
        };
        Ok(Scenario {
            name: self.name.clone(),
            spectrum,
            rho0,
            model,
            lambda,
            grid,
            checkpoints,
            paths: self.paths,
            seed: self.seed,
            delta,
            output_dir: self.output_dir.clone(),
            config_hash: self.hash(),
        })
    }
}

fn even_checkpoints(grid: &Grid, n: usize) -> Vec<usize> {
    let horizon = grid.horizon();
    let mut idx: Vec<usize> = (1..=n).map(|k| grid.nearest(horizon * k as f64 / n as f64)).collect();
    idx.dedup();
    idx
}

/// Smallest `Γ_mn` over pairs of occupied levels, or zero if there is none.
pub fn slowest_rate(model: &Levy, levels: &[f64], prior: &[f64], lambda: f64) -> Result<f64, ConfigError> {
    let mut best = f64::INFINITY;
    for m in 0..levels.len() {
        for n in (m + 1)..levels.len() {
            if prior[m] > 0.0 && prior[n] > 0.0 {
                best = best.min(collapse_core::gamma_rate(model, lambda, levels[m], levels[n])?);
            }
        }
    }
    Ok(if best.is_finite() { best } else { 0.0 })
}

fn matrix(rows: &[Vec<Entry>], dim: Dimension, what: &str) -> Result<CMatrix<f64>, ConfigError> {
    let n = rows.len();
    if n == 0 {
        return Err(invalid(format!("{what} is empty")));
    }
    let mut out = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(invalid(format!("{what} must be square; row {} has {} entries", i + 1, row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            out[(i, j)] = e.resolve(dim)?;
        }
    }
    Ok(out)
}

impl SpectrumConfig {
    fn resolve(&self) -> Result<Spectrum, ConfigError> {
        match (&self.levels, &self.hamiltonian) {
            (Some(_), Some(_)) => Err(invalid("give spectrum.levels or spectrum.hamiltonian, not both")),
            (None, None) => Err(invalid("spectrum needs levels or a hamiltonian")),
            (None, Some(h)) => {
                if self.projectors.is_some() || self.multiplicities.is_some() {
                    return Err(invalid("projectors and multiplicities go with spectrum.levels"));
                }
                let h = matrix(h, Dimension::Energy, "spectrum.hamiltonian")?;
                Ok(match &self.degeneracy_tol {
                    Some(tol) => Spectrum::from_dense(&h, tol.resolve(Dimension::Energy)?)?,
                    None => Spectrum::from_dense_default(&h)?,
                })
            }
            (Some(levels), None) => {
                let levels: Vec<f64> = levels.iter().map(|q| q.resolve(Dimension::Energy)).collect::<Result<_, _>>()?;
                match (&self.projectors, &self.multiplicities) {
                    (Some(_), Some(_)) => Err(invalid("give projectors or multiplicities, not both")),
                    (Some(ps), None) => {
                        let ps = ps
                            .iter()
                            .enumerate()
                            .map(|(j, p)| matrix(p, Dimension::Dimensionless, &format!("projector {}", j + 1)))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(Spectrum::new(levels, ps, 1.0)?)
                    }
                    (None, mult) => {
                        let mult = mult.clone().unwrap_or_else(|| vec![1; levels.len()]);
                        if mult.len() != levels.len() {
                            return Err(invalid("multiplicities must match levels in length"));
                        }
                        if mult.contains(&0) {
                            return Err(invalid("multiplicities must be positive"));
                        }
                        if levels.windows(2).any(|w| !(w[0] < w[1])) {
                            return Err(invalid("levels must be strictly increasing"));
                        }
                        let diag: Vec<f64> =
                            levels.iter().zip(&mult).flat_map(|(e, k)| std::iter::repeat_n(*e, *k)).collect();
                        Ok(Spectrum::from_diagonal(&diag)?)
                    }
                }
            }
        }
    }
}

impl InitialStateConfig {
    fn resolve(&self, dim: usize) -> Result<Density, ConfigError> {
        let given = [self.amplitudes.is_some(), self.probabilities.is_some(), self.density.is_some()];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(invalid("initial_state needs exactly one of amplitudes, probabilities, density"));
        }
        let check = |n: usize| {
            if n == dim {
                Ok(())
            } else {
                Err(invalid(format!("initial state has dimension {n}, the Hamiltonian {dim}")))
            }
        };
        if let Some(a) = &self.amplitudes {
            check(a.len())?;
            let v = a.iter().map(|e| e.resolve(Dimension::Dimensionless)).collect::<Result<Vec<_>, _>>()?;
            let psi = Pure::new(collapse_core::CVector::from_vec(v))
                .map_err(|_| invalid("amplitudes must have unit norm"))?;
            return Ok(psi.to_density());
        }
        if let Some(p) = &self.probabilities {
            check(p.len())?;
            return Ok(Density::from_populations(p)?);
        }
        let rows = self.density.as_ref().expect("one field is present");
        check(rows.len())?;
        Ok(Density::new(matrix(rows, Dimension::Dimensionless, "initial_state.density")?)?)
    }
}

impl NoiseConfig {
    fn get(&self, field: &Option<Quantity>, name: &str, dim: Dimension) -> Result<f64, ConfigError> {
        field.as_ref().ok_or_else(|| invalid(format!("{} noise needs noise.{name}", self.kind)))?.resolve(dim)
    }

    fn opt(field: &Option<Quantity>, dim: Dimension, default: f64) -> Result<f64, ConfigError> {
        field.as_ref().map_or(Ok(default), |q| q.resolve(dim))
    }

    fn reject(&self, fields: &[(&str, bool)]) -> Result<(), ConfigError> {
        match fields.iter().find(|(_, present)| *present) {
            Some((name, _)) => Err(invalid(format!("{} noise has no parameter {name}", self.kind))),
            None => Ok(()),
        }
    }

    /// Returns the model and `λ`.
    pub fn resolve(&self) -> Result<(Levy, f64), ConfigError> {
        use Dimension::*;
        let kind = match self.kind.as_str() {
            "brownian" => {
                self.reject(&[("m", self.m.is_some()), ("beta", self.beta.is_some()), ("phi", self.phi.is_some())])?;
                LevyKind::Brownian {
                    p: Self::opt(&self.p, Dimensionless, 0.0)?,
                    q: Self::opt(&self.q, Dimensionless, 1.0)?,
                }
            }
            "poisson" => {
                self.reject(&[
                    ("p", self.p.is_some()),
                    ("q", self.q.is_some()),
                    ("beta", self.beta.is_some()),
                    ("phi", self.phi.is_some()),
                ])?;
                LevyKind::Poisson { m: self.get(&self.m, "m", Rate)? }
            }
            "compound-poisson-exp" => {
                self.reject(&[("p", self.p.is_some()), ("q", self.q.is_some()), ("phi", self.phi.is_some())])?;
                LevyKind::CompoundPoissonExp {
                    m: self.get(&self.m, "m", Rate)?,
                    beta: self.get(&self.beta, "beta", Dimensionless)?,
                }
            }
            "gamma" => {
                self.reject(&[("p", self.p.is_some()), ("q", self.q.is_some()), ("beta", self.beta.is_some())])?;
                LevyKind::Gamma { m: self.get(&self.m, "m", Rate)?, phi: self.get(&self.phi, "phi", Dimensionless)? }
            }
            other => {
                return Err(invalid(format!(
                    "unknown noise kind {other:?}; expected brownian, poisson, compound-poisson-exp or gamma"
                )))
            }
        };
        let model = Levy::from_kind(kind)?;
        let lambda = match (&self.lambda, &self.sigma) {
            (Some(_), Some(_)) => return Err(invalid("give noise.lambda or noise.sigma, not both")),
            (Some(l), None) => l.resolve(InverseEnergy)?,
            (None, Some(s)) => match kind {
                LevyKind::Brownian { q, .. } => s.resolve(InverseEnergy)? / q.sqrt(),
                _ => return Err(invalid("noise.sigma is defined for brownian noise only; give lambda")),
            },
            (None, None) => return Err(invalid("noise needs lambda (or sigma for brownian)")),
        };
        if !(lambda >= 0.0) {
            return Err(invalid("lambda must be nonnegative"));
        }
        Ok((model, lambda))
    }
}
