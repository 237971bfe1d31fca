//! Monte Carlo ensembles of independent reduction paths.
//!
//! Each path draws its true level from the prior, samples the information
//! process conditioned on that level, and runs the closed-form filter along
//! it. Paths are processed in parallel in fixed chunks of [`CHUNK`]; the
//! chunk results are merged sequentially, so the output does not depend on
//! how many threads ran them.

use collapse_core::information::{sample_information_path, sample_outcome};
use collapse_core::stats::CompensatedSum;
use collapse_core::{detect_collapse, CMatrix, Reducer, C};
use rayon::prelude::*;

use crate::config::Scenario;
use crate::constants::CHUNK;
use crate::rng::{path_rng, path_seed};

#[derive(Debug, thiserror::Error)]
pub enum EnsembleError {
    #[error("path {index}: {source}")]
    Path { index: usize, source: collapse_core::Error },
    #[error(transparent)]
    Setup(#[from] collapse_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleOptions {
    /// Build and validate `ρ_t` at every grid time and average it.
    pub track_density: bool,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self { track_density: true }
    }
}

/// One path of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub index: usize,
    pub seed: u64,
    /// Level drawn from the prior that drives the information process.
    pub true_outcome: usize,
    /// Level with `π_j > 1 - δ` at the horizon, if any.
    pub collapse_outcome: Option<usize>,
    /// First grid time at which the path counted as collapsed.
    pub collapse_time: Option<f64>,
    pub final_xi: f64,
    pub final_posteriors: Vec<f64>,
    /// `H_t` at each checkpoint.
    pub checkpoint_h: Vec<f64>,
    /// `V_t` at each checkpoint.
    pub checkpoint_v: Vec<f64>,
    /// `ρ_t` at each checkpoint; empty unless densities are tracked.
    pub checkpoint_states: Vec<CMatrix<f64>>,
}

/// Worst-case invariant violations over every state produced.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InvariantStats {
    pub states_checked: u64,
    pub posteriors_checked: u64,
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
    pub max_hermitian_error: f64,
    pub max_posterior_sum_error: f64,
    pub min_posterior: f64,
}

impl InvariantStats {
    pub fn empty() -> Self {
        Self { min_eigenvalue: f64::INFINITY, min_posterior: f64::INFINITY, ..Default::default() }
    }

    pub fn merge(&mut self, o: &Self) {
        self.states_checked += o.states_checked;
        self.posteriors_checked += o.posteriors_checked;
        self.max_trace_error = self.max_trace_error.max(o.max_trace_error);
        self.min_eigenvalue = self.min_eigenvalue.min(o.min_eigenvalue);
        self.max_hermitian_error = self.max_hermitian_error.max(o.max_hermitian_error);
        self.max_posterior_sum_error = self.max_posterior_sum_error.max(o.max_posterior_sum_error);
        self.min_posterior = self.min_posterior.min(o.min_posterior);
    }

    /// Trace within 1e-10, eigenvalues above -1e-10, posteriors summing to
    /// one within 1e-12 and nonnegative.
    pub fn holds(&self) -> bool {
        self.max_trace_error <= 1e-10
            && self.max_hermitian_error <= 1e-10
            && (self.states_checked == 0 || self.min_eigenvalue >= -1e-10)
            && self.max_posterior_sum_error <= 1e-12
            && (self.posteriors_checked == 0 || self.min_posterior >= 0.0)
    }
}

/// Ensemble averages at every grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub mean_h: Vec<f64>,
    pub se_h: Vec<f64>,
    pub mean_v: Vec<f64>,
    pub se_v: Vec<f64>,
    /// `collapsed[k][j]`: fraction of paths collapsed onto level `j` at
    /// grid time `k`.
    pub collapsed: Vec<Vec<f64>>,
    /// Ensemble-mean `ρ_t`, when densities are tracked.
    pub mean_density: Option<Vec<CMatrix<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub scenario: String,
    pub config_hash: String,
    pub version: &'static str,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub provenance: Provenance,
    pub times: Vec<f64>,
    pub checkpoints: Vec<usize>,
    pub levels: Vec<f64>,
    pub prior: Vec<f64>,
    pub delta: f64,
    pub records: Vec<PathRecord>,
    pub series: Series,
    pub invariants: InvariantStats,
}

impl EnsembleResult {
    pub fn paths(&self) -> usize {
        self.records.len()
    }

    pub fn checkpoint_times(&self) -> Vec<f64> {
        self.checkpoints.iter().map(|&k| self.times[k]).collect()
    }

    /// Number of paths collapsed onto each level at the horizon.
    pub fn outcome_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.levels.len()];
        for r in &self.records {
            if let Some(j) = r.collapse_outcome {
                counts[j] += 1;
            }
        }
        counts
    }

    pub fn collapsed_fraction(&self) -> f64 {
        self.outcome_counts().iter().sum::<u64>() as f64 / self.paths() as f64
    }
}

/// Full time series of a single path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace {
    pub record: PathRecord,
    pub times: Vec<f64>,
    pub xi: Vec<f64>,
    pub posteriors: Vec<Vec<f64>>,
    pub h: Vec<f64>,
    pub v: Vec<f64>,
    pub states: Vec<CMatrix<f64>>,
}

fn moments(levels: &[f64], p: &[f64]) -> (f64, f64) {
    let h: f64 = levels.iter().zip(p).map(|(e, w)| e * w).sum();
    let v: f64 = levels.iter().zip(p).map(|(e, w)| (e - h) * (e - h) * w).sum();
    (h, v)
}

/// Per-time sums over the paths of one chunk.
struct Accumulator {
    h: Vec<CompensatedSum>,
    h2: Vec<CompensatedSum>,
    v: Vec<CompensatedSum>,
    v2: Vec<CompensatedSum>,
    collapsed: Vec<Vec<u64>>,
    density: Option<Vec<Vec<(CompensatedSum, CompensatedSum)>>>,
    invariants: InvariantStats,
}

impl Accumulator {
    fn new(len: usize, levels: usize, dim: Option<usize>) -> Self {
        Self {
            h: vec![CompensatedSum::default(); len],
            h2: vec![CompensatedSum::default(); len],
            v: vec![CompensatedSum::default(); len],
            v2: vec![CompensatedSum::default(); len],
            collapsed: vec![vec![0; levels]; len],
            density: dim.map(|d| vec![vec![(CompensatedSum::default(), CompensatedSum::default()); d * d]; len]),
            invariants: InvariantStats::empty(),
        }
    }

    fn merge(&mut self, o: &Self) {
        fn fold(a: &mut [CompensatedSum], b: &[CompensatedSum]) {
            for (x, y) in a.iter_mut().zip(b) {
                x.add(y.value());
            }
        }
        fold(&mut self.h, &o.h);
        fold(&mut self.h2, &o.h2);
        fold(&mut self.v, &o.v);
        fold(&mut self.v2, &o.v2);
        for (a, b) in self.collapsed.iter_mut().zip(&o.collapsed) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        if let (Some(a), Some(b)) = (self.density.as_mut(), o.density.as_ref()) {
            for (row_a, row_b) in a.iter_mut().zip(b) {
                for ((re, im), (re_b, im_b)) in row_a.iter_mut().zip(row_b) {
                    re.add(re_b.value());
                    im.add(im_b.value());
                }
            }
        }
        self.invariants.merge(&o.invariants);
    }
}

/// Shared per-ensemble state.
struct Context<'a> {
    scenario: &'a Scenario,
    reducer: Reducer<f64>,
    signal: collapse_core::Sig,
}

impl<'a> Context<'a> {
    fn new(scenario: &'a Scenario) -> Result<Self, EnsembleError> {
        let reducer = Reducer::new(&scenario.model, &scenario.spectrum, &scenario.rho0, scenario.lambda)?;
        let signal = reducer.signal()?;
        signal.check_domain(&scenario.model)?;
        Ok(Self { scenario, reducer, signal })
    }

    /// Runs path `index`, feeding every grid time to `visit`.
    fn run<F>(&self, index: usize, track_density: bool, mut visit: F) -> Result<PathRecord, collapse_core::Error>
    where
        F: FnMut(usize, f64, &[f64], Option<&collapse_core::Density>),
    {
        let s = self.scenario;
        let mut rng = path_rng(s.seed, index as u64);
        let outcome = sample_outcome(&self.signal, &mut rng);
        let path = sample_information_path(&s.model, &self.signal, outcome, &s.grid, &mut rng)?;
        let levels = s.levels();
        let mut record = PathRecord {
            index,
            seed: path_seed(s.seed, index as u64),
            true_outcome: outcome,
            collapse_outcome: None,
            collapse_time: None,
            final_xi: 0.0,
            final_posteriors: Vec::new(),
            checkpoint_h: Vec::with_capacity(s.checkpoints.len()),
            checkpoint_v: Vec::with_capacity(s.checkpoints.len()),
            checkpoint_states: Vec::new(),
        };
        let mut next_checkpoint = 0;
        for (k, (t, xi)) in path.records().enumerate() {
            let post = self.reducer.posteriors(xi, t)?;
            let state = if track_density { Some(self.reducer.state(xi, t)?) } else { None };
            let collapsed = detect_collapse(&post, s.delta);
            if collapsed.is_some() && record.collapse_time.is_none() {
                record.collapse_time = Some(t);
            }
            if s.checkpoints.get(next_checkpoint) == Some(&k) {
                let (h, v) = moments(levels, &post);
                record.checkpoint_h.push(h);
                record.checkpoint_v.push(v);
                if let Some(st) = &state {
                    record.checkpoint_states.push(st.matrix().clone());
                }
                next_checkpoint += 1;
            }
            visit(k, t, &post, state.as_ref());
            if k + 1 == path.len() {
                record.collapse_outcome = collapsed;
                record.final_xi = xi;
                record.final_posteriors = post;
            }
        }
        Ok(record)
    }
}

fn observe(
    acc: &mut Accumulator,
    levels: &[f64],
    delta: f64,
    k: usize,
    post: &[f64],
    state: Option<&collapse_core::Density>,
) {
    let (h, v) = moments(levels, post);
    acc.h[k].add(h);
    acc.h2[k].add(h * h);
    acc.v[k].add(v);
    acc.v2[k].add(v * v);
    if let Some(j) = detect_collapse(post, delta) {
        acc.collapsed[k][j] += 1;
    }
    let inv = &mut acc.invariants;
    inv.posteriors_checked += 1;
    let total: f64 = post.iter().sum();
    inv.max_posterior_sum_error = inv.max_posterior_sum_error.max((total - 1.0).abs());
    inv.min_posterior = post.iter().fold(inv.min_posterior, |a, b| a.min(*b));
    if let Some(st) = state {
        inv.states_checked += 1;
        inv.max_trace_error = inv.max_trace_error.max((st.trace() - 1.0).abs());
        inv.min_eigenvalue = inv.min_eigenvalue.min(st.min_eigenvalue());
        let m = st.matrix();
        let herm = (m - m.adjoint()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        inv.max_hermitian_error = inv.max_hermitian_error.max(herm);
        if let Some(dens) = acc.density.as_mut() {
            for (cell, z) in dens[k].iter_mut().zip(m.iter()) {
                cell.0.add(z.re);
                cell.1.add(z.im);
            }
        }
    }
}

fn finish_mean(sum: &CompensatedSum, sum2: &CompensatedSum, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum.value() / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((sum2.value() - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

pub fn run_ensemble(scenario: &Scenario) -> Result<EnsembleResult, EnsembleError> {
    run_ensemble_with(scenario, EnsembleOptions::default())
}

pub fn run_ensemble_with(scenario: &Scenario, options: EnsembleOptions) -> Result<EnsembleResult, EnsembleError> {
    let ctx = Context::new(scenario)?;
    let len = scenario.grid.len();
    let levels = scenario.levels();
    let n_levels = levels.len();
    let dim = options.track_density.then(|| scenario.spectrum.dim());
    let n = scenario.paths;
    let chunks: Vec<(usize, usize)> = (0..n).step_by(CHUNK).map(|a| (a, (a + CHUNK).min(n))).collect();
    let results: Vec<Result<(Accumulator, Vec<PathRecord>), EnsembleError>> = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut acc = Accumulator::new(len, n_levels, dim);
            let mut records = Vec::with_capacity(b - a);
            for index in a..b {
                let record = ctx
                    .run(index, options.track_density, |k, _, post, state| {
                        observe(&mut acc, levels, scenario.delta, k, post, state)
                    })
                    .map_err(|source| EnsembleError::Path { index, source })?;
                records.push(record);
            }
            Ok((acc, records))
        })
        .collect();

    let mut total = Accumulator::new(len, n_levels, dim);
    let mut records = Vec::with_capacity(n);
    for r in results {
        let (acc, recs) = r?;
        total.merge(&acc);
        records.extend(recs);
    }

    let mut series = Series {
        mean_h: Vec::with_capacity(len),
        se_h: Vec::with_capacity(len),
        mean_v: Vec::with_capacity(len),
        se_v: Vec::with_capacity(len),
        collapsed: Vec::with_capacity(len),
        mean_density: None,
    };
    for k in 0..len {
        let (mh, sh) = finish_mean(&total.h[k], &total.h2[k], n);
        let (mv, sv) = finish_mean(&total.v[k], &total.v2[k], n);
        series.mean_h.push(mh);
        series.se_h.push(sh);
        series.mean_v.push(mv);
        series.se_v.push(sv);
        series.collapsed.push(total.collapsed[k].iter().map(|c| *c as f64 / n as f64).collect());
    }
    if let (Some(d), Some(dens)) = (dim, total.density.as_ref()) {
        series.mean_density = Some(
            dens.iter()
                .map(|cells| {
                    CMatrix::from_iterator(d, d, cells.iter().map(|(re, im)| C::new(re.value(), im.value()) / n as f64))
                })
                .collect(),
        );
    }
    Ok(EnsembleResult {
        provenance: Provenance {
            scenario: scenario.name.clone(),
            config_hash: scenario.config_hash.clone(),
            version: env!("CARGO_PKG_VERSION"),
            seed: scenario.seed,
        },
        times: scenario.grid.times().to_vec(),
        checkpoints: scenario.checkpoints.clone(),
        levels: levels.to_vec(),
        prior: scenario.prior(),
        delta: scenario.delta,
        records,
        series,
        invariants: total.invariants,
    })
}

/// One path with its full time series.
pub fn simulate_path(scenario: &Scenario, index: usize) -> Result<PathTrace, EnsembleError> {
    let ctx = Context::new(scenario)?;
    let levels = scenario.levels();
    let mut trace = PathTrace {
        record: PathRecord {
            index,
            seed: 0,
            true_outcome: 0,
            collapse_outcome: None,
            collapse_time: None,
            final_xi: 0.0,
            final_posteriors: Vec::new(),
            checkpoint_h: Vec::new(),
            checkpoint_v: Vec::new(),
            checkpoint_states: Vec::new(),
        },
        times: Vec::new(),
        xi: Vec::new(),
        posteriors: Vec::new(),
        h: Vec::new(),
        v: Vec::new(),
        states: Vec::new(),
    };
    let mut times = Vec::new();
    let mut posteriors = Vec::new();
    let mut states = Vec::new();
    let record = ctx
        .run(index, true, |_, t, post, state| {
            times.push(t);
            posteriors.push(post.to_vec());
            if let Some(s) = state {
                states.push(s.matrix().clone());
            }
        })
        .map_err(|source| EnsembleError::Path { index, source })?;
    // ξ is recovered from the same stream for the output file
    let mut rng = path_rng(scenario.seed, index as u64);
    let outcome = sample_outcome(&ctx.signal, &mut rng);
    let path = sample_information_path(&scenario.model, &ctx.signal, outcome, &scenario.grid, &mut rng)?;
    for p in &posteriors {
        let (h, v) = moments(levels, p);
        trace.h.push(h);
        trace.v.push(v);
    }
    trace.xi = path.values().to_vec();
    trace.record = record;
    trace.times = times;
    trace.posteriors = posteriors;
    trace.states = states;
    Ok(trace)
}
