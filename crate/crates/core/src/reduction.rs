//! Closed-form reduction dynamics.
//!
//! Given `ξ_t`, the state is a deterministic function of `(ξ_t, t)`:
//! each `(m, n)` block of `ρ_0` in the energy frame is multiplied by
//! `e^{-i(E_m-E_n)t/ħ} e^{½(w_m + w_n)}` and the result renormalised, where
//! `w_k = λE_k ξ_t - ψ(λE_k) t`. Weights stay in log space throughout.

use crate::error::{Error, Result};
use crate::information::{InformationPath, Signal};
use crate::levy::{cantelli_bound, LevyModel};
use crate::quantum::{DensityMatrix, EnergySpectrum, PureState};
use crate::scalar::{creal, phase, CMatrix, Real};

/// Log-sum-exp normalised probabilities from log weights; `-∞` entries get
/// probability zero.
fn normalise_log_weights<T: Real>(logw: &[T]) -> Result<Vec<T>> {
    let max = logw.iter().copied().filter(|w| *w > -T::infinity()).fold(-T::infinity(), |a, b| a.max(b));
    if !(max > -T::infinity()) {
        return Err(Error::AllWeightsZeroProbability);
    }
    if !max.is_finite() {
        return Err(Error::DegenerateNormalization);
    }
    let raw: Vec<T> = logw.iter().map(|w| if *w > -T::infinity() { (*w - max).exp() } else { T::zero() }).collect();
    let total = raw.iter().fold(T::zero(), |a, b| a + *b);
    if !(total > T::zero()) || !total.is_finite() {
        return Err(Error::DegenerateNormalization);
    }
    Ok(raw.into_iter().map(|x| x / total).collect())
}

fn log_prior<T: Real>(p: T) -> T {
    if p > T::zero() {
        p.ln()
    } else {
        -T::infinity()
    }
}

/// Exponent coefficients `w_k(ξ, t) = κ_k ξ - ψ(κ_k) t` for every level.
#[derive(Debug, Clone)]
struct Likelihood<T> {
    kappa: Vec<T>,
    psi: Vec<T>,
}

impl<T: Real> Likelihood<T> {
    fn new(model: &LevyModel<T>, energies: &[T], lambda: T) -> Result<Self> {
        let kappa: Vec<T> = energies.iter().map(|e| lambda * *e).collect();
        let psi = kappa.iter().map(|k| model.psi(*k)).collect::<Result<Vec<T>>>()?;
        Ok(Self { kappa, psi })
    }

    fn w(&self, k: usize, xi: T, t: T) -> T {
        // λ = 0 or E = 0 must give exactly zero even when ξ is huge
        let a = if self.kappa[k] == T::zero() { T::zero() } else { self.kappa[k] * xi };
        let b = if self.psi[k] == T::zero() { T::zero() } else { self.psi[k] * t };
        a - b
    }
}

/// `π_{j,t} ∝ p_j exp(λE_j ξ_t - ψ(λE_j) t)`.
pub fn posterior_probabilities<T: Real>(model: &LevyModel<T>, signal: &Signal<T>, xi: T, t: T) -> Result<Vec<T>> {
    if !(t >= T::zero()) {
        return Err(Error::BadGrid("time must be nonnegative".into()));
    }
    let like = Likelihood::new(model, signal.energies(), signal.lambda())?;
    let logw: Vec<T> =
        signal.probabilities().iter().enumerate().map(|(k, p)| log_prior(*p) + like.w(k, xi, t)).collect();
    normalise_log_weights(&logw)
}

/// Precomputed closed-form filter for one `(model, spectrum, ρ_0, λ)`.
#[derive(Debug, Clone)]
pub struct Reducer<T: Real> {
    model: LevyModel<T>,
    spectrum: EnergySpectrum<T>,
    rho0_frame: CMatrix<T>,
    prior: Vec<T>,
    like: Likelihood<T>,
    lambda: T,
}

impl<T: Real> Reducer<T> {
    pub fn new(model: &LevyModel<T>, spectrum: &EnergySpectrum<T>, rho0: &DensityMatrix<T>, lambda: T) -> Result<Self> {
        let prior = spectrum.probabilities(rho0)?;
        let total = prior.iter().fold(T::zero(), |a, b| a + *b);
        let prior = prior.into_iter().map(|p| p / total).collect();
        let like = Likelihood::new(model, spectrum.levels(), lambda)?;
        Ok(Self {
            model: *model,
            spectrum: spectrum.clone(),
            rho0_frame: spectrum.to_frame(rho0.matrix()),
            prior,
            like,
            lambda,
        })
    }

    pub fn model(&self) -> &LevyModel<T> {
        &self.model
    }

    pub fn spectrum(&self) -> &EnergySpectrum<T> {
        &self.spectrum
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// `p_j = tr(Π_j ρ_0)`.
    pub fn prior(&self) -> &[T] {
        &self.prior
    }

    /// Prior as a [`Signal`].
    pub fn signal(&self) -> Result<Signal<T>> {
        Signal::new(self.spectrum.levels().to_vec(), self.prior.clone(), self.lambda)
    }

    fn log_weights(&self, xi: T, t: T) -> Vec<T> {
        self.prior.iter().enumerate().map(|(k, p)| log_prior(*p) + self.like.w(k, xi, t)).collect()
    }

    pub fn posteriors(&self, xi: T, t: T) -> Result<Vec<T>> {
        normalise_log_weights(&self.log_weights(xi, t))
    }

    /// `ρ_t` in the energy frame (columns of [`EnergySpectrum::frame`]).
    pub fn state_in_frame(&self, xi: T, t: T) -> Result<CMatrix<T>> {
        let logw = self.log_weights(xi, t);
        let max = logw.iter().copied().fold(-T::infinity(), |a, b| a.max(b));
        if !(max > -T::infinity()) {
            return Err(Error::AllWeightsZeroProbability);
        }
        let total = logw.iter().filter(|w| **w > -T::infinity()).fold(T::zero(), |a, w| a + (*w - max).exp());
        if !(total > T::zero()) || !total.is_finite() {
            return Err(Error::DegenerateNormalization);
        }
        let log_total = total.ln();
        let half = T::lit(0.5);
        // per level: amplitude factor e^{½(w_k - log Z)} and phase angle E_k t/ħ.
        // `max` is subtracted before anything else: when |w| is large, folding
        // it into log Z first would cost absolute precision.
        let scale: Vec<T> = (0..self.prior.len())
            .map(|k| {
                if self.prior[k] > T::zero() {
                    (half * ((logw[k] - max) - log_total - log_prior(self.prior[k]))).exp()
                } else {
                    T::zero()
                }
            })
            .collect();
        let levels = self.spectrum.levels();
        let hbar = self.spectrum.hbar();
        let of = self.spectrum.level_of();
        let d = of.len();
        Ok(CMatrix::from_fn(d, d, |a, b| {
            let (m, n) = (of[a], of[b]);
            let s = scale[m] * scale[n];
            if s == T::zero() {
                return creal(T::zero());
            }
            let z = self.rho0_frame[(a, b)] * s;
            if m == n {
                z
            } else {
                z * phase((levels[m] - levels[n]) * t / hbar)
            }
        }))
    }

    pub fn state(&self, xi: T, t: T) -> Result<DensityMatrix<T>> {
        let frame = self.state_in_frame(xi, t)?;
        DensityMatrix::new(self.spectrum.from_frame(&frame))
    }
}

/// Closed-form `ρ_t` given `ξ_t`.
pub fn evolve_density<T: Real>(
    model: &LevyModel<T>,
    signal: &Signal<T>,
    rho0: &DensityMatrix<T>,
    spectrum: &EnergySpectrum<T>,
    xi: T,
    t: T,
) -> Result<DensityMatrix<T>> {
    if signal.n_levels() != spectrum.n_levels() {
        return Err(Error::DimensionMismatch { expected: spectrum.n_levels(), found: signal.n_levels() });
    }
    Reducer::new(model, spectrum, rho0, signal.lambda())?.state(xi, t)
}

/// Closed-form `|ψ_t⟩ = Σ_j √π_j e^{-iE_j t/ħ} Π_j|ψ_0⟩ / √p_j`.
pub fn evolve_state_vector<T: Real>(
    model: &LevyModel<T>,
    signal: &Signal<T>,
    psi0: &PureState<T>,
    spectrum: &EnergySpectrum<T>,
    xi: T,
    t: T,
) -> Result<PureState<T>> {
    if psi0.dim() != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: spectrum.dim(), found: psi0.dim() });
    }
    let rho0 = psi0.to_density();
    let reducer = Reducer::new(model, spectrum, &rho0, signal.lambda())?;
    let post = reducer.posteriors(xi, t)?;
    let c = spectrum.vector_to_frame(psi0.amplitudes());
    let levels = spectrum.levels();
    let hbar = spectrum.hbar();
    let of = spectrum.level_of();
    let out = c.map_with_location(|a, _, z| {
        let k = of[a];
        let p = reducer.prior[k];
        if p > T::zero() {
            z * (post[k] / p).sqrt() * phase(levels[k] * t / hbar)
        } else {
            creal(T::zero())
        }
    });
    PureState::normalized(spectrum.vector_from_frame(&out))
}

/// Index `j` with `π_j > 1 - δ`, if any.
pub fn detect_collapse<T: Real>(posteriors: &[T], delta: T) -> Option<usize> {
    let threshold = T::one() - delta;
    posteriors.iter().position(|p| *p > threshold)
}

/// Posterior and state history of one path.
#[derive(Debug, Clone)]
pub struct ReductionPath<T: Real> {
    pub times: Vec<T>,
    pub posteriors: Vec<Vec<T>>,
    pub states: Option<Vec<DensityMatrix<T>>>,
    pub collapse_outcome: Option<usize>,
    pub driving_path: InformationPath<T>,
}

impl<T: Real> ReductionPath<T> {
    /// `H_t = Σ_j E_j π_{j,t}` along the path.
    pub fn mean_energy(&self, levels: &[T]) -> Vec<T> {
        self.posteriors.iter().map(|p| levels.iter().zip(p).fold(T::zero(), |a, (e, w)| a + *e * *w)).collect()
    }

    /// `V_t = Σ_j (E_j - H_t)² π_{j,t}` along the path.
    pub fn energy_variance(&self, levels: &[T]) -> Vec<T> {
        self.posteriors
            .iter()
            .map(|p| {
                let h = levels.iter().zip(p).fold(T::zero(), |a, (e, w)| a + *e * *w);
                levels.iter().zip(p).fold(T::zero(), |a, (e, w)| a + (*e - h) * (*e - h) * *w)
            })
            .collect()
    }
}

/// Runs the closed-form filter along `path`.
pub fn reduce_path<T: Real>(
    reducer: &Reducer<T>,
    path: &InformationPath<T>,
    delta: T,
    keep_states: bool,
) -> Result<ReductionPath<T>> {
    let mut posteriors = Vec::with_capacity(path.len());
    let mut states = keep_states.then(|| Vec::with_capacity(path.len()));
    for (t, xi) in path.records() {
        posteriors.push(reducer.posteriors(xi, t)?);
        if let Some(s) = states.as_mut() {
            s.push(reducer.state(xi, t)?);
        }
    }
    let collapse_outcome = detect_collapse(posteriors.last().expect("non-empty path"), delta);
    Ok(ReductionPath { times: path.times().to_vec(), posteriors, states, collapse_outcome, driving_path: path.clone() })
}

/// Upper bound on `P(π_{j,t} < 1 - ε | H = E_j)`.
///
/// Given `H = E_j`, the likelihood ratio `π_i p_j / (π_j p_i)` is the
/// exponential martingale of the tilted process with `κ = λ(E_i - E_j)`, so
/// a union over `i ≠ j` of Cantelli bounds applies.
pub fn branch_reduction_bound<T: Real>(
    model: &LevyModel<T>,
    signal: &Signal<T>,
    j: usize,
    epsilon: T,
    t: T,
) -> Result<T> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)".into()));
    }
    let kj = signal.kappa(j)?;
    let pj = signal.probabilities()[j];
    if !(pj > T::zero()) {
        return Err(Error::ZeroProbabilityBranch { level: j, probability: pj.to_f64_lossy() });
    }
    let tilted = model.esscher(kj)?;
    let others = signal.probabilities().iter().enumerate().filter(|(i, p)| *i != j && **p > T::zero()).count();
    if others == 0 {
        return Ok(T::zero());
    }
    let share = epsilon / ((T::one() - epsilon) * T::lit(others as f64));
    let mut total = T::zero();
    for (i, pi) in signal.probabilities().iter().enumerate() {
        if i == j || !(*pi > T::zero()) {
            continue;
        }
        let kappa = signal.kappa(i)? - kj;
        if kappa == T::zero() {
            return Ok(T::one());
        }
        total += cantelli_bound(&tilted, kappa, share * pj / *pi, t)?;
    }
    Ok(total.min(T::one()))
}
