//! Lévy information processes: `ξ_t` is conditionally Lévy given the energy,
//! with exponent `ψ(α + λH) - ψ(λH)`.

use crate::error::{Error, Result};
use crate::levy::{sample_increment, LevyModel};
use crate::quantum::{DensityMatrix, EnergySpectrum};
use crate::scalar::Real;
use rand::Rng;

/// The random energy `H` as a finite prior over levels, with its coupling λ.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    energies: Vec<T>,
    probabilities: Vec<T>,
    lambda: T,
}

impl<T: Real> Signal<T> {
    pub fn new(energies: Vec<T>, probabilities: Vec<T>, lambda: T) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::InvalidSignal("no energy levels".into()));
        }
        if energies.len() != probabilities.len() {
            return Err(Error::DimensionMismatch { expected: energies.len(), found: probabilities.len() });
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidSignal("lambda must be finite".into()));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidSignal("energies must be finite".into()));
        }
        if probabilities.iter().any(|p| !(*p >= T::zero())) {
            return Err(Error::InvalidSignal("probabilities must be nonnegative".into()));
        }
        let total = probabilities.iter().fold(T::zero(), |a, p| a + *p);
        if !((total - T::one()).abs() <= T::tol(1e-12)) {
            return Err(Error::InvalidSignal(format!("probabilities sum to {}", total.to_f64_lossy())));
        }
        Ok(Self { energies, probabilities, lambda })
    }

    /// Prior `p_j = tr(Π_j ρ_0)` over the levels of `spectrum`, renormalised
    /// to remove rounding.
    pub fn from_state(spectrum: &EnergySpectrum<T>, rho0: &DensityMatrix<T>, lambda: T) -> Result<Self> {
        let mut p = spectrum.probabilities(rho0)?;
        let total = p.iter().fold(T::zero(), |a, x| a + *x);
        for x in &mut p {
            *x /= total;
        }
        Self::new(spectrum.levels().to_vec(), p, lambda)
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn n_levels(&self) -> usize {
        self.energies.len()
    }

    /// `λE_j`.
    pub fn kappa(&self, j: usize) -> Result<T> {
        self.energies
            .get(j)
            .map(|e| self.lambda * *e)
            .ok_or(Error::IndexOutOfRange { index: j, levels: self.energies.len() })
    }

    /// Checks `λE_j ∈ C` for every level.
    pub fn check_domain(&self, model: &LevyModel<T>) -> Result<()> {
        for e in &self.energies {
            model.check_domain(self.lambda * *e)?;
        }
        Ok(())
    }
}

/// Sampling times `0 = t_0 < t_1 < … < t_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    times: Vec<T>,
}

impl<T: Real> TimeGrid<T> {
    pub fn from_times(times: Vec<T>) -> Result<Self> {
        match times.first() {
            None => return Err(Error::BadGrid("no times".into())),
            Some(t0) if *t0 != T::zero() => return Err(Error::BadGrid("grid must start at t = 0".into())),
            _ => {}
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::BadGrid("times must be finite".into()));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::BadGrid("times must be strictly increasing".into()));
        }
        Ok(Self { times })
    }

    /// `0, dt, 2dt, …` up to `horizon`; the final step is shortened if
    /// `horizon` is not a multiple of `dt`.
    pub fn uniform(dt: T, horizon: T) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::NonpositiveTimestep(dt.to_f64_lossy()));
        }
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(Error::BadGrid("horizon must be positive".into()));
        }
        let ratio = (horizon / dt).to_f64_lossy();
        let steps =
            if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) { ratio.round() } else { ratio.ceil() } as usize;
        let steps = steps.max(1);
        let mut times: Vec<T> = (0..steps).map(|k| dt * T::lit(k as f64)).collect();
        times.push(horizon);
        Self::from_times(times)
    }

    /// Sorted, deduplicated grid through `0` and the given times.
    pub fn through(times: &[T]) -> Result<Self> {
        let mut all = vec![T::zero()];
        all.extend(times.iter().copied().filter(|t| *t > T::zero()));
        all.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        all.dedup();
        Self::from_times(all)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> T {
        *self.times.last().expect("grid is never empty")
    }

    /// Index of the grid time closest to `t`.
    pub fn nearest(&self, t: T) -> usize {
        let mut best = 0;
        for (i, s) in self.times.iter().enumerate() {
            if (*s - t).abs() < (self.times[best] - t).abs() {
                best = i;
            }
        }
        best
    }
}

/// A sampled trajectory of `ξ` on a grid, with the outcome it was
/// conditioned on.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationPath<T> {
    times: Vec<T>,
    values: Vec<T>,
    outcome: usize,
    model: LevyModel<T>,
}

impl<T: Real> InformationPath<T> {
    /// Wraps precomputed values. `values[0]` must be zero.
    pub fn new(grid: &TimeGrid<T>, values: Vec<T>, outcome: usize, model: LevyModel<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        if values[0] != T::zero() {
            return Err(Error::InvalidSignal("path must start at zero".into()));
        }
        Ok(Self { times: grid.times().to_vec(), values, outcome, model })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn outcome(&self) -> usize {
        self.outcome
    }

    pub fn model(&self) -> &LevyModel<T> {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> (T, T) {
        let i = self.times.len() - 1;
        (self.times[i], self.values[i])
    }

    /// `(t, ξ_t)` rows.
    pub fn records(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Keeps every `stride`-th point (and always the first).
    pub fn subsample(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        let pick = |v: &[T]| v.iter().step_by(stride).copied().collect::<Vec<_>>();
        Self { times: pick(&self.times), values: pick(&self.values), outcome: self.outcome, model: self.model }
    }
}

/// Draws a level index with probability `p_j`.
pub fn sample_outcome<T: Real, R: Rng + ?Sized>(signal: &Signal<T>, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    let mut last_supported = 0;
    for (j, p) in signal.probabilities().iter().enumerate() {
        let p = p.to_f64_lossy();
        if p <= 0.0 {
            continue;
        }
        last_supported = j;
        cum += p;
        if u < cum {
            return j;
        }
    }
    last_supported
}

/// Samples `ξ` on `grid` given `H = E_outcome`, using the Esscher-tilted law
/// with `κ = λE_outcome`.
pub fn sample_information_path<T: Real, R: Rng + ?Sized>(
    model: &LevyModel<T>,
    signal: &Signal<T>,
    outcome: usize,
    grid: &TimeGrid<T>,
    rng: &mut R,
) -> Result<InformationPath<T>> {
    let kappa = signal.kappa(outcome)?;
    let tilted = model.esscher(kappa)?;
    let times = grid.times();
    let mut values = Vec::with_capacity(times.len());
    values.push(T::zero());
    let mut xi = T::zero();
    for w in times.windows(2) {
        xi += sample_increment(&tilted, w[1] - w[0], rng)?;
        values.push(xi);
    }
    Ok(InformationPath { times: times.to_vec(), values, outcome, model: *model })
}

/// `ψ(α + λH) - ψ(λH)`.
pub fn conditional_exponent<T: Real>(model: &LevyModel<T>, lambda_h: T, alpha: T) -> Result<T> {
    model.conditional_exponent(lambda_h, alpha)
}

/// `W_t = ξ_t - σ ∫_0^t H_s ds`, trapezoid rule on the path's grid.
///
/// For Brownian noise with `p = 0`, `q = 1` and `σ = λ` this is a standard
/// Brownian motion when `H_s` is the filtered energy.
pub fn innovations_path<T: Real>(path: &InformationPath<T>, posterior_energy: &[T], sigma: T) -> Result<Vec<T>> {
    if !path.model().is_brownian() {
        return Err(Error::WrongNoiseKind);
    }
    if posterior_energy.len() != path.len() {
        return Err(Error::DimensionMismatch { expected: path.len(), found: posterior_energy.len() });
    }
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(path.len());
    let mut integral = T::zero();
    out.push(path.values[0]);
    for i in 1..path.len() {
        let dt = path.times[i] - path.times[i - 1];
        integral += half * (posterior_energy[i] + posterior_energy[i - 1]) * dt;
        out.push(path.values[i] - sigma * integral);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_level(p2: f64, lambda: f64) -> Signal<f64> {
        Signal::new(vec![0.0, 1.0], vec![1.0 - p2, p2], lambda).unwrap()
    }

    #[test]
    fn signal_validation() {
        assert!(Signal::new(vec![0.0, 1.0], vec![0.5, 0.6], 1.0).is_err());
        assert!(Signal::new(vec![0.0, 1.0], vec![-0.1, 1.1], 1.0).is_err());
        assert!(Signal::new(vec![0.0], vec![0.5, 0.5], 1.0).is_err());
        let s = Signal::new(vec![0.0, 1.5], vec![0.5, 0.5], 1.0).unwrap();
        let gamma = LevyModel::gamma(1.0, 1.0).unwrap();
        assert!(matches!(s.check_domain(&gamma), Err(Error::OutsideExponentDomain { .. })));
        assert!(s.check_domain(&LevyModel::poisson(1.0).unwrap()).is_ok());
    }

    #[test]
    fn grid_construction() {
        let g = TimeGrid::uniform(0.1, 1.0).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g.horizon(), 1.0);
        let g = TimeGrid::uniform(0.3, 1.0).unwrap();
        assert_eq!(g.times().len(), 5);
        assert!(TimeGrid::from_times(vec![0.0, 1.0, 1.0]).is_err());
        assert!(TimeGrid::from_times(vec![0.5, 1.0]).is_err());
        let g = TimeGrid::through(&[2.0, 1.0, 2.0]).unwrap();
        assert_eq!(g.times(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn degenerate_prior_always_picks_supported_level() {
        let s = two_level(0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!((0..1000).all(|_| sample_outcome(&s, &mut rng) == 0));
    }

    #[test]
    fn outcome_frequency() {
        let s = two_level(0.7, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 100_000;
        let hits = (0..n).filter(|_| sample_outcome(&s, &mut rng) == 1).count();
        let f = hits as f64 / n as f64;
        assert!((f - 0.7).abs() < 3.0 * (0.21f64 / n as f64).sqrt());
    }

    #[test]
    fn poisson_path_mean_count() {
        let model = LevyModel::poisson(1.0).unwrap();
        let s = Signal::new(vec![0.0, 1.0], vec![0.5, 0.5], 2f64.ln()).unwrap();
        let grid = TimeGrid::uniform(1.0, 10.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 2000;
        let mut total = 0.0;
        for _ in 0..n {
            let path = sample_information_path(&model, &s, 1, &grid, &mut rng).unwrap();
            assert!(path.values().windows(2).all(|w| w[1] >= w[0]));
            total += path.last().1;
        }
        let mean = total / n as f64;
        assert!((mean - 20.0).abs() < 3.0 * (20.0f64 / n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn innovations_identities() {
        let model = LevyModel::brownian(0.0, 1.0).unwrap();
        let s = two_level(0.5, 1.0);
        let grid = TimeGrid::uniform(0.01, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let path = sample_information_path(&model, &s, 1, &grid, &mut rng).unwrap();
        let w = innovations_path(&path, &vec![0.0; path.len()], 1.0).unwrap();
        assert_eq!(w, path.values());
        let w = innovations_path(&path, &vec![0.3; path.len()], 2.0).unwrap();
        for (i, t) in path.times().iter().enumerate() {
            assert!((w[i] - (path.values()[i] - 0.6 * t)).abs() < 1e-12);
        }
        let jump = LevyModel::poisson(1.0).unwrap();
        let jp = sample_information_path(&jump, &s, 0, &grid, &mut rng).unwrap();
        assert_eq!(innovations_path(&jp, &vec![0.0; jp.len()], 1.0), Err(Error::WrongNoiseKind));
    }
}
