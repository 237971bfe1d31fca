//! Mean-density dynamics: decoherence rates `Γ_mn`, the Lindblad generator
//! and the atomic-clock bound on the collapse rate.

use crate::error::{Error, Result};
use crate::levy::{LevyModel, Triplet};
use crate::quantum::{DensityMatrix, EnergySpectrum};
use crate::scalar::{cplx, creal, phase, CMatrix, Real};

/// Dimensional estimate of σ² at the Planck scale, in MeV⁻² s⁻¹.
pub const PLANCK_SIGMA_SQUARED: f64 = 2.8;

/// `Γ_mn = ½ψ(λE_m) + ½ψ(λE_n) - ψ(½λ(E_m + E_n))`.
pub fn gamma_rate<T: Real>(model: &LevyModel<T>, lambda: T, em: T, en: T) -> Result<T> {
    if em == en {
        model.check_domain(lambda * em)?;
        return Ok(T::zero());
    }
    let half = T::lit(0.5);
    let g = half * model.psi(lambda * em)? + half * model.psi(lambda * en)? - model.psi(half * lambda * (em + en))?;
    Ok(g.max(T::zero()))
}

/// Γ from the triplet: `⅛qλ²ΔE² + ½∫(e^{½λE_m z} - e^{½λE_n z})² ν(dz)`.
pub fn gamma_rate_integral<T: Real>(triplet: &Triplet<T>, lambda: T, em: T, en: T) -> Result<T> {
    let half = T::lit(0.5);
    let (a, b) = (half * lambda * em, half * lambda * en);
    let jumps = triplet.measure.integrate_log(|z, log_nu| {
        let hl = half * log_nu;
        let d = (a * z + hl).exp() - (b * z + hl).exp();
        d * d
    })?;
    Ok(gaussian_part(triplet.q, lambda, em, en) + half * jumps)
}

/// Γ in the form `⅛qλ²ΔE² + 2∫ e^{½λ(E_m+E_n)z} sinh²(¼λΔE z) ν(dz)`.
pub fn gamma_rate_sinh<T: Real>(triplet: &Triplet<T>, lambda: T, em: T, en: T) -> Result<T> {
    Ok(gaussian_part(triplet.q, lambda, em, en) + T::lit(2.0) * sinh_integral(triplet, lambda, em, en)?)
}

fn gaussian_part<T: Real>(q: T, lambda: T, em: T, en: T) -> T {
    let d = lambda * (em - en);
    T::lit(0.125) * q * d * d
}

/// `∫ e^{cz} sinh²(δz) ν(dz)` with `c = ½λ(E_m+E_n)`, `δ = ¼λ(E_m-E_n)`,
/// evaluated without overflow.
fn sinh_integral<T: Real>(triplet: &Triplet<T>, lambda: T, em: T, en: T) -> Result<T> {
    let c = T::lit(0.5) * lambda * (em + en);
    let delta = T::lit(0.25) * lambda * (em - en);
    let ln4 = T::lit(4f64.ln());
    triplet.measure.integrate_log(|z, log_nu| {
        let x = (delta * z).abs();
        if x < T::lit(20.0) {
            let s = x.sinh();
            (c * z + log_nu).exp() * s * s
        } else {
            let tail = T::one() - (-(x + x)).exp();
            (c * z + log_nu + x + x - ln4).exp() * tail * tail
        }
    })
}

/// `q̃_mn = ψ''(½λ(E_m + E_n))`.
pub fn effective_q<T: Real>(model: &LevyModel<T>, lambda: T, em: T, en: T) -> Result<T> {
    model.psi_double_prime(T::lit(0.5) * lambda * (em + en))
}

/// `⅛λ²(E_m - E_n)² q̃_mn`.
pub fn small_gap_approx<T: Real>(model: &LevyModel<T>, lambda: T, em: T, en: T) -> Result<T> {
    let q = effective_q(model, lambda, em, en)?;
    let d = lambda * (em - en);
    Ok(T::lit(0.125) * d * d * q)
}

/// Rates and effective diffusion factors for every pair of levels.
#[derive(Debug, Clone)]
pub struct DecoherenceTable<T> {
    pub levels: Vec<T>,
    pub lambda: T,
    pub model: LevyModel<T>,
    pub rates: Vec<Vec<T>>,
    pub effective_q: Vec<Vec<T>>,
}

/// One `(m, n)` entry of a [`DecoherenceTable`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceRow<T> {
    pub m: usize,
    pub n: usize,
    pub em: T,
    pub en: T,
    pub gamma: T,
    pub effective_q: T,
}

impl<T: Real> DecoherenceTable<T> {
    pub fn new(model: &LevyModel<T>, levels: &[T], lambda: T) -> Result<Self> {
        let n = levels.len();
        let mut rates = vec![vec![T::zero(); n]; n];
        let mut eq = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                rates[i][j] = if i <= j { gamma_rate(model, lambda, levels[i], levels[j])? } else { rates[j][i] };
                eq[i][j] = effective_q(model, lambda, levels[i], levels[j])?;
            }
        }
        Ok(Self { levels: levels.to_vec(), lambda, model: *model, rates, effective_q: eq })
    }

    pub fn rows(&self) -> Vec<DecoherenceRow<T>> {
        let n = self.levels.len();
        let mut out = Vec::with_capacity(n * n);
        for m in 0..n {
            for k in 0..n {
                out.push(DecoherenceRow {
                    m,
                    n: k,
                    em: self.levels[m],
                    en: self.levels[k],
                    gamma: self.rates[m][k],
                    effective_q: self.effective_q[m][k],
                });
            }
        }
        out
    }

    /// Smallest off-diagonal rate, or `None` for a single level.
    pub fn gamma_min(&self) -> Option<T> {
        self.off_diagonal().reduce(|a, b| a.min(b))
    }

    pub fn gamma_max(&self) -> Option<T> {
        self.off_diagonal().reduce(|a, b| a.max(b))
    }

    fn off_diagonal(&self) -> impl Iterator<Item = T> + '_ {
        let n = self.levels.len();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| self.rates[i][j]))
    }
}

/// `Π_m μ_t Π_n = e^{-i(E_m-E_n)t/ħ - Γ_mn t} Π_m ρ_0 Π_n`.
pub fn mean_density<T: Real>(
    rho0: &DensityMatrix<T>,
    spectrum: &EnergySpectrum<T>,
    model: &LevyModel<T>,
    lambda: T,
    t: T,
) -> Result<DensityMatrix<T>> {
    if rho0.dim() != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: spectrum.dim(), found: rho0.dim() });
    }
    let table = DecoherenceTable::new(model, spectrum.levels(), lambda)?;
    let levels = spectrum.levels();
    let hbar = spectrum.hbar();
    let of = spectrum.level_of();
    let frame = spectrum.to_frame(rho0.matrix());
    let d = of.len();
    let out = CMatrix::from_fn(d, d, |a, b| {
        let (m, n) = (of[a], of[b]);
        if m == n {
            frame[(a, b)]
        } else {
            let decay = (-table.rates[m][n] * t).exp();
            frame[(a, b)] * phase((levels[m] - levels[n]) * t / hbar) * decay
        }
    });
    DensityMatrix::new(spectrum.from_frame(&out))
}

/// The mean-state generator
/// `μ ↦ -iħ⁻¹[Ĥ, μ] + ¼qλ² L_Ĥ μ + ∫ (L(z)μL(z) - ½{L(z)², μ}) ν(dz)`
/// with `L(z) = e^{½λĤz}`. In the energy frame it acts on block `(m, n)` by
/// multiplication with a fixed complex coefficient.
#[derive(Debug, Clone)]
pub struct LindbladGenerator<T: Real> {
    spectrum: EnergySpectrum<T>,
    /// Coefficient for each pair of levels.
    coefficients: Vec<Vec<nalgebra::Complex<T>>>,
}

impl<T: Real> LindbladGenerator<T> {
    pub fn new(spectrum: &EnergySpectrum<T>, model: &LevyModel<T>, lambda: T) -> Result<Self> {
        let triplet = model.triplet();
        let levels = spectrum.levels();
        let n = levels.len();
        let hbar = spectrum.hbar();
        let half = T::lit(0.5);
        let quarter = T::lit(0.25);
        let mut coefficients = vec![vec![creal(T::zero()); n]; n];
        for m in 0..n {
            model.check_domain(lambda * levels[m])?;
            for k in 0..n {
                let (em, en) = (levels[m], levels[k]);
                let gauss = quarter * triplet.q * lambda * lambda * (em * en - half * em * em - half * en * en);
                // L(z)μL(z) - ½{L², μ} on block (m, n) multiplies by
                // e^{cz} - ½e^{λE_m z} - ½e^{λE_n z} = -2 e^{cz} sinh²(¼λΔE z)
                let jump = if m == k { T::zero() } else { -T::lit(2.0) * sinh_integral(&triplet, lambda, em, en)? };
                coefficients[m][k] = cplx(gauss + jump, -(em - en) / hbar);
            }
        }
        Ok(Self { spectrum: spectrum.clone(), coefficients })
    }

    /// Generator coefficient for levels `(m, n)`; its real part is `-Γ_mn`.
    pub fn coefficient(&self, m: usize, n: usize) -> nalgebra::Complex<T> {
        self.coefficients[m][n]
    }

    /// Applies the generator to a matrix given in the original basis.
    pub fn apply(&self, mu: &CMatrix<T>) -> CMatrix<T> {
        let frame = self.spectrum.to_frame(mu);
        self.spectrum.from_frame(&self.apply_in_frame(&frame))
    }

    fn apply_in_frame(&self, mu: &CMatrix<T>) -> CMatrix<T> {
        let of = self.spectrum.level_of();
        CMatrix::from_fn(mu.nrows(), mu.ncols(), |a, b| mu[(a, b)] * self.coefficients[of[a]][of[b]])
    }

    /// Largest `|coefficient|`, the stiffness scale for explicit steppers.
    pub fn spectral_radius(&self) -> T {
        self.coefficients.iter().flatten().fold(T::zero(), |a, c| a.max(c.norm_sqr().sqrt()))
    }

    /// Classical fourth-order Runge–Kutta from `μ_0` to time `t`, with the
    /// step chosen so that `|coefficient| · h ≤ 0.02`.
    pub fn integrate_rk4(&self, mu0: &DensityMatrix<T>, t: T) -> Result<DensityMatrix<T>> {
        let steps = ((self.spectral_radius() * t / T::lit(0.02)).ceil().to_f64_lossy() as usize).max(16);
        self.integrate_rk4_steps(mu0, t, steps)
    }

    pub fn integrate_rk4_steps(&self, mu0: &DensityMatrix<T>, t: T, steps: usize) -> Result<DensityMatrix<T>> {
        let h = t / T::lit(steps as f64);
        let half = creal(T::lit(0.5));
        let sixth = creal(T::one() / T::lit(6.0));
        let two = creal(T::lit(2.0));
        let hc = creal(h);
        let mut mu = mu0.matrix().clone();
        for _ in 0..steps {
            let k1 = self.apply(&mu);
            let k2 = self.apply(&(&mu + &k1 * (hc * half)));
            let k3 = self.apply(&(&mu + &k2 * (hc * half)));
            let k4 = self.apply(&(&mu + &k3 * hc));
            mu += (k1 + k2 * two + k3 * two + k4) * (hc * sixth);
        }
        DensityMatrix::new(mu)
    }
}

/// One evaluation of the generator at `μ`.
pub fn lindblad_rhs<T: Real>(
    mu: &DensityMatrix<T>,
    spectrum: &EnergySpectrum<T>,
    model: &LevyModel<T>,
    lambda: T,
) -> Result<CMatrix<T>> {
    if mu.dim() != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: spectrum.dim(), found: mu.dim() });
    }
    Ok(LindbladGenerator::new(spectrum, model, lambda)?.apply(mu.matrix()))
}

/// Upper bound on σ² from `⅛σ²ΔE² T < 1`, with `ΔE` in eV and the Ramsey
/// time in seconds; the result is in MeV⁻² s⁻¹.
pub fn clock_bound(delta_e_ev: f64, ramsey_s: f64) -> Result<f64> {
    if !(delta_e_ev > 0.0) || !delta_e_ev.is_finite() {
        return Err(Error::NonpositiveInput("energy gap"));
    }
    if !(ramsey_s > 0.0) || !ramsey_s.is_finite() {
        return Err(Error::NonpositiveInput("Ramsey time"));
    }
    let de_mev = delta_e_ev * 1e-6;
    Ok(8.0 / (de_mev * de_mev * ramsey_s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::PureState;
    use crate::scalar::trace;
    use approx::assert_relative_eq;

    fn kinds() -> Vec<LevyModel<f64>> {
        vec![
            LevyModel::brownian(0.2, 1.0).unwrap(),
            LevyModel::poisson(1.0).unwrap(),
            LevyModel::compound_poisson_exp(1.0, 2.0).unwrap(),
            LevyModel::gamma(1.0, 1.0).unwrap(),
        ]
    }

    #[test]
    fn rate_examples() {
        let b = LevyModel::brownian(0.0, 1.0).unwrap();
        assert_eq!(gamma_rate(&b, 1.0, 0.7, 0.7).unwrap(), 0.0);
        assert_relative_eq!(gamma_rate(&b, 1.0, 0.0, 2.0).unwrap(), 0.5, epsilon = 1e-15);
        let p = LevyModel::poisson(1.0).unwrap();
        let e2 = 2f64.exp();
        let expected = 0.5 * e2 - std::f64::consts::E + 0.5;
        assert_relative_eq!(gamma_rate(&p, 1.0, 0.0, 2.0).unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(expected, 1.47625, epsilon = 1e-5);
    }

    #[test]
    fn three_forms_agree() {
        for model in kinds() {
            let t = model.triplet();
            for &(lambda, em, en) in &[(0.9, 0.0, 1.0), (0.5, -0.3, 1.2), (0.3, 0.1, 0.2)] {
                let g = gamma_rate(&model, lambda, em, en).unwrap();
                let gi = gamma_rate_integral(&t, lambda, em, en).unwrap();
                let gs = gamma_rate_sinh(&t, lambda, em, en).unwrap();
                assert_relative_eq!(g, gi, max_relative = 1e-8);
                assert_relative_eq!(g, gs, max_relative = 1e-8);
            }
        }
        // a pure Gaussian triplet has no integral term
        let b = LevyModel::brownian(0.0, 2.0).unwrap().triplet();
        assert_eq!(gamma_rate_integral(&b, 0.5, 0.0, 2.0).unwrap(), 0.125 * 2.0 * 0.25 * 4.0);
    }

    #[test]
    fn effective_q_examples() {
        let p = LevyModel::poisson(1.0).unwrap();
        assert_relative_eq!(effective_q(&p, 1.0, 0.0, 1.0).unwrap(), 0.5f64.exp(), max_relative = 1e-14);
        let g = LevyModel::gamma(1.0, 1.0).unwrap();
        assert_relative_eq!(effective_q(&g, 1.0, 0.0, 1.0).unwrap(), 4.0, max_relative = 1e-14);
        let c = LevyModel::compound_poisson_exp(1.0, 2.0).unwrap();
        assert_relative_eq!(effective_q(&c, 1.0, 0.5, 1.5).unwrap(), 4.0, max_relative = 1e-14);
    }

    #[test]
    fn small_gap_limit() {
        let p = LevyModel::poisson(1.0).unwrap();
        assert_eq!(small_gap_approx(&p, 1.0, 0.3, 0.3).unwrap(), 0.0);
        let approx: f64 = small_gap_approx(&p, 0.01, 0.0, 1.0).unwrap();
        let exact = gamma_rate(&p, 0.01, 0.0, 1.0).unwrap();
        assert!(((approx - exact) / exact).abs() < 5e-3);
        // λΔE = 0.01 with λ(E_m + E_n) = 0, 5, 10
        let rates: Vec<f64> =
            [-0.005, 2.495, 4.995].iter().map(|&em| small_gap_approx(&p, 1.0, em, em + 0.01).unwrap()).collect();
        assert_relative_eq!(rates[1] / rates[0], 2.5f64.exp(), max_relative = 1e-12);
        assert_relative_eq!(rates[2] / rates[0], 5f64.exp(), max_relative = 1e-12);
    }

    #[test]
    fn table_shape() {
        let p = LevyModel::poisson(1.0).unwrap();
        let t = DecoherenceTable::new(&p, &[0.0, 1.0, 3.0], 0.5).unwrap();
        for i in 0..3 {
            assert_eq!(t.rates[i][i], 0.0);
            for j in 0..3 {
                assert_eq!(t.rates[i][j], t.rates[j][i]);
                if i != j {
                    assert!(t.rates[i][j] > 0.0);
                }
            }
        }
        assert_eq!(t.rows().len(), 9);
        assert_eq!(t.gamma_min().unwrap(), t.rates[0][1]);
    }

    #[test]
    fn mean_density_decays() {
        let sp = EnergySpectrum::<f64>::from_diagonal(&[0.0, 2.0]).unwrap();
        let rho0 = PureState::from_real(&[1.0, 1.0]).unwrap().to_density();
        let b = LevyModel::brownian(0.0, 1.0).unwrap();
        let mu = mean_density(&rho0, &sp, &b, 1.0, 0.0).unwrap();
        assert!(mu.frobenius_distance(&rho0) < 1e-15);
        let mu = mean_density(&rho0, &sp, &b, 1.0, 2.0).unwrap();
        assert_relative_eq!(mu.matrix()[(0, 1)].norm(), 0.5 * (-1.0f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(mu.matrix()[(0, 1)].norm(), 0.18394, epsilon = 1e-5);
        let mu = mean_density(&rho0, &sp, &b, 1.0, 50.0 / 0.5).unwrap();
        assert!(mu.matrix()[(0, 1)].norm() < 1e-20);
        assert_relative_eq!(mu.matrix()[(1, 1)].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn brownian_generator_matches_master_equation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let h = CMatrix::from_row_slice(
            3,
            3,
            &[
                creal(1.0),
                cplx(0.3, 0.1),
                creal(0.0),
                cplx(0.3, -0.1),
                creal(0.0),
                cplx(0.2, 0.0),
                creal(0.0),
                cplx(0.2, 0.0),
                creal(-1.0),
            ],
        );
        let sp = EnergySpectrum::from_dense_default(&h).unwrap();
        let b = LevyModel::brownian(0.0, 1.0).unwrap();
        let lambda = 0.8;
        let gen = LindbladGenerator::new(&sp, &b, lambda).unwrap();
        for _ in 0..5 {
            let a = CMatrix::from_fn(3, 3, |_, _| cplx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let mu = &a * a.adjoint();
            let tr = trace(&mu);
            let mu = mu.map(|z| z / tr);
            let s2 = lambda * lambda;
            let comm = &h * &mu - &mu * &h;
            let lind = &h * &mu * &h - (&mu * &h * &h + &h * &h * &mu).map(|z| z * 0.5);
            let expected = comm.map(|z| z * cplx(0.0, -1.0)) + lind.map(|z| z * 0.25 * s2);
            let got = gen.apply(&mu);
            assert!((got - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn generator_integrates_to_mean_density() {
        let sp = EnergySpectrum::<f64>::from_diagonal(&[0.0, 0.4, 1.0]).unwrap();
        let rho0 = PureState::from_real(&[1.0, 0.5, 0.8]).unwrap().to_density();
        for model in kinds() {
            let gen = LindbladGenerator::new(&sp, &model, 0.7).unwrap();
            let rhs = gen.apply(rho0.matrix());
            assert!(trace(&rhs).norm() < 1e-12);
            let table = DecoherenceTable::new(&model, sp.levels(), 0.7).unwrap();
            let t = 1.0 / table.gamma_max().unwrap();
            let ode = gen.integrate_rk4(&rho0, t).unwrap();
            let exact = mean_density(&rho0, &sp, &model, 0.7, t).unwrap();
            assert!(ode.frobenius_distance(&exact) < 1e-6, "{model}");
        }
    }

    #[test]
    fn clock_bound_value() {
        let b = clock_bound(3.801e-5, 1.0).unwrap();
        assert!(((b / 1e22) - 0.5537).abs() < 5e-5, "{b}");
        assert_relative_eq!(clock_bound(3.801e-5, 2.0).unwrap(), b / 2.0, max_relative = 1e-15);
        assert!(PLANCK_SIGMA_SQUARED < b);
        assert!(clock_bound(0.0, 1.0).is_err());
        assert!(clock_bound(1.0, -1.0).is_err());
    }
}
