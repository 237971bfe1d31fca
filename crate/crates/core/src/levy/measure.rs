use super::LevyModel;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_tail, Tolerance};
use crate::scalar::Real;
use std::fmt;
use std::sync::Arc;

pub type DensityFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A Lévy measure `ν(dz)`, either a finite sum of atoms or a density.
///
/// Densities are held as `log ν(z)` so that integrands like `e^{αz} ν(z)`
/// can be formed without overflow near the edge of the exponent domain.
#[derive(Clone)]
pub enum LevyMeasureSpec<T: Real> {
    /// `(jump size, rate)` pairs.
    Atomic(Vec<(T, T)>),
    Density {
        /// `z ↦ log ν(z)`; `-∞` where the density vanishes.
        log_density: DensityFn<T>,
        /// Closed support; either end may be infinite.
        support: (T, T),
        /// Characteristic jump size, used to pace the tail scan.
        hint: T,
    },
}

impl<T: Real> fmt::Debug for LevyMeasureSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Atomic(atoms) => f.debug_tuple("Atomic").field(atoms).finish(),
            Self::Density { support, hint, .. } => {
                f.debug_struct("Density").field("support", support).field("hint", hint).finish_non_exhaustive()
            }
        }
    }
}

/// `e^x - 1 - x`, accurate near zero.
pub(crate) fn expm1_minus_x<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-2) {
        // Horner form of x²/2 + x³/6 + ... + x⁸/8!
        let mut acc = T::zero();
        let mut fact = T::lit(40320.0);
        for k in (2..=8).rev() {
            acc = (acc + T::one() / fact) * x;
            fact /= T::lit(k as f64);
        }
        acc * x
    } else {
        x.exp_m1() - x
    }
}

impl<T: Real> LevyMeasureSpec<T> {
    pub fn zero() -> Self {
        Self::Atomic(Vec::new())
    }

    /// Density given through its logarithm.
    pub fn log_density(log_density: DensityFn<T>, support: (T, T), hint: T) -> Self {
        Self::Density { log_density, support, hint }
    }

    /// Density given directly.
    pub fn density(density: DensityFn<T>, support: (T, T), hint: T) -> Self {
        Self::log_density(Arc::new(move |z| density(z).ln()), support, hint)
    }

    /// Rejects atoms at zero, negative rates and measures for which
    /// `∫ min(1, z²) ν(dz)` diverges.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Atomic(atoms) => {
                for &(z, w) in atoms {
                    if z == T::zero() {
                        return Err(Error::InvalidMeasure("atom at zero".into()));
                    }
                    if !z.is_finite() || !w.is_finite() || w < T::zero() {
                        return Err(Error::InvalidMeasure(format!(
                            "bad atom ({}, {})",
                            z.to_f64_lossy(),
                            w.to_f64_lossy()
                        )));
                    }
                }
                Ok(())
            }
            Self::Density { support, .. } => {
                if !(support.0 < support.1) {
                    return Err(Error::InvalidMeasure("empty support".into()));
                }
                let mass = self.integrate(|z| {
                    let z2 = z * z;
                    if z2 < T::one() {
                        z2
                    } else {
                        T::one()
                    }
                })?;
                if !mass.is_finite() || mass < T::zero() {
                    return Err(Error::InvalidMeasure(format!("∫ min(1, z²) ν(dz) = {}", mass.to_f64_lossy())));
                }
                Ok(())
            }
        }
    }

    /// `∫ g(z) ν(dz)`.
    pub fn integrate<G: Fn(T) -> T>(&self, g: G) -> Result<T> {
        self.integrate_log(|z, log_nu| {
            let w = log_nu.exp();
            if w == T::zero() {
                T::zero()
            } else {
                g(z) * w
            }
        })
    }

    /// `∫ h(z, log ν(z)) dz` for densities, `Σ h(z_i, log w_i)` for atoms,
    /// where `h` is responsible for folding the weight into the integrand.
    ///
    /// Densities are integrated piecewise with breaks at `z = -1, 0, 1`;
    /// infinite ends are cut once the integrand is negligible.
    pub fn integrate_log<H: Fn(T, T) -> T>(&self, h: H) -> Result<T> {
        self.integrate_log_with(h, Tolerance::default())
    }

    pub fn integrate_log_with<H: Fn(T, T) -> T>(&self, h: H, tol: Tolerance) -> Result<T> {
        match self {
            Self::Atomic(atoms) => {
                Ok(atoms.iter().fold(T::zero(), |acc, &(z, w)| if w == T::zero() { acc } else { acc + h(z, w.ln()) }))
            }
            Self::Density { log_density, support, hint } => {
                let f = |z: T| {
                    let l = log_density(z);
                    if l == -T::infinity() {
                        T::zero()
                    } else {
                        h(z, l)
                    }
                };
                let (lo, hi) = *support;
                let mut breaks = vec![lo];
                for b in [-T::one(), T::zero(), T::one()] {
                    if b > lo && b < hi {
                        breaks.push(b);
                    }
                }
                breaks.push(hi);
                let mut total = T::zero();
                for w in breaks.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    total += match (a.is_finite(), b.is_finite()) {
                        (true, true) => integrate(f, a, b, tol)?,
                        (true, false) => integrate_tail(f, a, true, *hint, tol)?,
                        (false, true) => integrate_tail(f, b, false, *hint, tol)?,
                        (false, false) => return Err(Error::QuadratureFailure("unbounded piece".into())),
                    };
                }
                Ok(total)
            }
        }
    }
}

/// `pα + ½qα² + ∫ (e^{αz} - 1 - αz 1{|z|<1}) ν(dz)`.
pub fn levy_khintchine<T: Real>(p: T, q: T, measure: &LevyMeasureSpec<T>, alpha: T) -> Result<T> {
    let jumps = measure.integrate_log(|z, log_nu| {
        let x = alpha * z;
        if z.abs() < T::one() {
            expm1_minus_x(x) * log_nu.exp()
        } else {
            (x + log_nu).exp() - log_nu.exp()
        }
    })?;
    Ok(p * alpha + T::lit(0.5) * q * alpha * alpha + jumps)
}

impl<T: Real> LevyModel<T> {
    /// Evaluates the Lévy–Khintchine integral with this model's drift and
    /// Gaussian rate and the supplied jump measure.
    pub fn levy_khintchine_check(&self, measure: &LevyMeasureSpec<T>, alpha: T) -> Result<T> {
        self.check_domain(alpha)?;
        let t = self.triplet();
        levy_khintchine(t.p, t.q, measure, alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn brownian_has_only_gaussian_term() {
        let b = LevyModel::brownian(0.0, 1.0).unwrap();
        let t = b.triplet();
        assert_eq!(b.levy_khintchine_check(&t.measure, 2.0).unwrap(), 2.0);
    }

    #[test]
    fn poisson_atom() {
        let m = LevyModel::poisson(3.0).unwrap();
        let atom = LevyMeasureSpec::Atomic(vec![(1.0, 3.0)]);
        assert_eq!(m.levy_khintchine_check(&atom, 0.0).unwrap(), 0.0);
        assert_relative_eq!(m.levy_khintchine_check(&atom, 0.8).unwrap(), m.psi(0.8).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn gamma_density_matches_closed_form() {
        let m = LevyModel::gamma(1.0, 1.0).unwrap();
        let t = m.triplet();
        let v = m.levy_khintchine_check(&t.measure, 0.5).unwrap();
        assert_relative_eq!(v, -(0.5f64.ln()), max_relative = 1e-8);
    }

    #[test]
    fn triplets_reproduce_exponents() {
        let models: [LevyModel<f64>; 5] = [
            LevyModel::poisson(1.7).unwrap(),
            LevyModel::compound_poisson_exp(1.0, 2.0).unwrap(),
            LevyModel::compound_poisson_exp(0.4, 0.7).unwrap(),
            LevyModel::gamma(1.0, 1.0).unwrap(),
            LevyModel::gamma(2.5, 0.3).unwrap(),
        ];
        for m in models {
            let t = m.triplet();
            t.measure.validate().unwrap();
            let sup: f64 = m.domain_sup().min(3.0);
            for i in 0..12 {
                let a = -3.0 + (sup - 1e-2 + 3.0) * i as f64 / 11.0;
                let v: f64 = m.levy_khintchine_check(&t.measure, a).unwrap_or_else(|e| panic!("{m} {a} {e}"));
                let exact: f64 = m.psi(a).unwrap();
                assert!(
                    ((v - exact) / exact.abs().max(1e-300)).abs() < 1e-8 || (v - exact).abs() < 1e-14,
                    "{m} at {a}: {v} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_measures() {
        assert!(LevyMeasureSpec::Atomic(vec![(0.0, 1.0)]).validate().is_err());
        assert!(LevyMeasureSpec::Atomic(vec![(1.0, -1.0)]).validate().is_err());
        // 1/z³ near zero is not integrable against z²
        let bad = LevyMeasureSpec::density(Arc::new(|z: f64| (-z).exp() / (z * z * z)), (0.0, f64::INFINITY), 1.0);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn small_argument_series() {
        for &x in &[1e-9f64, -3e-4, 5e-3, 0.009, 0.02, -0.5] {
            let exact = x.exp_m1() - x;
            let series = expm1_minus_x(x);
            assert_relative_eq!(series, exact, max_relative = 1e-9);
        }
    }
}
