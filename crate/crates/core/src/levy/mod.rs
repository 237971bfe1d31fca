//! Lévy exponents, characteristic triplets and exponential tilting.

mod martingale;
mod measure;
mod sampling;

pub use martingale::{cantelli_bound, exponential_martingale, log_exponential_martingale};
pub use measure::{levy_khintchine, LevyMeasureSpec};
pub use sampling::{sample_conditional_increment, sample_increment};

use crate::error::{Error, Result};
use crate::scalar::Real;
use std::fmt;
use std::sync::Arc;

/// The four supported families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevyKind<T> {
    /// Drift `p` and Gaussian variance rate `q`.
    Brownian { p: T, q: T },
    /// Unit jumps at rate `m`.
    Poisson { m: T },
    /// Exponential(β) jumps at rate `m`.
    CompoundPoissonExp { m: T, beta: T },
    /// Gamma process with rate `m` and scale `phi`.
    Gamma { m: T, phi: T },
}

/// A Lévy process specified through its exponent
/// `ψ(α) = t⁻¹ log E[e^{α ξ_t}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyModel<T> {
    kind: LevyKind<T>,
}

/// Drift, Gaussian rate and jump measure in the Lévy–Khintchine form, with
/// the truncation function `1{|z| < 1}`.
#[derive(Debug, Clone)]
pub struct Triplet<T: Real> {
    pub p: T,
    pub q: T,
    pub measure: LevyMeasureSpec<T>,
}

fn positive<T: Real>(x: T, name: &str) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {}", x.to_f64_lossy())))
    }
}

impl<T: Real> LevyModel<T> {
    /// Brownian motion with drift. `q` must be strictly positive so that
    /// the exponent is strictly convex.
    pub fn brownian(p: T, q: T) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::InvalidParameter("drift p must be finite".into()));
        }
        positive(q, "diffusion q")?;
        Ok(Self { kind: LevyKind::Brownian { p, q } })
    }

    pub fn poisson(m: T) -> Result<Self> {
        positive(m, "intensity m")?;
        Ok(Self { kind: LevyKind::Poisson { m } })
    }

    pub fn compound_poisson_exp(m: T, beta: T) -> Result<Self> {
        positive(m, "intensity m")?;
        positive(beta, "jump rate beta")?;
        Ok(Self { kind: LevyKind::CompoundPoissonExp { m, beta } })
    }

    pub fn gamma(m: T, phi: T) -> Result<Self> {
        positive(m, "rate m")?;
        positive(phi, "scale phi")?;
        Ok(Self { kind: LevyKind::Gamma { m, phi } })
    }

    pub fn from_kind(kind: LevyKind<T>) -> Result<Self> {
        match kind {
            LevyKind::Brownian { p, q } => Self::brownian(p, q),
            LevyKind::Poisson { m } => Self::poisson(m),
            LevyKind::CompoundPoissonExp { m, beta } => Self::compound_poisson_exp(m, beta),
            LevyKind::Gamma { m, phi } => Self::gamma(m, phi),
        }
    }

    pub fn kind(&self) -> LevyKind<T> {
        self.kind
    }

    /// Short lowercase tag, e.g. `"compound-poisson-exp"`.
    pub fn name(&self) -> &'static str {
        match self.kind {
            LevyKind::Brownian { .. } => "brownian",
            LevyKind::Poisson { .. } => "poisson",
            LevyKind::CompoundPoissonExp { .. } => "compound-poisson-exp",
            LevyKind::Gamma { .. } => "gamma",
        }
    }

    pub fn is_brownian(&self) -> bool {
        matches!(self.kind, LevyKind::Brownian { .. })
    }

    /// True for the pure-jump kinds, whose paths never decrease.
    pub fn is_spectrally_positive(&self) -> bool {
        !self.is_brownian()
    }

    /// Supremum of the open domain `C = (-∞, sup)`; infinite when `C = ℝ`.
    pub fn domain_sup(&self) -> T {
        match self.kind {
            LevyKind::Brownian { .. } | LevyKind::Poisson { .. } => T::infinity(),
            LevyKind::CompoundPoissonExp { beta, .. } => beta,
            LevyKind::Gamma { phi, .. } => T::one() / phi,
        }
    }

    pub fn in_domain(&self, alpha: T) -> bool {
        alpha.is_finite() && alpha < self.domain_sup()
    }

    pub fn check_domain(&self, alpha: T) -> Result<()> {
        if self.in_domain(alpha) {
            Ok(())
        } else {
            Err(Error::OutsideExponentDomain { alpha: alpha.to_f64_lossy(), domain: self.domain_string() })
        }
    }

    pub fn domain_string(&self) -> String {
        let sup = self.domain_sup();
        if sup.is_finite() {
            format!("(-inf, {})", sup.to_f64_lossy())
        } else {
            "(-inf, inf)".into()
        }
    }

    /// `ψ(α)`.
    pub fn psi(&self, alpha: T) -> Result<T> {
        self.check_domain(alpha)?;
        let half = T::lit(0.5);
        Ok(match self.kind {
            LevyKind::Brownian { p, q } => p * alpha + half * q * alpha * alpha,
            LevyKind::Poisson { m } => m * alpha.exp_m1(),
            LevyKind::CompoundPoissonExp { m, beta } => m * alpha / (beta - alpha),
            LevyKind::Gamma { m, phi } => -m * (-phi * alpha).ln_1p(),
        })
    }

    /// `ψ'(α)`.
    pub fn psi_prime(&self, alpha: T) -> Result<T> {
        self.check_domain(alpha)?;
        Ok(match self.kind {
            LevyKind::Brownian { p, q } => p + q * alpha,
            LevyKind::Poisson { m } => m * alpha.exp(),
            LevyKind::CompoundPoissonExp { m, beta } => {
                let d = beta - alpha;
                m * beta / (d * d)
            }
            LevyKind::Gamma { m, phi } => m * phi / (T::one() - phi * alpha),
        })
    }

    /// `ψ''(α)`.
    pub fn psi_double_prime(&self, alpha: T) -> Result<T> {
        self.check_domain(alpha)?;
        Ok(match self.kind {
            LevyKind::Brownian { q, .. } => q,
            LevyKind::Poisson { m } => m * alpha.exp(),
            LevyKind::CompoundPoissonExp { m, beta } => {
                let d = beta - alpha;
                T::lit(2.0) * m * beta / (d * d * d)
            }
            LevyKind::Gamma { m, phi } => {
                let d = T::one() - phi * alpha;
                m * phi * phi / (d * d)
            }
        })
    }

    /// Exponent of `ξ` under the measure tilted by `e^{κξ_t - ψ(κ)t}`,
    /// i.e. `α ↦ ψ(α + κ) - ψ(κ)`. Every family is closed under tilting.
    pub fn esscher(&self, kappa: T) -> Result<Self> {
        self.check_domain(kappa)?;
        let one = T::one();
        Self::from_kind(match self.kind {
            LevyKind::Brownian { p, q } => LevyKind::Brownian { p: p + q * kappa, q },
            LevyKind::Poisson { m } => LevyKind::Poisson { m: m * kappa.exp() },
            LevyKind::CompoundPoissonExp { m, beta } => {
                LevyKind::CompoundPoissonExp { m: m * beta / (beta - kappa), beta: beta - kappa }
            }
            LevyKind::Gamma { m, phi } => LevyKind::Gamma { m, phi: phi / (one - phi * kappa) },
        })
    }

    /// `ψ(α + κ) - ψ(κ)`.
    pub fn conditional_exponent(&self, kappa: T, alpha: T) -> Result<T> {
        self.check_domain(kappa)?;
        self.check_domain(alpha + kappa)?;
        Ok(self.psi(alpha + kappa)? - self.psi(kappa)?)
    }

    /// The characteristic triplet `{p, q, ν}`.
    pub fn triplet(&self) -> Triplet<T> {
        let zero = T::zero();
        let one = T::one();
        match self.kind {
            LevyKind::Brownian { p, q } => Triplet { p, q, measure: LevyMeasureSpec::zero() },
            LevyKind::Poisson { m } => Triplet {
                // the only atom sits at |z| = 1, outside the compensated range
                p: zero,
                q: zero,
                measure: LevyMeasureSpec::Atomic(vec![(one, m)]),
            },
            LevyKind::CompoundPoissonExp { m, beta } => Triplet {
                // ∫_0^1 z m β e^{-βz} dz
                p: m * (one - (-beta).exp() * (one + beta)) / beta,
                q: zero,
                measure: LevyMeasureSpec::log_density(
                    Arc::new(move |z: T| (m * beta).ln() - beta * z),
                    (zero, T::infinity()),
                    one / beta,
                ),
            },
            LevyKind::Gamma { m, phi } => Triplet {
                // ∫_0^1 z m e^{-z/φ}/z dz
                p: m * phi * (-(-one / phi).exp_m1()),
                q: zero,
                measure: LevyMeasureSpec::log_density(
                    Arc::new(move |z: T| m.ln() - z / phi - z.ln()),
                    (zero, T::infinity()),
                    phi,
                ),
            },
        }
    }

    /// `κ ↦ ψ(κ) - κψ'(0)`, positive away from zero by strict convexity.
    pub fn convexity_gap(&self, kappa: T) -> Result<T> {
        Ok(self.psi(kappa)? - kappa * self.psi_prime(T::zero())?)
    }

    /// Parameters as `(name, value)` pairs, for reports.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match self.kind {
            LevyKind::Brownian { p, q } => vec![("p", p.to_f64_lossy()), ("q", q.to_f64_lossy())],
            LevyKind::Poisson { m } => vec![("m", m.to_f64_lossy())],
            LevyKind::CompoundPoissonExp { m, beta } => {
                vec![("m", m.to_f64_lossy()), ("beta", beta.to_f64_lossy())]
            }
            LevyKind::Gamma { m, phi } => vec![("m", m.to_f64_lossy()), ("phi", phi.to_f64_lossy())],
        }
    }
}

impl<T: Real> fmt::Display for LevyModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name())?;
        for (i, (k, v)) in self.parameters().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn all_kinds() -> Vec<LevyModel<f64>> {
        vec![
            LevyModel::brownian(0.3, 1.5).unwrap(),
            LevyModel::poisson(1.0).unwrap(),
            LevyModel::compound_poisson_exp(1.0, 2.0).unwrap(),
            LevyModel::gamma(1.0, 1.0).unwrap(),
        ]
    }

    #[test]
    fn exponent_vanishes_at_origin() {
        for model in all_kinds() {
            assert_eq!(model.psi(0.0).unwrap(), 0.0, "{model}");
        }
    }

    #[test]
    fn closed_form_values() {
        let poisson = LevyModel::poisson(1.0).unwrap();
        assert_relative_eq!(poisson.psi(2f64.ln()).unwrap(), 1.0, epsilon = 1e-15);
        let gamma = LevyModel::gamma(1.0, 1.0).unwrap();
        assert_relative_eq!(gamma.psi(0.5).unwrap(), 0.5f64.ln().abs(), epsilon = 1e-15);
        assert_relative_eq!(gamma.psi_double_prime(0.0).unwrap(), 1.0);
        let gamma = LevyModel::gamma(2.0, 0.5).unwrap();
        // Var[γ_t]/t = mφ²
        assert_relative_eq!(gamma.psi_double_prime(0.0).unwrap(), 0.5);
        assert_relative_eq!(gamma.psi_prime(0.0).unwrap(), 1.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for model in all_kinds() {
            for &a in &[-1.3, -0.2, 0.0, 0.4, 0.9] {
                let h = 1e-5;
                let fd1 = (model.psi(a + h).unwrap() - model.psi(a - h).unwrap()) / (2.0 * h);
                let fd2 = (model.psi_prime(a + h).unwrap() - model.psi_prime(a - h).unwrap()) / (2.0 * h);
                assert_relative_eq!(model.psi_prime(a).unwrap(), fd1, max_relative = 1e-8);
                assert_relative_eq!(model.psi_double_prime(a).unwrap(), fd2, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn domain_is_enforced() {
        let gamma = LevyModel::gamma(1.0, 2.0).unwrap();
        assert!(gamma.psi(0.49).is_ok());
        assert!(matches!(gamma.psi(0.5), Err(Error::OutsideExponentDomain { .. })));
        let cp = LevyModel::compound_poisson_exp(1.0, 2.0).unwrap();
        assert!(cp.psi_prime(2.0).is_err());
        assert!(cp.psi(f64::NAN).is_err());
        assert!(LevyModel::brownian(0.0, 0.0).is_err());
        assert!(LevyModel::poisson(-1.0).is_err());
    }

    #[test]
    fn tilt_reproduces_conditional_exponent() {
        for model in all_kinds() {
            for &kappa in &[-0.7, 0.3, 0.6] {
                let tilted = model.esscher(kappa).unwrap();
                for &a in &[-0.5, 0.1, 0.3] {
                    if !model.in_domain(a + kappa) {
                        continue;
                    }
                    assert_relative_eq!(
                        tilted.psi(a).unwrap(),
                        model.conditional_exponent(kappa, a).unwrap(),
                        max_relative = 1e-12,
                        epsilon = 1e-15
                    );
                }
            }
        }
    }

    #[test]
    fn conditional_exponent_examples() {
        let b = LevyModel::brownian(0.0, 1.0).unwrap();
        let (a, x) = (0.7, 1.9);
        assert_relative_eq!(b.conditional_exponent(x, a).unwrap(), a * x + 0.5 * a * a, max_relative = 1e-12);
        let p = LevyModel::poisson(2.0).unwrap();
        let e = std::f64::consts::E;
        assert_relative_eq!(p.conditional_exponent(1.0, 1.0).unwrap(), 2.0 * e * (e - 1.0), max_relative = 1e-12);
        assert_eq!(p.conditional_exponent(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn convexity_gap_is_positive() {
        for model in all_kinds() {
            for &k in &[-2.0, -0.5, -1e-3, 1e-3, 0.5, 0.9] {
                assert!(model.convexity_gap(k).unwrap() > 0.0, "{model} at {k}");
            }
        }
    }

    #[test]
    fn single_precision_exponent() {
        let g = LevyModel::<f32>::gamma(1.0, 1.0).unwrap();
        assert!((g.psi(0.5).unwrap() - std::f32::consts::LN_2).abs() < 1e-6);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn midpoint_convexity(a in -3.0f64..0.95, b in -3.0f64..0.95, k in 0usize..4) {
                prop_assume!((a - b).abs() > 1e-3);
                let model = all_kinds()[k];
                let mid = model.psi(0.5 * (a + b)).unwrap();
                let chord = 0.5 * model.psi(a).unwrap() + 0.5 * model.psi(b).unwrap();
                prop_assert!(mid < chord);
            }

            #[test]
            fn second_derivative_positive(a in -5.0f64..0.99, k in 0usize..4) {
                prop_assert!(all_kinds()[k].psi_double_prime(a).unwrap() > 0.0);
            }
        }
    }
}
