use super::LevyModel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `κξ_t - ψ(κ)t`.
pub fn log_exponential_martingale<T: Real>(model: &LevyModel<T>, kappa: T, xi: T, t: T) -> Result<T> {
    Ok(kappa * xi - model.psi(kappa)? * t)
}

/// `Λ_t^κ = exp(κξ_t - ψ(κ)t)`.
pub fn exponential_martingale<T: Real>(model: &LevyModel<T>, kappa: T, xi: T, t: T) -> Result<T> {
    Ok(log_exponential_martingale(model, kappa, xi, t)?.exp())
}

/// Cantelli upper bound on `P(Λ_t^κ > ε)`.
///
/// With `A = log ε + (ψ(κ) - κψ'(0))t` the bound is
/// `ψ''(0)t / (ψ''(0)t + A²/κ²)` when `A ≥ 0`, and the trivial 1 otherwise.
pub fn cantelli_bound<T: Real>(model: &LevyModel<T>, kappa: T, epsilon: T, t: T) -> Result<T> {
    if kappa == T::zero() {
        return Err(Error::ZeroKappa);
    }
    model.check_domain(kappa)?;
    if !(epsilon > T::zero()) {
        return Err(Error::NonpositiveInput("epsilon"));
    }
    if !(t > T::zero()) {
        return Err(Error::NonpositiveInput("t"));
    }
    let a = epsilon.ln() + model.convexity_gap(kappa)? * t;
    if a < T::zero() {
        return Ok(T::one());
    }
    let var = model.psi_double_prime(T::zero())? * t;
    let shift = a / kappa;
    Ok(var / (var + shift * shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_kappa_martingale_is_one() {
        let m = LevyModel::poisson(1.0).unwrap();
        for &(xi, t) in &[(0.0, 0.0), (5.0, 2.0), (100.0, 3.5)] {
            assert_eq!(exponential_martingale(&m, 0.0, xi, t).unwrap(), 1.0);
        }
    }

    #[test]
    fn gamma_martingale_closed_form() {
        // (1-κ)^{mt} e^{κγ_t} at κ = 0.5, m = t = 1, γ_t = ln 4
        let m = LevyModel::gamma(1.0, 1.0).unwrap();
        let v = exponential_martingale(&m, 0.5, 4f64.ln(), 1.0).unwrap();
        assert_relative_eq!(v, 0.5 * 2.0, max_relative = 1e-14);
    }

    #[test]
    fn poisson_martingale_mean() {
        let model = LevyModel::poisson(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let v: Vec<f64> = (0..n)
            .map(|_| {
                let xi = super::super::sample_increment(&model, 2.0, &mut rng).unwrap();
                exponential_martingale(&model, 0.5, xi, 2.0).unwrap()
            })
            .collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn bound_decays() {
        let m = LevyModel::brownian(0.0, 1.0).unwrap();
        assert!(cantelli_bound(&m, 1.0, 0.01, 1e6).unwrap() < 1e-3);
        let mut last = 1.0;
        for t in [10.0, 20.0, 40.0, 80.0] {
            let b = cantelli_bound(&m, 1.0, 0.01, t).unwrap();
            assert!(b > 0.0 && b <= last);
            last = b;
        }
        // one-sided regime not yet reached
        assert_eq!(cantelli_bound(&m, 1.0, 0.01, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn bound_errors() {
        let m = LevyModel::gamma(1.0, 1.0).unwrap();
        assert_eq!(cantelli_bound(&m, 0.0, 0.1, 1.0), Err(Error::ZeroKappa));
        assert!(matches!(cantelli_bound(&m, 1.0, 0.1, 1.0), Err(Error::OutsideExponentDomain { .. })));
    }
}
