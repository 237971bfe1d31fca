use super::{LevyKind, LevyModel};
use crate::error::{Error, Result};
use crate::scalar::Real;
use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, Normal, Poisson};

/// Above this many jumps a compound Poisson increment is drawn as one
/// Gamma(n, 1/β) variate, which has the same law as the sum of n Exp(β).
const JUMP_SUM_CUTOFF: u64 = 64;

fn param<E: std::fmt::Display>(e: E) -> Error {
    Error::InvalidParameter(e.to_string())
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let n: f64 = Poisson::new(mean).map_err(param)?.sample(rng);
    Ok(n as u64)
}

/// One draw of `ξ_{t+Δt} - ξ_t` under the signal-free law of `model`.
pub fn sample_increment<T: Real, R: Rng + ?Sized>(model: &LevyModel<T>, dt: T, rng: &mut R) -> Result<T> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::NonpositiveTimestep(dt.to_f64_lossy()));
    }
    let dt = dt.to_f64_lossy();
    let f = |x: T| x.to_f64_lossy();
    let value = match model.kind() {
        LevyKind::Brownian { p, q } => Normal::new(f(p) * dt, (f(q) * dt).sqrt()).map_err(param)?.sample(rng),
        LevyKind::Poisson { m } => poisson_count(f(m) * dt, rng)? as f64,
        LevyKind::CompoundPoissonExp { m, beta } => {
            let n = poisson_count(f(m) * dt, rng)?;
            let beta = f(beta);
            if n == 0 {
                0.0
            } else if n <= JUMP_SUM_CUTOFF {
                let jump = Exp::new(beta).map_err(param)?;
                (0..n).map(|_| jump.sample(rng)).sum()
            } else {
                Gamma::new(n as f64, 1.0 / beta).map_err(param)?.sample(rng)
            }
        }
        LevyKind::Gamma { m, phi } => Gamma::new(f(m) * dt, f(phi)).map_err(param)?.sample(rng),
    };
    Ok(T::lit(value))
}

/// Increment under the law tilted by `κ`: the conditional law of a Lévy
/// information process given `λH = κ`.
pub fn sample_conditional_increment<T: Real, R: Rng + ?Sized>(
    model: &LevyModel<T>,
    kappa: T,
    dt: T,
    rng: &mut R,
) -> Result<T> {
    sample_increment(&model.esscher(kappa)?, dt, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn draws(model: &LevyModel<f64>, dt: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| sample_increment(model, dt, &mut rng).unwrap()).collect()
    }

    fn mean_se(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn gamma_mean() {
        let x = draws(&LevyModel::gamma(2.0, 1.0).unwrap(), 1.0, 100_000, 1);
        let (m, se) = mean_se(&x);
        assert!((m - 2.0).abs() < 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn poisson_counts_are_integers() {
        let x = draws(&LevyModel::poisson(3.0).unwrap(), 0.7, 2000, 2);
        assert!(x.iter().all(|v| *v >= 0.0 && v.fract() == 0.0));
    }

    #[test]
    fn brownian_variance() {
        let x = draws(&LevyModel::brownian(0.0, 4.0).unwrap(), 0.25, 100_000, 3);
        let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
        let (m2, se) = mean_se(&sq);
        assert!((m2 - 1.0).abs() < 3.0 * se, "{m2} ± {se}");
    }

    #[test]
    fn many_jumps_use_gamma_shortcut() {
        let model = LevyModel::compound_poisson_exp(500.0, 2.0).unwrap();
        let x = draws(&model, 1.0, 20_000, 4);
        let (m, se) = mean_se(&x);
        assert!((m - 250.0).abs() < 4.0 * se);
    }

    #[test]
    fn rejects_bad_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let model = LevyModel::poisson(1.0).unwrap();
        assert_eq!(sample_increment(&model, 0.0, &mut rng), Err(Error::NonpositiveTimestep(0.0)));
        assert!(sample_increment(&model, -1.0, &mut rng).is_err());
    }
}
