use collapse_core::{
    evolve_density, gamma_rate, mean_density, posterior_probabilities, Density, Levy, Levy32, Pure, Sig, Spectrum,
};
use proptest::prelude::*;

fn model(kind: u8) -> Levy {
    match kind % 4 {
        0 => Levy::brownian(0.3, 1.0).unwrap(),
        1 => Levy::poisson(1.3).unwrap(),
        2 => Levy::compound_poisson_exp(0.8, 2.0).unwrap(),
        _ => Levy::gamma(1.0, 1.0).unwrap(),
    }
}

/// Largest usable `α`, kept clear of the domain edge.
fn edge(m: &Levy) -> f64 {
    let s = m.domain_sup();
    if s.is_finite() {
        0.9 * s
    } else {
        3.0
    }
}

proptest! {
    #[test]
    fn psi_vanishes_at_zero_and_is_convex(kind in 0u8..4, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let m = model(kind);
        prop_assert_eq!(m.psi(0.0).unwrap(), 0.0);
        let (a, b) = (-3.0 + u * (edge(&m) + 3.0), -3.0 + v * (edge(&m) + 3.0));
        prop_assume!((a - b).abs() > 1e-6);
        let gap = 0.5 * m.psi(a).unwrap() + 0.5 * m.psi(b).unwrap() - m.psi(0.5 * (a + b)).unwrap();
        prop_assert!(gap > 0.0);
    }

    #[test]
    fn esscher_tilt_shifts_the_exponent(kind in 0u8..4, k in 0.0f64..1.0, u in 0.0f64..1.0) {
        let m = model(kind);
        let kappa = -1.0 + k * (edge(&m) / 2.0 + 1.0);
        let tilted = m.esscher(kappa).unwrap();
        let alpha = -1.0 + u * (edge(&m) / 2.0 + 1.0);
        let expected = m.psi(alpha + kappa).unwrap() - m.psi(kappa).unwrap();
        let got = tilted.psi(alpha).unwrap();
        prop_assert!((got - expected).abs() <= 1e-10 * expected.abs().max(1.0));
    }

    #[test]
    fn posteriors_are_normalized(
        kind in 0u8..4,
        p in prop::collection::vec(0.01f64..1.0, 2..5),
        lambda in 0.0f64..0.45,
        xi in -1e4f64..1e4,
        t in 0.0f64..1e4,
    ) {
        let m = model(kind);
        let total: f64 = p.iter().sum();
        let probs: Vec<f64> = p.iter().map(|x| x / total).collect();
        let energies: Vec<f64> = (0..probs.len()).map(|k| k as f64 * 0.5).collect();
        let signal = Sig::new(energies, probs, lambda).unwrap();
        let post = posterior_probabilities(&m, &signal, xi, t).unwrap();
        prop_assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(post.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn rates_are_symmetric_and_nonnegative(kind in 0u8..4, a in 0.0f64..1.0, b in 0.0f64..1.0, lambda in 0.05f64..0.9) {
        let m = model(kind);
        let g = gamma_rate(&m, lambda, a, b).unwrap();
        prop_assert!(g >= 0.0);
        prop_assert!((g - gamma_rate(&m, lambda, b, a).unwrap()).abs() <= 1e-15 * g.max(1.0));
        prop_assert_eq!(gamma_rate(&m, lambda, a, a).unwrap(), 0.0);
        if (a - b).abs() > 1e-3 {
            prop_assert!(g > 0.0);
        }
    }

    #[test]
    fn pure_states_stay_pure(kind in 0u8..4, c in 0.05f64..0.95, xi in -50.0f64..50.0, t in 0.0f64..50.0) {
        let m = model(kind);
        let spectrum = Spectrum::from_diagonal(&[0.0, 0.4, 0.8]).unwrap();
        let psi = Pure::from_real(&[c.sqrt(), (0.5 * (1.0 - c)).sqrt(), (0.5 * (1.0 - c)).sqrt()]).unwrap();
        let rho0 = Density::pure(&psi);
        let signal = Sig::from_state(&spectrum, &rho0, 1.0).unwrap();
        let rho = evolve_density(&m, &signal, &rho0, &spectrum, xi, t).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
        prop_assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mean_density_keeps_populations(kind in 0u8..4, c in 0.05f64..0.95, t in 0.0f64..100.0) {
        let m = model(kind);
        let spectrum = Spectrum::from_diagonal(&[0.0, 0.6]).unwrap();
        let psi = Pure::from_real(&[c.sqrt(), (1.0 - c).sqrt()]).unwrap();
        let rho0 = Density::pure(&psi);
        let mu = mean_density(&rho0, &spectrum, &m, 1.0, t).unwrap();
        prop_assert!((mu.matrix()[(0, 0)].re - c).abs() < 1e-12);
        prop_assert!(mu.matrix()[(0, 1)].norm() <= rho0.matrix()[(0, 1)].norm() + 1e-15);
        prop_assert!(mu.min_eigenvalue() > -1e-12);
    }
}

#[test]
fn single_precision_aliases_work() {
    let m = Levy32::poisson(1.0).unwrap();
    let v = m.psi(1.0f32).unwrap();
    assert!((v - (std::f32::consts::E - 1.0)).abs() < 1e-6);
}
