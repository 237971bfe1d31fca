//! Named scenarios.
//!
//! The `appendix-*` presets are two-level systems with `E = (0, 1)` driven
//! by Brownian, Poisson and gamma noise; a fourth preset uses compound
//! Poisson noise with exponential jumps.

use crate::config::{Entry, GridConfig, InitialStateConfig, NoiseConfig, Quantity, ScenarioConfig, SpectrumConfig};

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> ScenarioConfig,
}

impl Preset {
    pub fn config(&self) -> ScenarioConfig {
        (self.build)()
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "appendix-a",
        summary: "Brownian two-level model, q = 1, λ = 1, pure state with p = (0.3, 0.7)",
        build: appendix_a,
    },
    Preset {
        name: "appendix-b",
        summary: "Poisson two-level model, m = 1, λ = ln 2, pure state with p = (0.5, 0.5)",
        build: appendix_b,
    },
    Preset {
        name: "appendix-c",
        summary: "gamma two-level model, m = 1, φ = 1, λ = 0.5, pure state with p = (0.3, 0.7)",
        build: appendix_c,
    },
    Preset {
        name: "compound-poisson-exp",
        summary: "compound Poisson two-level model, m = 1, β = 2, λ = 1, pure state with p = (0.3, 0.7)",
        build: compound_poisson_exp,
    },
];

/// Label under which `scenario list` advertises user-supplied files.
pub const CUSTOM: &str = "custom";

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Two-level scenario with energies `(0, 1)`, the pure state with
/// populations `(1 - p2, p2)`, and `horizon_rates / Γ_12` as horizon.
pub fn two_level(name: &str, noise: NoiseConfig, p2: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        seed: 0,
        paths: 5000,
        collapse_threshold: None,
        hbar: None,
        output_dir: None,
        spectrum: SpectrumConfig { levels: Some(vec![0.0.into(), 1.0.into()]), ..Default::default() },
        initial_state: InitialStateConfig {
            amplitudes: Some(vec![Entry::from((1.0 - p2).sqrt()), Entry::from(p2.sqrt())]),
            ..Default::default()
        },
        noise,
        grid: GridConfig {
            horizon: Some(Quantity::from("auto")),
            horizon_rates: Some(20.0),
            steps: Some(400),
            checkpoints: None,
            dt: None,
        },
    }
}

pub fn brownian_noise(q: f64, lambda: f64) -> NoiseConfig {
    NoiseConfig {
        kind: "brownian".into(),
        p: Some(0.0.into()),
        q: Some(q.into()),
        lambda: Some(lambda.into()),
        ..Default::default()
    }
}

pub fn poisson_noise(m: f64, lambda: f64) -> NoiseConfig {
    NoiseConfig { kind: "poisson".into(), m: Some(m.into()), lambda: Some(lambda.into()), ..Default::default() }
}

pub fn gamma_noise(m: f64, phi: f64, lambda: f64) -> NoiseConfig {
    NoiseConfig {
        kind: "gamma".into(),
        m: Some(m.into()),
        phi: Some(phi.into()),
        lambda: Some(lambda.into()),
        ..Default::default()
    }
}

pub fn compound_poisson_exp_noise(m: f64, beta: f64, lambda: f64) -> NoiseConfig {
    NoiseConfig {
        kind: "compound-poisson-exp".into(),
        m: Some(m.into()),
        beta: Some(beta.into()),
        lambda: Some(lambda.into()),
        ..Default::default()
    }
}

fn appendix_a() -> ScenarioConfig {
    two_level("appendix-a", brownian_noise(1.0, 1.0), 0.7)
}

fn appendix_b() -> ScenarioConfig {
    two_level("appendix-b", poisson_noise(1.0, std::f64::consts::LN_2), 0.5)
}

fn appendix_c() -> ScenarioConfig {
    two_level("appendix-c", gamma_noise(1.0, 1.0, 0.5), 0.7)
}

fn compound_poisson_exp() -> ScenarioConfig {
    two_level("compound-poisson-exp", compound_poisson_exp_noise(1.0, 2.0, 1.0), 0.7)
}

/// The four noise kinds as two-level scenarios with populations
/// `(1 - p2, p2)`, using the preset parameters.
pub fn all_kinds(p2: f64) -> Vec<ScenarioConfig> {
    vec![
        two_level("brownian", brownian_noise(1.0, 1.0), p2),
        two_level("poisson", poisson_noise(1.0, std::f64::consts::LN_2), p2),
        two_level("gamma", gamma_noise(1.0, 1.0, 0.5), p2),
        two_level("compound-poisson-exp", compound_poisson_exp_noise(1.0, 2.0, 1.0), p2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        for p in PRESETS {
            let s = p.config().resolve().unwrap();
            assert_eq!(s.name, p.name);
            assert_eq!(s.levels(), &[0.0, 1.0]);
        }
        assert!(find("appendix-b").is_some());
        assert!(find(CUSTOM).is_none());
    }

    #[test]
    fn auto_horizons() {
        // 20 / Γ_12 with Γ_12 = 1/8, 1/6 from the closed-form rates
        let a = find("appendix-a").unwrap().config().resolve().unwrap();
        assert!((a.grid.horizon() - 160.0).abs() < 1e-9);
        let c = find("compound-poisson-exp").unwrap().config().resolve().unwrap();
        assert!((c.grid.horizon() - 120.0).abs() < 1e-9);
    }
}
