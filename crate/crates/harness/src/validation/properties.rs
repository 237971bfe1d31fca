//! Invariants of each core module, checked numerically.

use collapse_core::information::{sample_information_path, Signal};
use collapse_core::levy::{exponential_martingale, sample_increment};
use collapse_core::scalar::frobenius_norm;
use collapse_core::stats::{compensated_sum, ks_two_sample, mean_se};
use collapse_core::{
    branch_reduction_bound, evolve_density, gamma_rate, lindblad_rhs, CMatrix, Density, Grid, Levy, LindbladGenerator,
    Reducer, Spectrum, C,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{kinds, three_level_state, Tracker};
use crate::checks::{Measurement, Report};
use crate::config::ScenarioConfig;
use crate::constants::{BOUND_SE, CHUNK, MEAN_SE, MIN_P_VALUE};
use crate::ensemble::{run_ensemble_with, EnsembleOptions};
use crate::presets;
use crate::rng::stream;

/// `n` draws of `f`, chunked so the result does not depend on the thread
/// count.
fn draws<F>(seed: u64, label: &str, n: usize, f: F) -> collapse_core::Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> collapse_core::Result<f64> + Sync,
{
    let chunks: Vec<collapse_core::Result<Vec<f64>>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, label, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMatrix<f64> {
    let a = CMatrix::from_fn(d, d, |_, _| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&a + a.adjoint()) * C::new(0.5, 0.0)
}

fn random_density(rng: &mut ChaCha8Rng, d: usize) -> Density {
    let a = CMatrix::from_fn(d, d, |_, _| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    Density::normalized(&a * a.adjoint()).expect("positive semidefinite")
}

fn hermitian_deviation(a: &CMatrix<f64>) -> f64 {
    (a - a.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

fn trace(a: &CMatrix<f64>) -> C<f64> {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

/// Spectrum with a degenerate level in a rotated basis.
fn rotated_spectrum(rng: &mut ChaCha8Rng) -> (Spectrum, CMatrix<f64>) {
    let u = Spectrum::from_dense_default(&random_hermitian(rng, 4)).expect("hermitian").frame().clone();
    let d = CMatrix::from_diagonal(&collapse_core::CVector::from_vec(
        [0.0, 1.0, 1.0, 2.5].iter().map(|x| C::new(*x, 0.0)).collect(),
    ));
    let h = &u * d * u.adjoint();
    (Spectrum::from_dense(&h, 1e-8).expect("hermitian"), h)
}

fn quantum_core(seed: u64) -> Report {
    let mut r = Report::new("properties/quantum-core");
    let mut rng = stream(seed, "quantum", 0);
    let (mut luders_e, mut luders_v, mut prob_sum, mut reassembly, mut state_trace, mut state_herm) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut min_eig = f64::INFINITY;
    for _ in 0..200 {
        let (spectrum, h) = rotated_spectrum(&mut rng);
        let rho = random_density(&mut rng, 4);
        let rebuilt = spectrum.hamiltonian();
        reassembly = reassembly.max(frobenius_norm(&(&rebuilt - &h)));
        let probs = spectrum.probabilities(&rho).expect("dimensions match");
        prob_sum = prob_sum.max((probs.iter().sum::<f64>() - 1.0).abs());
        for (j, &pj) in probs.iter().enumerate() {
            if pj < 1e-6 {
                continue;
            }
            let l = spectrum.luders_state(&rho, j).expect("occupied level");
            luders_e = luders_e.max((spectrum.expectation_energy(&l).expect("ok") - spectrum.levels()[j]).abs());
            luders_v = luders_v.max(spectrum.variance_energy(&l).expect("ok").abs());
            state_trace = state_trace.max((l.trace() - 1.0).abs());
            state_herm = state_herm.max(hermitian_deviation(l.matrix()));
            min_eig = min_eig.min(l.min_eigenvalue());
        }
    }
    // distinct eigenvalues: reassembly must reproduce a generic Hamiltonian
    for _ in 0..100 {
        let h = random_hermitian(&mut rng, 5);
        let s = Spectrum::from_dense(&h, 1e-12).expect("hermitian");
        if s.n_levels() == 5 {
            reassembly = reassembly.max(frobenius_norm(&(s.hamiltonian() - &h)));
        }
    }
    r.push(Measurement::at_most("max |⟨H⟩ - E_j| on Lüders states", luders_e, 1e-10, 0.0, 0.0));
    r.push(Measurement::at_most("max Var(H) on Lüders states", luders_v, 1e-10, 0.0, 0.0));
    r.push(Measurement::at_most("max |Σ_j tr(Π_j ρ) - 1|", prob_sum, 1e-10, 0.0, 0.0));
    r.push(Measurement::at_most("max ‖Σ_j E_j Π_j - H‖", reassembly, 1e-8, 0.0, 0.0));
    r.push(Measurement::at_most("Lüders states: max |tr - 1|", state_trace, 1e-10, 0.0, 0.0));
    r.push(Measurement::at_most("Lüders states: max Hermiticity deviation", state_herm, 1e-10, 0.0, 0.0));
    r.push(Measurement::at_least("Lüders states: min eigenvalue", min_eig, -1e-10, 0.0));
    r
}

fn fourth_central(xs: &[f64], mean: f64) -> f64 {
    compensated_sum(xs.iter().map(|x| (x - mean).powi(4))) / xs.len() as f64
}

fn levy_noise(seed: u64) -> Vec<Report> {
    let mut moments = Report::new("properties/levy-moments");
    let mut convex = Report::new("properties/levy-convexity");
    let mut lk = Report::new("properties/levy-khintchine");
    let mut chain = Report::new("properties/levy-chain-additivity");
    let mut mart = Report::new("properties/exponential-martingale");
    for (model, _) in kinds() {
        let name = model.name();
        // ψ(0) = 0, mean ψ'(0)t, variance ψ''(0)t
        let t = 1.0;
        moments.push(Measurement::absolute(format!("{name}: ψ(0)"), model.psi(0.0).unwrap_or(f64::NAN), 0.0, 0.0));
        match draws(seed, &format!("moments-{name}"), 100_000, |rng| sample_increment(&model, t, rng)) {
            Ok(xs) => {
                let e = mean_se(&xs);
                let var = collapse_core::stats::variance(&xs);
                let m4 = fourth_central(&xs, e.mean);
                let var_se = ((m4 - var * var) / xs.len() as f64).sqrt();
                moments.push(Measurement::two_sided(
                    format!("{name}: mean ξ_1"),
                    e.mean,
                    model.psi_prime(0.0).unwrap_or(f64::NAN) * t,
                    e.se,
                    MEAN_SE,
                ));
                moments.push(Measurement::two_sided(
                    format!("{name}: var ξ_1"),
                    var,
                    model.psi_double_prime(0.0).unwrap_or(f64::NAN) * t,
                    var_se,
                    MEAN_SE,
                ));
            }
            Err(e) => moments.fail(e.to_string()),
        }
        // midpoint convexity on a grid inside the domain
        let sup = model.domain_sup();
        let hi = if sup.is_finite() { sup - 1e-3 } else { 3.0 };
        let grid: Vec<f64> = (0..25).map(|k| -3.0 + (hi + 3.0) * k as f64 / 24.0).collect();
        let mut worst = f64::INFINITY;
        for &a in &grid {
            for &b in &grid {
                if a != b {
                    let gap = 0.5 * model.psi(a).unwrap_or(f64::NAN) + 0.5 * model.psi(b).unwrap_or(f64::NAN)
                        - model.psi(0.5 * (a + b)).unwrap_or(f64::NAN);
                    worst = worst.min(gap);
                }
            }
        }
        convex.push(Measurement::at_least(
            format!("{name}: min ½ψ(α) + ½ψ(β) - ψ((α+β)/2)"),
            if worst > 0.0 { worst } else { -1.0 },
            0.0,
            0.0,
        ));
        // Lévy–Khintchine against the closed form
        let tri = model.triplet();
        let mut lk_worst = 0.0f64;
        let mut lk_failed = None;
        let alphas: Vec<f64> = (0..15).map(|k| -2.0 + (hi.min(2.0) + 2.0) * k as f64 / 14.0).collect();
        for &a in &alphas {
            match collapse_core::levy::levy_khintchine(tri.p, tri.q, &tri.measure, a) {
                Ok(v) => {
                    let c = model.psi(a).unwrap_or(f64::NAN);
                    let scale = c.abs().max(1e-300);
                    lk_worst = lk_worst.max((v - c).abs() / scale);
                }
                Err(e) => lk_failed = Some(e.to_string()),
            }
        }
        lk.push(Measurement::at_most(format!("{name}: max relative gap"), lk_worst, 1e-8, 0.0, 0.0));
        if let Some(e) = lk_failed {
            lk.fail(format!("{name}: {e}"));
        }
        // one step of Δt against two steps of Δt/2
        let one = draws(seed, &format!("chain1-{name}"), 10_000, |rng| sample_increment(&model, 0.8, rng));
        let two = draws(seed, &format!("chain2-{name}"), 10_000, |rng| {
            Ok(sample_increment(&model, 0.4, rng)? + sample_increment(&model, 0.4, rng)?)
        });
        match (one, two) {
            (Ok(a), Ok(b)) => {
                let (d, p) = ks_two_sample(&a, &b);
                chain.push(Measurement::at_least(format!("{name}: KS p-value (D = {d:.4})"), p, MIN_P_VALUE, 0.0));
            }
            (a, b) => chain.fail(format!("{name}: {:?} {:?}", a.err(), b.err())),
        }
        // E[e^{κξ_t - ψ(κ)t}] = 1 at moderate κt
        let kappa = 0.3;
        for t in [0.5, 1.0, 2.0, 3.0, 4.0] {
            match draws(seed, &format!("mart-{name}-{t}"), 100_000, |rng| {
                let xi = sample_increment(&model, t, rng)?;
                exponential_martingale(&model, kappa, xi, t)
            }) {
                Ok(xs) => {
                    let e = mean_se(&xs);
                    mart.push(Measurement::two_sided(format!("{name}: E[Λ({t})]"), e.mean, 1.0, e.se, MEAN_SE));
                }
                Err(e) => mart.fail(e.to_string()),
            }
        }
    }
    vec![moments, convex, lk, chain, mart]
}

fn information(seed: u64) -> Vec<Report> {
    let mut cond = Report::new("properties/conditional-exponent");
    let mut mono = Report::new("properties/monotone-jump-paths");
    let mut zero = Report::new("properties/zero-coupling-law");
    let mut ident = Report::new("properties/long-run-identification");
    for (model, lambda) in kinds() {
        let name = model.name();
        let signal = Signal::new(vec![0.0, 1.0], vec![0.3, 0.7], lambda).expect("valid signal");
        let kappa = lambda;
        let grid = Grid::from_times(vec![0.0, 1.0]).expect("valid grid");
        for alpha in [-0.5, -0.2, 0.1] {
            let xs = draws(seed, &format!("cond-{name}-{alpha}"), 100_000, |rng| {
                let p = sample_information_path(&model, &signal, 1, &grid, rng)?;
                Ok((alpha * p.last().1).exp())
            });
            match (xs, model.conditional_exponent(kappa, alpha)) {
                (Ok(xs), Ok(exact)) => {
                    let e = mean_se(&xs);
                    cond.push(Measurement::two_sided(
                        format!("{name}: α = {alpha}"),
                        e.mean.ln(),
                        exact,
                        e.se / e.mean,
                        MEAN_SE,
                    ));
                }
                (a, b) => cond.fail(format!("{name}: {:?} {:?}", a.err(), b.err())),
            }
        }
        if !model.is_brownian() {
            let fine = Grid::uniform(0.05, 5.0).expect("valid grid");
            let neg = draws(seed, &format!("mono-{name}"), 2000, |rng| {
                let p = sample_information_path(&model, &signal, 1, &fine, rng)?;
                Ok(p.values().windows(2).filter(|w| w[1] < w[0]).count() as f64)
            });
            match neg {
                Ok(n) => mono.push(Measurement::absolute(
                    format!("{name}: decreasing increments in 2000 paths"),
                    n.iter().sum(),
                    0.0,
                    0.0,
                )),
                Err(e) => mono.fail(e.to_string()),
            }
        }
        let flat = Signal::new(vec![0.0, 1.0], vec![0.3, 0.7], 0.0).expect("valid signal");
        let a = draws(seed, &format!("zero-a-{name}"), 10_000, |rng| {
            Ok(sample_information_path(&model, &flat, 1, &grid, rng)?.last().1)
        });
        let b = draws(seed, &format!("zero-b-{name}"), 10_000, |rng| sample_increment(&model, 1.0, rng));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let (d, p) = ks_two_sample(&a, &b);
                zero.push(Measurement::at_least(format!("{name}: KS p-value (D = {d:.4})"), p, MIN_P_VALUE, 0.0));
            }
            (a, b) => zero.fail(format!("{name}: {:?} {:?}", a.err(), b.err())),
        }
    }
    // ξ_T/(σT) → E_j for Brownian noise with q = 1, σ = λ
    let model = Levy::brownian(0.0, 1.0).expect("valid");
    let (lambda, horizon) = (1.0, 1e4);
    let signal = Signal::new(vec![0.0, 1.0], vec![0.3, 0.7], lambda).expect("valid signal");
    let grid = Grid::from_times(vec![0.0, horizon]).expect("valid grid");
    let hits = draws(seed, "identify", 10_000, |rng| {
        let j = collapse_core::information::sample_outcome(&signal, rng);
        let p = sample_information_path(&model, &signal, j, &grid, rng)?;
        let ok = (p.last().1 / (lambda * horizon) - signal.energies()[j]).abs() < 4.0 / (lambda * horizon.sqrt());
        Ok(ok as u8 as f64)
    });
    match hits {
        Ok(h) => {
            let f = h.iter().sum::<f64>() / h.len() as f64;
            ident.push(Measurement::at_least(
                "fraction with |ξ_T/(σT) - E_j| < 4/(σ√T)",
                f,
                0.99,
                (f * (1.0 - f) / h.len() as f64).sqrt(),
            ));
        }
        Err(e) => ident.fail(e.to_string()),
    }
    vec![cond, mono, zero, ident]
}

fn reduction(seed: u64, t: &mut Tracker) -> Vec<Report> {
    let mut norm = Report::new("properties/posterior-normalization");
    let mut purity = Report::new("properties/purity-preservation");
    let mut branch = Report::new("properties/branch-reduction-bound");
    let mut luders = Report::new("properties/luders-limit");
    let levels = [0.0, 0.5, 1.0];
    let (spectrum3, pure3) = three_level_state();
    let mut rng = stream(seed, "reduction", 0);
    for (model, lambda) in kinds() {
        let name = model.name();
        let signal = Signal::new(levels.to_vec(), vec![0.2, 0.3, 0.5], lambda).expect("valid signal");
        let mut worst = 0.0f64;
        let mut bad = 0usize;
        for xi in [-1e4, -1e3, -1.0, 0.0, 1.0, 1e3, 1e4, 2e4 / lambda] {
            for time in [0.0, 1.0, 1e2, 1e4] {
                match collapse_core::posterior_probabilities(&model, &signal, xi, time) {
                    Ok(p) => {
                        worst = worst.max((p.iter().sum::<f64>() - 1.0).abs());
                        bad += p.iter().filter(|x| !(x.is_finite() && **x >= 0.0 && **x <= 1.0)).count();
                    }
                    Err(_) => bad += 1,
                }
            }
        }
        norm.push(Measurement::at_most(format!("{name}: max |Σπ - 1| up to |λEξ| ~ 1e4"), worst, 1e-12, 0.0, 0.0));
        norm.push(Measurement::absolute(format!("{name}: invalid posteriors"), bad as f64, 0.0, 0.0));
        let reducer = Reducer::new(&model, &spectrum3, &pure3, lambda).expect("valid");
        let sig3 = reducer.signal().expect("valid");
        let mut worst_purity = 0.0f64;
        for _ in 0..200 {
            let j = collapse_core::information::sample_outcome(&sig3, &mut rng);
            let time: f64 = rng.random_range(0.0..30.0);
            let grid = Grid::from_times(vec![0.0, time.max(1e-9)]).expect("valid grid");
            let xi = match sample_information_path(&model, &sig3, j, &grid, &mut rng) {
                Ok(p) => p.last().1,
                Err(e) => {
                    purity.fail(e.to_string());
                    break;
                }
            };
            match evolve_density(&model, &sig3, &pure3, &spectrum3, xi, time) {
                Ok(rho) => worst_purity = worst_purity.max((rho.purity() - 1.0).abs()),
                Err(e) => purity.fail(e.to_string()),
            }
        }
        purity.push(Measurement::at_most(format!("{name}: max |tr ρ² - 1|"), worst_purity, 1e-10, 0.0, 0.0));

        // P(π_j(t) < 1 - ε | H = E_j) against the union of Cantelli bounds
        let two = Signal::new(vec![0.0, 1.0], vec![0.3, 0.7], lambda).expect("valid signal");
        let g = gamma_rate(&model, lambda, 0.0, 1.0).expect("in domain");
        for j in 0..2 {
            for mult in [2.0, 8.0, 32.0] {
                let time = mult / g;
                let grid = Grid::from_times(vec![0.0, time]).expect("valid grid");
                let eps = 0.1;
                let xs = draws(seed, &format!("branch-{name}-{j}-{mult}"), 10_000, |rng| {
                    let p = sample_information_path(&model, &two, j, &grid, rng)?;
                    let post = collapse_core::posterior_probabilities(&model, &two, p.last().1, time)?;
                    Ok((post[j] < 1.0 - eps) as u8 as f64)
                });
                match (xs, branch_reduction_bound(&model, &two, j, eps, time)) {
                    (Ok(xs), Ok(bound)) => {
                        let e = mean_se(&xs);
                        let se = (e.mean * (1.0 - e.mean) / xs.len() as f64).sqrt();
                        branch.push(Measurement::at_most(
                            format!("{name}: P(π_{} < 0.9 | E_{}) at t = {time:.1}", j + 1, j + 1),
                            e.mean,
                            bound,
                            se,
                            BOUND_SE,
                        ));
                    }
                    (a, b) => branch.fail(format!("{name}: {:?} {:?}", a.err(), b.err())),
                }
            }
        }
    }

    // Lüders limit: block-diagonal states land within 10δ of the projection;
    // coherent states within δ + √δ, since their distance is √(1 - π_j).
    for (label, coherent) in [("block-diagonal", false), ("coherent", true)] {
        let mut cfg: ScenarioConfig = presets::find("appendix-a").expect("preset").config();
        if !coherent {
            cfg.initial_state =
                crate::config::InitialStateConfig { probabilities: Some(vec![0.3, 0.7]), ..Default::default() };
        }
        cfg.paths = 2000;
        cfg.seed = seed;
        cfg.grid.steps = Some(50);
        let s = match cfg.resolve() {
            Ok(s) => s,
            Err(e) => {
                luders.fail(e.to_string());
                continue;
            }
        };
        let r = match run_ensemble_with(&s, EnsembleOptions { track_density: true }) {
            Ok(r) => r,
            Err(e) => {
                luders.fail(e.to_string());
                continue;
            }
        };
        t.invariants.merge(&r.invariants);
        t.ensembles += 1;
        let reducer = Reducer::new(&s.model, &s.spectrum, &s.rho0, s.lambda).expect("valid");
        let mut worst = 0.0f64;
        for p in r.records.iter() {
            let Some(j) = p.collapse_outcome else { continue };
            let state = reducer.state(p.final_xi, s.grid.horizon()).expect("valid");
            let target = s.spectrum.luders_state(&s.rho0, j).expect("occupied");
            worst = worst.max(state.trace_distance(&target).expect("same dimension"));
        }
        let delta = s.delta;
        let (limit, what) = if coherent { (delta + delta.sqrt(), "δ + √δ") } else { (10.0 * delta, "10δ") };
        luders.push(Measurement::at_most(
            format!("{label}: max trace distance to Lüders state (≤ {what})"),
            worst,
            limit,
            0.0,
            0.0,
        ));
    }
    vec![norm, purity, branch, luders]
}

fn decoherence(seed: u64) -> Vec<Report> {
    let mut sign = Report::new("properties/rate-positivity");
    let mut shift = Report::new("properties/rate-shift");
    let mut flow = Report::new("properties/lindblad-flow");
    let mut rng = stream(seed, "decoherence", 0);
    let energies = [0.0, 0.2, 0.5, 0.9, 1.3];
    for (model, lambda) in kinds() {
        let name = model.name();
        let (mut zero_diag, mut min_off) = (0.0f64, f64::INFINITY);
        for &a in &energies {
            for &b in &energies {
                let g = gamma_rate(&model, lambda, a, b).unwrap_or(f64::NAN);
                if a == b {
                    zero_diag = zero_diag.max(g.abs());
                } else {
                    min_off = min_off.min(g);
                }
            }
        }
        sign.push(Measurement::absolute(format!("{name}: max |Γ_mm|"), zero_diag, 0.0, 0.0));
        sign.push(Measurement::at_least(
            format!("{name}: min Γ_mn, m ≠ n (> 0)"),
            if min_off > 0.0 { min_off } else { -1.0 },
            0.0,
            0.0,
        ));

        let (spectrum, _) = three_level_state();
        let mut worst = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..20 {
            let rho = random_density(&mut rng, 3);
            if let Ok(d) = lindblad_rhs(&rho, &spectrum, &model, lambda) {
                worst.0 = worst.0.max(trace(&d).norm());
                worst.1 = worst.1.max(hermitian_deviation(&d));
            }
            if let Ok(gen) = LindbladGenerator::new(&spectrum, &model, lambda) {
                let time = rng.random_range(0.1..20.0);
                match gen.integrate_rk4(&rho, time) {
                    Ok(mu) => worst.2 = worst.2.max((mu.trace() - 1.0).abs()).max(hermitian_deviation(mu.matrix())),
                    Err(e) => flow.fail(e.to_string()),
                }
            }
        }
        flow.push(Measurement::at_most(format!("{name}: max |tr L(ρ)|"), worst.0, 1e-12, 0.0, 0.0));
        flow.push(Measurement::at_most(format!("{name}: max Hermiticity deviation of L(ρ)"), worst.1, 1e-12, 0.0, 0.0));
        flow.push(Measurement::at_most(
            format!("{name}: integrated flow, max trace or Hermiticity error"),
            worst.2,
            1e-10,
            0.0,
            0.0,
        ));
    }
    let poisson = Levy::poisson(1.0).expect("valid");
    let brownian = Levy::brownian(0.0, 1.0).expect("valid");
    let shifts: Vec<f64> = (0..8).map(|k| k as f64 * 0.75).collect();
    let rates = |m: &Levy| -> Vec<f64> {
        shifts.iter().map(|c| gamma_rate(m, 1.0, 0.1 + c, 0.4 + c).unwrap_or(f64::NAN)).collect()
    };
    let pr = rates(&poisson);
    let increasing = pr.windows(2).all(|w| w[1] > w[0]);
    shift.push(Measurement::at_least(
        "Poisson Γ strictly increasing under E → E + c",
        increasing as u8 as f64,
        1.0,
        0.0,
    ));
    let br = rates(&brownian);
    let spread = br.iter().fold(0.0f64, |m, g| m.max((g - br[0]).abs())) / br[0];
    shift.push(Measurement::at_most("Brownian Γ relative change under E → E + c", spread, 1e-12, 0.0, 0.0));
    vec![sign, shift, flow]
}

fn harness(seed: u64) -> Vec<Report> {
    let mut det = Report::new("properties/determinism");
    let mut round = Report::new("properties/config-round-trip");
    let mut cfg = presets::find("appendix-c").expect("preset").config();
    cfg.paths = 700;
    cfg.seed = seed;
    cfg.grid.steps = Some(40);
    match cfg.resolve() {
        Ok(s) => {
            let run = |threads: usize| {
                rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string()).and_then(|p| {
                    p.install(|| run_ensemble_with(&s, EnsembleOptions::default()).map_err(|e| e.to_string()))
                })
            };
            match (run(1), run(3), run(3)) {
                (Ok(a), Ok(b), Ok(c)) => {
                    det.push(Measurement::at_least("1 thread vs 3 threads identical", (a == b) as u8 as f64, 1.0, 0.0));
                    det.push(Measurement::at_least("rerun identical", (b == c) as u8 as f64, 1.0, 0.0));
                }
                (a, b, c) => det.fail(format!("{:?} {:?} {:?}", a.err(), b.err(), c.err())),
            }
        }
        Err(e) => det.fail(e.to_string()),
    }
    let mut stable = true;
    for p in presets::PRESETS {
        let text = p.config().to_toml();
        match ScenarioConfig::from_toml(&text) {
            Ok(back) => stable &= back.to_toml() == text && back == p.config(),
            Err(_) => stable = false,
        }
    }
    round.push(Measurement::at_least(
        "serialize(parse(serialize(c))) = serialize(c) for every preset",
        stable as u8 as f64,
        1.0,
        0.0,
    ));
    vec![det, round]
}

/// Every module's property suite.
pub fn property_suites(t: &mut Tracker) -> Vec<Report> {
    let seed = t.seed.wrapping_add(10);
    let mut out = vec![quantum_core(seed)];
    out.extend(levy_noise(seed));
    out.extend(information(seed));
    out.extend(reduction(seed, t));
    out.extend(decoherence(seed));
    out.extend(harness(seed));
    out
}
