//! Statistical checks on ensembles.
//!
//! Every check returns a [`Report`] listing each comparison with its effect
//! size and standard error, never a bare verdict.

use collapse_core::scalar::frobenius_norm as frobenius_norm_of;
use collapse_core::stats::{chi_square, linear_fit, mean_se, CompensatedSum};
use collapse_core::{gamma_rate, mean_density, CMatrix, Levy, Spectrum};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Scenario;
use crate::constants::{
    BOOTSTRAP_RESAMPLES, BOOTSTRAP_SE, BORN_Z, BOUND_SE, CHUNK, MEAN_SE, MIN_COLLAPSED_FRACTION, MONOTONE_SE,
    RATE_FIT_TOLERANCE,
};
use crate::ensemble::EnsembleResult;
use crate::rng::stream;

/// One comparison inside a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub label: String,
    pub estimate: f64,
    pub reference: f64,
    /// `estimate - reference`.
    pub effect: f64,
    pub se: f64,
    /// Largest acceptable `effect / se` (or `|effect| / se` for two-sided
    /// comparisons); for tolerance checks, the tolerance itself.
    pub limit: f64,
    pub pass: bool,
}

impl Measurement {
    fn score(effect: f64, se: f64) -> f64 {
        if se > 0.0 {
            effect / se
        } else if effect.abs() <= 1e-12 {
            0.0
        } else {
            effect.signum() * f64::INFINITY
        }
    }

    /// Passes when `|estimate - reference| < limit · se`.
    pub fn two_sided(label: impl Into<String>, estimate: f64, reference: f64, se: f64, limit: f64) -> Self {
        let effect = estimate - reference;
        let pass = Self::score(effect, se).abs() < limit;
        Self { label: label.into(), estimate, reference, effect, se, limit, pass }
    }

    /// Passes when `estimate ≤ reference + limit · se`.
    pub fn at_most(label: impl Into<String>, estimate: f64, reference: f64, se: f64, limit: f64) -> Self {
        let effect = estimate - reference;
        let pass = Self::score(effect, se) <= limit;
        Self { label: label.into(), estimate, reference, effect, se, limit, pass }
    }

    /// Passes when `|estimate - reference| ≤ tolerance · |reference|`.
    pub fn relative(label: impl Into<String>, estimate: f64, reference: f64, se: f64, tolerance: f64) -> Self {
        let effect = estimate - reference;
        let pass = effect.abs() <= tolerance * reference.abs();
        Self { label: label.into(), estimate, reference, effect, se, limit: tolerance, pass }
    }

    /// Passes when `estimate ≥ reference`.
    pub fn at_least(label: impl Into<String>, estimate: f64, reference: f64, se: f64) -> Self {
        let effect = estimate - reference;
        Self { label: label.into(), estimate, reference, effect, se, limit: 0.0, pass: effect >= 0.0 }
    }

    /// Passes when `|estimate - reference| ≤ tolerance`.
    pub fn absolute(label: impl Into<String>, estimate: f64, reference: f64, tolerance: f64) -> Self {
        let effect = estimate - reference;
        Self {
            label: label.into(),
            estimate,
            reference,
            effect,
            se: 0.0,
            limit: tolerance,
            pass: effect.abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub pass: bool,
    pub measurements: Vec<Measurement>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), pass: true, measurements: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, m: Measurement) {
        self.pass &= m.pass;
        self.measurements.push(m);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Marks the report failed with a reason.
    pub fn fail(&mut self, text: impl Into<String>) {
        self.pass = false;
        self.notes.push(text.into());
    }

    /// First failing measurement, or the first one if all pass.
    pub fn worst(&self) -> Option<&Measurement> {
        self.measurements.iter().find(|m| !m.pass).or_else(|| self.measurements.first())
    }
}

/// Born-rule frequencies against the prior `tr(Π_j ρ_0)`.
pub fn born_test(result: &EnsembleResult) -> Report {
    born_test_against(result, &result.prior)
}

/// Born-rule frequencies against an arbitrary prior; a wrong prior serves
/// as a negative control.
pub fn born_test_against(result: &EnsembleResult, prior: &[f64]) -> Report {
    let mut report = Report::new("born");
    let counts = result.outcome_counts();
    let collapsed: u64 = counts.iter().sum();
    let n = result.paths();
    let fraction = collapsed as f64 / n as f64;
    report.note(format!("{collapsed} of {n} paths collapsed (fraction {fraction:.6})"));
    if collapsed < n as u64 {
        report.note(format!("{} paths uncollapsed at the horizon", n as u64 - collapsed));
    }
    if collapsed == 0 {
        report.fail("no path collapsed; frequencies undefined");
        return report;
    }
    let total = collapsed as f64;
    for (j, (&c, &p)) in counts.iter().zip(prior).enumerate() {
        let f = c as f64 / total;
        let se = (p * (1.0 - p) / total).sqrt();
        report.push(Measurement::two_sided(format!("P(E_{})", j + 1), f, p, se, BORN_Z));
    }
    let (stat, p_value) = chi_square(&counts, prior);
    report.note(format!("chi-square {stat:.4}, p-value {p_value:.4}"));
    report
}

/// Born test plus the requirement that nearly every path collapsed.
pub fn born_collapse_test(result: &EnsembleResult) -> Report {
    let mut report = born_test(result);
    report.push(Measurement::at_least("collapsed fraction", result.collapsed_fraction(), MIN_COLLAPSED_FRACTION, 0.0));
    report
}

/// `E[H_t] = H_0` at every grid time.
pub fn martingale_test(result: &EnsembleResult) -> Report {
    let mut report = Report::new("martingale");
    let s = &result.series;
    let h0 = s.mean_h[0];
    let at = |k: usize| {
        Measurement::two_sided(format!("E[H] at t={}", result.times[k]), s.mean_h[k], h0, s.se_h[k], MEAN_SE)
    };
    for &k in &result.checkpoints {
        report.push(at(k));
    }
    let worst = (0..result.times.len())
        .map(|k| (k, Measurement::score(s.mean_h[k] - h0, s.se_h[k]).abs()))
        .fold((0, 0.0f64), |a, b| if b.1 > a.1 { b } else { a });
    if !result.checkpoints.contains(&worst.0) {
        report.push(at(worst.0));
    }
    report.note(format!(
        "largest |z| over all {} grid times: {:.3} at t={}",
        result.times.len(),
        worst.1,
        result.times[worst.0]
    ));
    report
}

/// `E[π_i π_k] ≤ ½ √(p_i p_k) e^{-Γ_ik t}`, summed into a bound on `E[V_t]`.
pub fn variance_upper_bound(
    model: &Levy,
    levels: &[f64],
    prior: &[f64],
    lambda: f64,
    t: f64,
) -> collapse_core::Result<f64> {
    let mut total = 0.0;
    for i in 0..levels.len() {
        for k in (i + 1)..levels.len() {
            let gap = levels[i] - levels[k];
            let g = gamma_rate(model, lambda, levels[i], levels[k])?;
            total += 0.5 * gap * gap * (prior[i] * prior[k]).sqrt() * (-g * t).exp();
        }
    }
    Ok(total)
}

/// `E[V_t]` non-increasing between checkpoints (paired differences) and
/// below its analytic upper bound at the horizon.
pub fn supermartingale_test(result: &EnsembleResult, scenario: &Scenario) -> Report {
    let mut report = Report::new("supermartingale");
    let v0 = result.series.mean_v[0];
    let mut prev: Vec<f64> = vec![v0; result.paths()];
    let mut prev_t = 0.0;
    for (c, &k) in result.checkpoints.iter().enumerate() {
        let cur: Vec<f64> = result.records.iter().map(|r| r.checkpoint_v[c]).collect();
        let diffs: Vec<f64> = cur.iter().zip(&prev).map(|(a, b)| a - b).collect();
        let d = mean_se(&diffs);
        report.push(Measurement::at_most(
            format!("E[V({})] - E[V({})]", result.times[k], prev_t),
            d.mean,
            0.0,
            d.se,
            MONOTONE_SE,
        ));
        prev = cur;
        prev_t = result.times[k];
    }
    let last = *result.checkpoints.last().unwrap_or(&(result.times.len() - 1));
    let t = result.times[last];
    match variance_upper_bound(&scenario.model, scenario.levels(), &result.prior, scenario.lambda, t) {
        Ok(bound) => {
            let k = last;
            report.push(Measurement::at_most(
                format!("E[V({t})] against analytic bound"),
                result.series.mean_v[k],
                bound,
                result.series.se_v[k],
                MEAN_SE,
            ));
        }
        Err(e) => report.fail(format!("analytic bound unavailable: {e}")),
    }
    report
}

/// Frobenius norm of the `(m, n)` block of `a` in the energy frame.
pub fn block_norm(spectrum: &Spectrum, a: &CMatrix<f64>, m: usize, n: usize) -> f64 {
    let frame = spectrum.to_frame(a);
    let of = spectrum.level_of();
    let mut total = 0.0;
    for (i, li) in of.iter().enumerate() {
        for (j, lj) in of.iter().enumerate() {
            if *li == m && *lj == n {
                total += frame[(i, j)].norm_sqr();
            }
        }
    }
    total.sqrt()
}

/// Fits `log ‖Π_m E[ρ_t] Π_n‖` against `t` over the span where the analytic
/// block stays above `floor` of its initial size.
pub fn fit_decay_rate(
    spectrum: &Spectrum,
    times: &[f64],
    means: &[CMatrix<f64>],
    m: usize,
    n: usize,
    t_max: f64,
) -> Option<collapse_core::stats::LinearFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(means)
        .filter(|(t, _)| **t <= t_max)
        .map(|(t, a)| (*t, block_norm(spectrum, a, m, n)))
        .filter(|(_, b)| *b > 0.0)
        .map(|(t, b)| (t, b.ln()))
        .unzip();
    (x.len() >= 3).then(|| linear_fit(&x, &y))
}

/// Ensemble-mean density against the closed-form mean at each checkpoint,
/// plus a fitted decay rate for each occupied coherence.
pub fn mean_density_test(result: &EnsembleResult, scenario: &Scenario) -> Report {
    let mut report = Report::new("mean-density");
    let n = result.paths();
    let Some(means) = result.series.mean_density.as_ref() else {
        report.fail("densities were not tracked");
        return report;
    };
    let d = scenario.spectrum.dim();
    let mut rng = stream(scenario.seed, "bootstrap", 0);
    let mut cps: Vec<(usize, Option<usize>)> = vec![(0, None)];
    cps.extend(result.checkpoints.iter().enumerate().map(|(c, &k)| (k, Some(c))));
    for (k, c) in cps {
        let t = result.times[k];
        let analytic = match mean_density(&scenario.rho0, &scenario.spectrum, &scenario.model, scenario.lambda, t) {
            Ok(m) => m,
            Err(e) => {
                report.fail(format!("analytic mean at t={t}: {e}"));
                continue;
            }
        };
        let dist = frobenius_norm_of(&(&means[k] - analytic.matrix()));
        let se = match c {
            None => 0.0,
            Some(c) => {
                let states: Vec<&CMatrix<f64>> = result.records.iter().map(|r| &r.checkpoint_states[c]).collect();
                bootstrap_frobenius_se(&states, d, &mut rng)
            }
        };
        report.push(Measurement::at_most(format!("‖E[ρ({t})] - μ({t})‖"), dist, 0.0, se, BOOTSTRAP_SE));
    }
    let prior = &result.prior;
    let horizon = *result.times.last().expect("non-empty grid");
    for m in 0..prior.len() {
        for nn in (m + 1)..prior.len() {
            let Ok(g) = gamma_rate(&scenario.model, scenario.lambda, result.levels[m], result.levels[nn]) else {
                continue;
            };
            if !(g > 0.0) || block_norm(&scenario.spectrum, scenario.rho0.matrix(), m, nn) < 1e-3 {
                continue;
            }
            let span = (2.0 / g).min(horizon);
            match fit_decay_rate(&scenario.spectrum, &result.times, means, m, nn, span) {
                Some(fit) => report.push(Measurement::relative(
                    format!("decay rate of block ({}, {})", m + 1, nn + 1),
                    -fit.slope,
                    g,
                    fit.slope_se,
                    RATE_FIT_TOLERANCE,
                )),
                None => report.note(format!("too few grid points to fit block ({}, {})", m + 1, nn + 1)),
            }
        }
    }
    report.note(format!("{n} paths, {BOOTSTRAP_RESAMPLES} bootstrap resamples"));
    report
}

/// Root-mean-square Frobenius deviation of bootstrap means from the sample
/// mean.
pub fn bootstrap_frobenius_se<R: Rng + ?Sized>(states: &[&CMatrix<f64>], d: usize, rng: &mut R) -> f64 {
    let n = states.len();
    if n < 2 {
        return 0.0;
    }
    let mean = mean_matrix(states.iter().copied(), d, n);
    let mut sq = CompensatedSum::default();
    let mut acc = CMatrix::<f64>::zeros(d, d);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        acc.fill(collapse_core::C::new(0.0, 0.0));
        for _ in 0..n {
            acc += states[rng.random_range(0..n)];
        }
        acc /= collapse_core::C::new(n as f64, 0.0);
        let dev = frobenius_norm_of(&(&acc - &mean));
        sq.add(dev * dev);
    }
    (sq.value() / BOOTSTRAP_RESAMPLES as f64).sqrt()
}

fn mean_matrix<'a>(states: impl Iterator<Item = &'a CMatrix<f64>>, d: usize, n: usize) -> CMatrix<f64> {
    let mut re = vec![CompensatedSum::default(); d * d];
    let mut im = vec![CompensatedSum::default(); d * d];
    for s in states {
        for (k, z) in s.iter().enumerate() {
            re[k].add(z.re);
            im[k].add(z.im);
        }
    }
    CMatrix::from_iterator(
        d,
        d,
        re.iter().zip(&im).map(|(a, b)| collapse_core::C::new(a.value(), b.value()) / n as f64),
    )
}

/// `P(e^{κξ_t - ψ(κ)t} > ε)` over `paths` exact Lévy paths, against the
/// Cantelli bound at each time.
pub fn cantelli_test(model: &Levy, kappa: f64, epsilon: f64, times: &[f64], paths: usize, seed: u64) -> Report {
    let mut report = Report::new(format!("cantelli/{}", model.name()));
    let psi = match model.psi(kappa) {
        Ok(v) => v,
        Err(e) => {
            report.fail(e.to_string());
            return report;
        }
    };
    let chunks: Vec<(usize, usize)> = (0..paths).step_by(CHUNK).map(|a| (a, (a + CHUNK).min(paths))).collect();
    let counts: Vec<collapse_core::Result<Vec<u64>>> = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut hits = vec![0u64; times.len()];
            for i in a..b {
                let mut rng = stream(seed, "cantelli", i as u64);
                let mut xi = 0.0;
                let mut prev = 0.0;
                for (k, &t) in times.iter().enumerate() {
                    if t > prev {
                        xi += collapse_core::levy::sample_increment(model, t - prev, &mut rng)?;
                    }
                    prev = t;
                    if kappa * xi - psi * t > epsilon.ln() {
                        hits[k] += 1;
                    }
                }
            }
            Ok(hits)
        })
        .collect();
    let mut hits = vec![0u64; times.len()];
    for c in counts {
        match c {
            Ok(h) => hits.iter_mut().zip(h).for_each(|(a, b)| *a += b),
            Err(e) => {
                report.fail(e.to_string());
                return report;
            }
        }
    }
    let nf = paths as f64;
    let mut probs = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let p = hits[k] as f64 / nf;
        let se = (p * (1.0 - p) / nf).sqrt();
        match collapse_core::levy::cantelli_bound(model, kappa, epsilon, t) {
            Ok(bound) => report.push(Measurement::at_most(format!("P(Λ({t}) > {epsilon})"), p, bound, se, BOUND_SE)),
            Err(e) => report.fail(e.to_string()),
        }
        probs.push((t, p, se));
    }
    for w in probs.windows(2) {
        let (t0, p0, s0) = w[0];
        let (t1, p1, s1) = w[1];
        let se = (s0 * s0 + s1 * s1).sqrt();
        report.push(Measurement::at_most(format!("P(Λ({t1}) > ε) - P(Λ({t0}) > ε)"), p1 - p0, 0.0, se, MONOTONE_SE));
    }
    report.note(format!("κ = {kappa}, ε = {epsilon}, {paths} paths"));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::run_ensemble;
    use crate::presets;

    #[test]
    fn degenerate_prior_gives_zero_z() {
        let mut cfg = presets::two_level("eigen", presets::brownian_noise(1.0, 1.0), 0.0);
        cfg.grid.horizon = Some(2.0.into());
        cfg.grid.steps = Some(10);
        cfg.paths = 50;
        let s = cfg.resolve().unwrap();
        let r = run_ensemble(&s).unwrap();
        let b = born_test(&r);
        assert!(b.pass);
        assert!(b.measurements.iter().all(|m| m.effect == 0.0));
        assert_eq!(r.outcome_counts(), vec![50, 0]);
    }

    #[test]
    fn wrong_prior_is_detected() {
        let mut cfg = presets::find("appendix-b").unwrap().config();
        cfg.paths = 2000;
        cfg.grid.steps = Some(100);
        let s = cfg.resolve().unwrap();
        let r = run_ensemble(&s).unwrap();
        assert!(born_test(&r).pass);
        let control = born_test_against(&r, &[0.6, 0.4]);
        assert!(!control.pass);
        assert!(control.measurements.iter().all(|m| (m.effect / m.se).abs() > BORN_Z));
    }

    #[test]
    fn brownian_preset_laws() {
        let mut cfg = presets::find("appendix-a").unwrap().config();
        cfg.paths = 2000;
        cfg.grid.steps = Some(200);
        let s = cfg.resolve().unwrap();
        let r = run_ensemble(&s).unwrap();
        let m = martingale_test(&r);
        assert!(m.pass, "{m:?}");
        let v = supermartingale_test(&r, &s);
        assert!(v.pass, "{v:?}");
        let d = mean_density_test(&r, &s);
        assert!(d.pass, "{d:?}");
        // t = 0 exact
        assert!(d.measurements[0].estimate < 1e-12);
    }

    #[test]
    fn variance_bound_at_zero_dominates_v0() {
        // ½ΔE²√(p1p2) ≥ p1p2ΔE² since √(p1p2) ≤ ½
        let model = Levy::brownian(0.0, 1.0).unwrap();
        let b = variance_upper_bound(&model, &[0.0, 1.0], &[0.3, 0.7], 1.0, 0.0).unwrap();
        assert!(b >= 0.21);
        let later = variance_upper_bound(&model, &[0.0, 1.0], &[0.3, 0.7], 1.0, 8.0).unwrap();
        assert!((later / b - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn cantelli_poisson() {
        let model = Levy::poisson(1.0).unwrap();
        let r = cantelli_test(&model, 0.7, 0.1, &[1.0, 5.0, 25.0], 4000, 5);
        assert!(r.pass, "{r:?}");
    }
}
