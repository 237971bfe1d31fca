//! Euler–Maruyama integration of the Brownian reduction equations, used as
//! an independent check on the closed-form filter.
//!
//! Both schemes work in the energy frame, where `Ĥ` is diagonal and every
//! update is elementwise.

use crate::error::{Error, Result};
use crate::information::TimeGrid;
use crate::quantum::{DensityMatrix, EnergySpectrum, PureState};
use crate::scalar::{cplx, creal, hermitian_eigen, hermitian_part, trace, CMatrix, Real};

fn check_inputs<T: Real>(dw: &[T], grid: &TimeGrid<T>, sigma: T) -> Result<()> {
    if dw.len() + 1 != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len() - 1, found: dw.len() });
    }
    if !sigma.is_finite() || sigma < T::zero() {
        return Err(Error::InvalidParameter("sigma must be finite and nonnegative".into()));
    }
    Ok(())
}

/// Integrates
/// `d|ψ⟩ = [-iĤ/ħ - ⅛σ²(Ĥ - H_t)²]|ψ⟩ dt + ½σ(Ĥ - H_t)|ψ⟩ dW_t`,
/// renormalising after each step. Returns the state at every grid time.
pub fn euler_maruyama_vector<T: Real>(
    psi0: &PureState<T>,
    spectrum: &EnergySpectrum<T>,
    sigma: T,
    dw: &[T],
    grid: &TimeGrid<T>,
) -> Result<Vec<PureState<T>>> {
    check_inputs(dw, grid, sigma)?;
    if psi0.dim() != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: spectrum.dim(), found: psi0.dim() });
    }
    let e = spectrum.frame_energies();
    let hbar = spectrum.hbar();
    let eighth = T::lit(0.125) * sigma * sigma;
    let half_sigma = T::lit(0.5) * sigma;
    let mut c = spectrum.vector_to_frame(psi0.amplitudes());
    let mut out = Vec::with_capacity(grid.len());
    out.push(psi0.clone());
    for (step, (w, dwk)) in grid.times().windows(2).zip(dw).enumerate() {
        let dt = w[1] - w[0];
        let h = c.iter().zip(&e).fold(T::zero(), |a, (z, en)| a + z.norm_sqr() * *en);
        for (z, en) in c.iter_mut().zip(&e) {
            let dev = *en - h;
            let drift = cplx(-eighth * dev * dev, -*en / hbar) * dt;
            *z += *z * (drift + creal(half_sigma * dev * *dwk));
        }
        let norm = c.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
        if !(norm > T::lit(1e-12)) || !norm.is_finite() {
            return Err(Error::StepUnstable {
                step,
                detail: format!("norm {:e} before renormalisation", norm.to_f64_lossy()),
            });
        }
        c = c.map(|z| z / creal(norm));
        out.push(PureState::normalized(spectrum.vector_from_frame(&c))?);
    }
    Ok(out)
}

/// Integrates
/// `dρ = -iħ⁻¹[Ĥ, ρ] dt + ¼σ² (ĤρĤ - ½{Ĥ², ρ}) dt + ½σ{Ĥ - H_t, ρ} dW_t`,
/// renormalising the trace after each step.
///
/// The scheme can leave `ρ` slightly non-positive: the missing Itô term is
/// of order `σ² V dt (ΔW²/dt - 1)`. Negative eigenvalues within that scale
/// are projected out; anything beyond it is reported as unstable.
pub fn euler_maruyama_density<T: Real>(
    rho0: &DensityMatrix<T>,
    spectrum: &EnergySpectrum<T>,
    sigma: T,
    dw: &[T],
    grid: &TimeGrid<T>,
) -> Result<Vec<DensityMatrix<T>>> {
    check_inputs(dw, grid, sigma)?;
    if rho0.dim() != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: spectrum.dim(), found: rho0.dim() });
    }
    let e = spectrum.frame_energies();
    let d = e.len();
    let hbar = spectrum.hbar();
    let quarter = T::lit(0.25) * sigma * sigma;
    let half = T::lit(0.5);
    let half_sigma = half * sigma;
    let (lo, hi) = e.iter().fold((e[0], e[0]), |(a, b), x| (a.min(*x), b.max(*x)));
    let spread2 = (hi - lo) * (hi - lo);
    let mut rho = spectrum.to_frame(rho0.matrix());
    let mut out = Vec::with_capacity(grid.len());
    out.push(rho0.clone());
    for (step, (w, dwk)) in grid.times().windows(2).zip(dw).enumerate() {
        let dt = w[1] - w[0];
        let h = (0..d).fold(T::zero(), |a, i| a + rho[(i, i)].re * e[i]);
        rho = CMatrix::from_fn(d, d, |a, b| {
            let (ea, eb) = (e[a], e[b]);
            let lind = quarter * (ea * eb - half * ea * ea - half * eb * eb);
            let coef = cplx(lind, -(ea - eb) / hbar) * dt + creal(half_sigma * (ea + eb - h - h) * *dwk);
            rho[(a, b)] + rho[(a, b)] * coef
        });
        rho = hermitian_part(&rho);
        let tr = trace(&rho).re;
        if !(tr > T::lit(1e-12)) || !tr.is_finite() {
            return Err(Error::StepUnstable { step, detail: format!("trace {:e}", tr.to_f64_lossy()) });
        }
        rho = rho.map(|z| z / creal(tr));
        let (values, vectors) = hermitian_eigen(&rho);
        let allowed = T::lit(1e-6).max(T::lit(10.0) * sigma * sigma * spread2 * dt);
        if values[0] < -allowed {
            return Err(Error::StepUnstable { step, detail: format!("eigenvalue {:e}", values[0].to_f64_lossy()) });
        }
        if values[0] < T::zero() {
            let clamped: Vec<T> = values.iter().map(|v| v.max(T::zero())).collect();
            let total = clamped.iter().fold(T::zero(), |a, v| a + *v);
            let mut rebuilt = CMatrix::<T>::zeros(d, d);
            for (i, v) in clamped.iter().enumerate() {
                if *v > T::zero() {
                    let col = vectors.column(i);
                    rebuilt += (col * col.adjoint()).map(|z| z * (*v / total));
                }
            }
            rho = hermitian_part(&rebuilt);
        }
        out.push(DensityMatrix::new(spectrum.from_frame(&rho))?);
    }
    Ok(out)
}

/// `tr(Π_j ρ)` for each level, read off a frame-diagonal.
pub fn level_populations<T: Real>(spectrum: &EnergySpectrum<T>, psi: &PureState<T>) -> Vec<T> {
    let c = spectrum.vector_to_frame(psi.amplitudes());
    let mut p = vec![T::zero(); spectrum.n_levels()];
    for (z, j) in c.iter().zip(spectrum.level_of()) {
        p[*j] += z.norm_sqr();
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::information::{innovations_path, sample_information_path, Signal};
    use crate::levy::LevyModel;
    use crate::reduction::Reducer;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, dt: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * dt.sqrt()
            })
            .collect()
    }

    #[test]
    fn zero_sigma_is_unitary() {
        let sp = EnergySpectrum::<f64>::from_diagonal(&[0.0, 1.0]).unwrap();
        let psi = PureState::from_real(&[1.0, 1.0]).unwrap();
        let grid = TimeGrid::uniform(1e-3, 1.0).unwrap();
        let dw = vec![0.0; grid.len() - 1];
        let path = euler_maruyama_vector(&psi, &sp, 0.0, &dw, &grid).unwrap();
        let last = path.last().unwrap().amplitudes();
        // relative phase e^{-i t}; per-step error O(dt²), accumulated O(dt)
        let rel = last[1] / last[0];
        assert!((rel.arg() + 1.0).abs() < 2e-3);

        let rho = psi.to_density();
        let states = euler_maruyama_density(&rho, &sp, 0.0, &dw, &grid).unwrap();
        for s in states.iter().step_by(100) {
            assert!((s.min_eigenvalue()).abs() < 1e-8);
            assert!((s.purity() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn eigenstate_is_fixed() {
        let sp = EnergySpectrum::<f64>::from_diagonal(&[0.0, 1.0, 2.0]).unwrap();
        let psi = PureState::from_real(&[0.0, 1.0, 0.0]).unwrap();
        let grid = TimeGrid::uniform(1e-2, 2.0).unwrap();
        let dw = noise(grid.len() - 1, 1e-2, 1);
        let path = euler_maruyama_vector(&psi, &sp, 3.0, &dw, &grid).unwrap();
        let p = level_populations(&sp, path.last().unwrap());
        assert!((p[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn density_matches_vector_for_pure_state() {
        let sp = EnergySpectrum::<f64>::from_diagonal(&[0.0, 1.0]).unwrap();
        let psi = PureState::from_real(&[0.3f64.sqrt(), 0.7f64.sqrt()]).unwrap();
        let mut errs = Vec::new();
        for dt in [4e-3, 1e-3] {
            let grid = TimeGrid::uniform(dt, 2.0).unwrap();
            let mut worst: f64 = 0.0;
            for seed in 0..20 {
                let dw = noise(grid.len() - 1, dt, 100 + seed);
                let v = euler_maruyama_vector(&psi, &sp, 1.0, &dw, &grid).unwrap();
                let r = euler_maruyama_density(&psi.to_density(), &sp, 1.0, &dw, &grid).unwrap();
                for (a, b) in v.iter().zip(&r) {
                    worst = worst.max(a.to_density().frobenius_distance(b));
                }
            }
            errs.push(worst);
        }
        assert!(errs[0] < 0.1 && errs[1] < 0.05, "{errs:?}");
        assert!(errs[1] < errs[0]);
    }

    #[test]
    fn tracks_closed_form() {
        let model = LevyModel::brownian(0.0, 1.0).unwrap();
        let sp = EnergySpectrum::<f64>::from_diagonal(&[0.0, 1.0]).unwrap();
        let psi = PureState::from_real(&[1.0, 1.0]).unwrap();
        let rho0 = psi.to_density();
        let signal = Signal::from_state(&sp, &rho0, 1.0).unwrap();
        let reducer = Reducer::new(&model, &sp, &rho0, 1.0).unwrap();
        let grid = TimeGrid::uniform(1e-3, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let path = sample_information_path(&model, &signal, 1, &grid, &mut rng).unwrap();
        let post: Vec<Vec<f64>> = path.records().map(|(t, x)| reducer.posteriors(x, t).unwrap()).collect();
        let h: Vec<f64> = post.iter().map(|p| p[1]).collect();
        let w = innovations_path(&path, &h, 1.0).unwrap();
        let dw: Vec<f64> = w.windows(2).map(|x| x[1] - x[0]).collect();
        let em = euler_maruyama_vector(&psi, &sp, 1.0, &dw, &grid).unwrap();
        let err = em.iter().zip(&post).map(|(s, p)| (level_populations(&sp, s)[1] - p[1]).abs()).fold(0.0, f64::max);
        assert!(err < 0.05, "{err}");
    }

    #[test]
    fn mixed_diagonal_is_a_martingale() {
        let sp = EnergySpectrum::<f64>::from_diagonal(&[0.0, 1.0]).unwrap();
        let rho0 = DensityMatrix::from_populations(&[0.5, 0.5]).unwrap();
        let grid = TimeGrid::uniform(1e-2, 1.0).unwrap();
        let n = 1000;
        let finals: Vec<f64> = (0..n)
            .map(|k| {
                let dw = noise(grid.len() - 1, 1e-2, 1000 + k);
                let r = euler_maruyama_density(&rho0, &sp, 1.0, &dw, &grid).unwrap();
                r.last().unwrap().matrix()[(0, 0)].re
            })
            .collect();
        let mean = finals.iter().sum::<f64>() / n as f64;
        let var = finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!((mean - 0.5).abs() < 4.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn mismatched_noise_length() {
        let sp = EnergySpectrum::<f64>::from_diagonal(&[0.0, 1.0]).unwrap();
        let psi = PureState::from_real(&[1.0, 1.0]).unwrap();
        let grid = TimeGrid::uniform(0.1, 1.0).unwrap();
        assert!(euler_maruyama_vector(&psi, &sp, 1.0, &[0.0; 3], &grid).is_err());
    }
}
