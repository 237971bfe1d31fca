//! Finite-dimensional states in the spectral frame of the Hamiltonian.
//!
//! The Hamiltonian is only ever held as `Ĥ = Σ_j E_j Π_j`. Dense input is
//! diagonalised once on ingestion; everything downstream works blockwise
//! over eigenspaces, so degenerate levels need no special casing.

use crate::error::{Error, Result};
use crate::scalar::{
    creal, hermitian_deviation, hermitian_eigen, hermitian_eigenvalues, hermitian_part, trace, trace_of_product,
    CMatrix, CVector, Real,
};

/// Hamiltonian in spectral form.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum<T: Real> {
    levels: Vec<T>,
    projectors: Vec<CMatrix<T>>,
    hbar: T,
    /// Unitary whose columns span the eigenspaces, grouped by level.
    frame: CMatrix<T>,
    level_of: Vec<usize>,
}

impl<T: Real> EnergySpectrum<T> {
    /// Builds a spectrum from explicit levels and projectors, checking that
    /// the projectors form an orthogonal resolution of the identity.
    pub fn new(levels: Vec<T>, projectors: Vec<CMatrix<T>>, hbar: T) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if levels.len() != projectors.len() {
            return Err(Error::InvalidSpectrum(format!("{} levels but {} projectors", levels.len(), projectors.len())));
        }
        check_hbar(hbar)?;
        for w in levels.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidSpectrum("levels must be strictly increasing".into()));
            }
        }
        let d = projectors[0].nrows();
        if d < levels.len() {
            return Err(Error::InvalidSpectrum(format!("{} levels cannot fit in dimension {d}", levels.len())));
        }
        let tol = T::tol(1e-10);
        let mut sum = CMatrix::<T>::zeros(d, d);
        for (j, p) in projectors.iter().enumerate() {
            if p.nrows() != d || p.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.nrows() });
            }
            if hermitian_deviation(p) > tol {
                return Err(Error::InvalidSpectrum(format!("projector {j} is not Hermitian")));
            }
            if max_abs(&(p * p - p)) > tol {
                return Err(Error::InvalidSpectrum(format!("projector {j} is not idempotent")));
            }
            for (k, q) in projectors.iter().enumerate().skip(j + 1) {
                if max_abs(&(p * q)) > tol {
                    return Err(Error::InvalidSpectrum(format!("projectors {j} and {k} are not orthogonal")));
                }
            }
            sum += p;
        }
        if max_abs(&(sum - CMatrix::<T>::identity(d, d))) > tol {
            return Err(Error::InvalidSpectrum("projectors do not sum to the identity".into()));
        }

        let mut columns = Vec::with_capacity(d);
        let mut level_of = Vec::with_capacity(d);
        for (j, p) in projectors.iter().enumerate() {
            let (values, vectors) = hermitian_eigen(p);
            let before = columns.len();
            for (c, v) in values.iter().enumerate() {
                if *v > T::lit(0.5) {
                    columns.push(vectors.column(c).into_owned());
                    level_of.push(j);
                }
            }
            if columns.len() == before {
                return Err(Error::InvalidSpectrum(format!("projector {j} has rank zero")));
            }
        }
        let frame = CMatrix::from_columns(&columns);
        Ok(Self { levels, projectors, hbar, frame, level_of })
    }

    /// Diagonalises a dense Hermitian matrix, merging eigenvalues closer than
    /// `degeneracy_tol` into a single level.
    pub fn from_dense(hamiltonian: &CMatrix<T>, degeneracy_tol: T) -> Result<Self> {
        let d = hamiltonian.nrows();
        if d == 0 {
            return Err(Error::EmptySpectrum);
        }
        if hamiltonian.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: hamiltonian.ncols() });
        }
        let scale = max_abs(hamiltonian).max(T::one());
        let deviation = hermitian_deviation(hamiltonian);
        if deviation > T::tol(1e-10) * scale {
            return Err(Error::NonHermitianInput { deviation: deviation.to_f64_lossy() });
        }
        let (values, vectors) = hermitian_eigen(hamiltonian);

        // single-linkage clustering of the sorted eigenvalues
        let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
        for i in 1..d {
            if values[i] - values[i - 1] <= degeneracy_tol {
                clusters.last_mut().expect("non-empty").push(i);
            } else {
                clusters.push(vec![i]);
            }
        }
        let mut levels = Vec::with_capacity(clusters.len());
        let mut projectors = Vec::with_capacity(clusters.len());
        let mut level_of = vec![0; d];
        for (j, cluster) in clusters.iter().enumerate() {
            let mean = cluster.iter().fold(T::zero(), |a, &i| a + values[i]) / T::lit(cluster.len() as f64);
            levels.push(mean);
            let mut p = CMatrix::<T>::zeros(d, d);
            for &i in cluster {
                let v = vectors.column(i);
                p += v * v.adjoint();
                level_of[i] = j;
            }
            projectors.push(p);
        }
        Ok(Self { levels, projectors, hbar: T::one(), frame: vectors, level_of })
    }

    /// [`from_dense`](Self::from_dense) with the default clustering
    /// tolerance of `1e-9` times the spectral range.
    pub fn from_dense_default(hamiltonian: &CMatrix<T>) -> Result<Self> {
        let ev = hermitian_eigenvalues(hamiltonian);
        let range = match (ev.first(), ev.last()) {
            (Some(lo), Some(hi)) => *hi - *lo,
            _ => T::zero(),
        };
        let tol = T::lit(1e-9) * if range > T::zero() { range } else { T::one() };
        Self::from_dense(hamiltonian, tol)
    }

    /// Hamiltonian diagonal in the computational basis. Equal entries share
    /// one degenerate level.
    pub fn from_diagonal(entries: &[T]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        let d = entries.len();
        let mut levels: Vec<T> = entries.to_vec();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        levels.dedup();
        let projectors = levels
            .iter()
            .map(|e| {
                CMatrix::from_fn(
                    d,
                    d,
                    |r, c| {
                        if r == c && entries[r] == *e {
                            creal(T::one())
                        } else {
                            creal(T::zero())
                        }
                    },
                )
            })
            .collect();
        Self::new(levels, projectors, T::one())
    }

    /// Replaces ħ. An infinite value switches the unitary phases off.
    pub fn with_hbar(mut self, hbar: T) -> Result<Self> {
        check_hbar(hbar)?;
        self.hbar = hbar;
        Ok(self)
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> Result<T> {
        self.levels.get(j).copied().ok_or(Error::IndexOutOfRange { index: j, levels: self.levels.len() })
    }

    pub fn projectors(&self) -> &[CMatrix<T>] {
        &self.projectors
    }

    pub fn projector(&self, j: usize) -> Result<&CMatrix<T>> {
        self.projectors.get(j).ok_or(Error::IndexOutOfRange { index: j, levels: self.levels.len() })
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// Level index of each column of [`frame`](Self::frame).
    pub fn level_of(&self) -> &[usize] {
        &self.level_of
    }

    pub fn frame(&self) -> &CMatrix<T> {
        &self.frame
    }

    /// `Σ_j E_j Π_j`.
    pub fn hamiltonian(&self) -> CMatrix<T> {
        let d = self.dim();
        self.levels.iter().zip(&self.projectors).fold(CMatrix::zeros(d, d), |acc, (e, p)| acc + p.map(|z| z * *e))
    }

    /// Expresses an operator in the energy frame (`U† A U`).
    pub fn to_frame(&self, a: &CMatrix<T>) -> CMatrix<T> {
        self.frame.adjoint() * a * &self.frame
    }

    /// Inverse of [`to_frame`](Self::to_frame).
    pub fn from_frame(&self, a: &CMatrix<T>) -> CMatrix<T> {
        &self.frame * a * self.frame.adjoint()
    }

    pub fn vector_to_frame(&self, v: &CVector<T>) -> CVector<T> {
        self.frame.adjoint() * v
    }

    pub fn vector_from_frame(&self, v: &CVector<T>) -> CVector<T> {
        &self.frame * v
    }

    /// Energy of each frame column.
    pub fn frame_energies(&self) -> Vec<T> {
        self.level_of.iter().map(|&j| self.levels[j]).collect()
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: d });
        }
        Ok(())
    }

    /// `tr(Π_j ρ)` for every level, clamped into `[0, 1]`.
    pub fn probabilities(&self, state: &DensityMatrix<T>) -> Result<Vec<T>> {
        self.check_dim(state.dim())?;
        Ok(self.projectors.iter().map(|p| clamp_unit(trace_of_product(p, state.matrix()).re)).collect())
    }

    pub fn projector_probability(&self, state: &DensityMatrix<T>, j: usize) -> Result<T> {
        self.check_dim(state.dim())?;
        let p = self.projector(j)?;
        Ok(clamp_unit(trace_of_product(p, state.matrix()).re))
    }

    /// `Σ_j E_j tr(Π_j ρ)`.
    pub fn expectation_energy(&self, state: &DensityMatrix<T>) -> Result<T> {
        let p = self.probabilities(state)?;
        Ok(self.mean_of(&p))
    }

    /// Energy variance; never negative.
    pub fn variance_energy(&self, state: &DensityMatrix<T>) -> Result<T> {
        let p = self.probabilities(state)?;
        Ok(self.variance_of(&p))
    }

    pub fn third_central_moment(&self, state: &DensityMatrix<T>) -> Result<T> {
        let p = self.probabilities(state)?;
        let mean = self.mean_of(&p);
        Ok(self.levels.iter().zip(&p).fold(T::zero(), |acc, (e, w)| acc + (*e - mean).powi(3) * *w))
    }

    /// Mean energy for a vector of level probabilities.
    pub fn mean_of(&self, probabilities: &[T]) -> T {
        self.levels.iter().zip(probabilities).fold(T::zero(), |acc, (e, w)| acc + *e * *w)
    }

    /// Energy variance for a vector of level probabilities.
    pub fn variance_of(&self, probabilities: &[T]) -> T {
        let mean = self.mean_of(probabilities);
        let v = self.levels.iter().zip(probabilities).fold(T::zero(), |acc, (e, w)| acc + (*e - mean).powi(2) * *w);
        v.max(T::zero())
    }

    /// Normalised projection `Π_j ρ Π_j / tr(Π_j ρ)`.
    pub fn luders_state(&self, state: &DensityMatrix<T>, j: usize) -> Result<DensityMatrix<T>> {
        self.check_dim(state.dim())?;
        let p = self.projector(j)?;
        let prob = trace_of_product(p, state.matrix()).re;
        if !(prob > T::lit(1e-14)) {
            return Err(Error::ZeroProbabilityBranch { level: j, probability: prob.to_f64_lossy() });
        }
        let projected = p * state.matrix() * p;
        DensityMatrix::new(projected.map(|z| z / creal(prob)))
    }
}

fn check_hbar<T: Real>(hbar: T) -> Result<()> {
    if !(hbar > T::zero()) {
        return Err(Error::NonpositiveInput("hbar"));
    }
    Ok(())
}

fn max_abs<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |m, z| m.max(z.norm_sqr().sqrt()))
}

fn clamp_unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

/// Hermitian, positive semi-definite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates and stores `matrix`.
    ///
    /// Hermiticity and trace must hold to `1e-10`; eigenvalues down to
    /// `-1e-10` are clamped to zero, anything more negative is rejected.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let d = matrix.nrows();
        if d == 0 || matrix.ncols() != d {
            return Err(Error::InvalidDensity("matrix must be square and non-empty".into()));
        }
        let tol = T::tol(1e-10);
        let dev = hermitian_deviation(&matrix);
        if !(dev <= tol) {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {:e})", dev.to_f64_lossy())));
        }
        let matrix = hermitian_part(&matrix);
        let tr = trace(&matrix).re;
        if !((tr - T::one()).abs() <= tol) {
            return Err(Error::InvalidDensity(format!("trace {} != 1", tr.to_f64_lossy())));
        }
        let (values, vectors) = hermitian_eigen(&matrix);
        let min = values[0];
        if min < -tol {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {:e}", min.to_f64_lossy())));
        }
        if min < -(T::epsilon() * T::lit(64.0)) {
            let clamped: Vec<T> = values.iter().map(|v| v.max(T::zero())).collect();
            let total = clamped.iter().fold(T::zero(), |a, v| a + *v);
            let mut rebuilt = CMatrix::<T>::zeros(d, d);
            for (i, v) in clamped.iter().enumerate() {
                if *v > T::zero() {
                    let col = vectors.column(i);
                    rebuilt += (col * col.adjoint()).map(|z| z * (*v / total));
                }
            }
            return Ok(Self { matrix: hermitian_part(&rebuilt) });
        }
        Ok(Self { matrix })
    }

    /// Divides by the trace, then validates.
    pub fn normalized(matrix: CMatrix<T>) -> Result<Self> {
        let tr = trace(&matrix).re;
        if !(tr > T::zero()) || !tr.is_finite() {
            return Err(Error::InvalidDensity(format!("cannot normalise trace {}", tr.to_f64_lossy())));
        }
        Self::new(matrix.map(|z| z / creal(tr)))
    }

    pub fn pure(state: &PureState<T>) -> Self {
        let v = state.amplitudes();
        Self { matrix: hermitian_part(&(v * v.adjoint())) }
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(populations: &[T]) -> Result<Self> {
        let d = populations.len();
        Self::new(CMatrix::from_fn(d, d, |r, c| if r == c { creal(populations[r]) } else { creal(T::zero()) }))
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        Self::from_populations(&vec![T::one() / T::lit(d as f64); d])
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> T {
        trace(&self.matrix).re
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> T {
        trace_of_product(&self.matrix, &self.matrix).re
    }

    pub fn min_eigenvalue(&self) -> T {
        hermitian_eigenvalues(&self.matrix)[0]
    }

    /// `½ ‖ρ - σ‖₁`.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let diff = &self.matrix - &other.matrix;
        let sum = hermitian_eigenvalues(&diff).iter().fold(T::zero(), |a, v| a + v.abs());
        Ok(sum * T::lit(0.5))
    }

    pub fn frobenius_distance(&self, other: &Self) -> T {
        crate::scalar::frobenius_norm(&(&self.matrix - &other.matrix))
    }
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    amplitudes: CVector<T>,
}

impl<T: Real> PureState<T> {
    pub fn new(amplitudes: CVector<T>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty vector".into()));
        }
        let norm = amplitudes.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
        if !((norm - T::one()).abs() <= T::tol(1e-12)) {
            return Err(Error::InvalidState(format!("norm {} != 1", norm.to_f64_lossy())));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm.
    pub fn normalized(amplitudes: CVector<T>) -> Result<Self> {
        let norm = amplitudes.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(Self { amplitudes: amplitudes.map(|z| z / creal(norm)) })
    }

    /// Real amplitudes, normalised.
    pub fn from_real(amplitudes: &[T]) -> Result<Self> {
        Self::normalized(CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|a| creal(*a))))
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        DensityMatrix::pure(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;
    use approx::assert_abs_diff_eq;

    fn diag(entries: &[f64]) -> CMatrix<f64> {
        let d = entries.len();
        CMatrix::from_fn(d, d, |r, c| if r == c { creal(entries[r]) } else { creal(0.0) })
    }

    fn assert_matrix_eq(a: &CMatrix<f64>, b: &CMatrix<f64>, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).norm() < tol, "{a} != {b}");
        }
    }

    #[test]
    fn dense_diagonal_with_degeneracy() {
        let s = EnergySpectrum::from_dense(&diag(&[0.0, 0.0, 2.0]), 1e-9).unwrap();
        assert_eq!(s.levels(), &[0.0, 2.0]);
        assert_matrix_eq(&s.projectors()[0], &diag(&[1.0, 1.0, 0.0]), 1e-12);
        assert_matrix_eq(&s.projectors()[1], &diag(&[0.0, 0.0, 1.0]), 1e-12);
    }

    #[test]
    fn scaled_identity_is_one_level() {
        let s = EnergySpectrum::from_dense_default(&diag(&[5.0; 4])).unwrap();
        assert_eq!(s.n_levels(), 1);
        assert_abs_diff_eq!(s.levels()[0], 5.0, epsilon = 1e-12);
        assert_matrix_eq(&s.projectors()[0], &CMatrix::identity(4, 4), 1e-12);
    }

    #[test]
    fn pauli_x_eigenprojectors() {
        let x = CMatrix::from_row_slice(2, 2, &[creal(0.0), creal(1.0), creal(1.0), creal(0.0)]);
        let s = EnergySpectrum::from_dense(&x, 1e-9).unwrap();
        assert_abs_diff_eq!(s.levels()[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.levels()[1], 1.0, epsilon = 1e-12);
        let minus = CMatrix::from_row_slice(2, 2, &[creal(0.5), creal(-0.5), creal(-0.5), creal(0.5)]);
        let plus = CMatrix::from_row_slice(2, 2, &[creal(0.5), creal(0.5), creal(0.5), creal(0.5)]);
        assert_matrix_eq(&s.projectors()[0], &minus, 1e-12);
        assert_matrix_eq(&s.projectors()[1], &plus, 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_and_empty() {
        let a = CMatrix::from_row_slice(2, 2, &[creal(0.0), creal(1.0), creal(0.0), creal(0.0)]);
        assert!(matches!(EnergySpectrum::from_dense(&a, 1e-9), Err(Error::NonHermitianInput { .. })));
        assert_eq!(EnergySpectrum::<f64>::from_dense(&CMatrix::zeros(0, 0), 1e-9), Err(Error::EmptySpectrum));
    }

    #[test]
    fn reassembly_reproduces_hamiltonian() {
        let h = CMatrix::from_row_slice(
            3,
            3,
            &[
                creal(1.0),
                cplx(0.2, 0.3),
                creal(0.0),
                cplx(0.2, -0.3),
                creal(-0.5),
                cplx(0.0, 0.7),
                creal(0.0),
                cplx(0.0, -0.7),
                creal(2.0),
            ],
        );
        let s = EnergySpectrum::from_dense_default(&h).unwrap();
        assert_eq!(s.n_levels(), 3);
        assert_matrix_eq(&s.hamiltonian(), &h, 1e-8);
        // frame diagonalises Ĥ
        let hf = s.to_frame(&h);
        let e = s.frame_energies();
        assert_matrix_eq(&hf, &diag(&e), 1e-10);
    }

    #[test]
    fn new_rejects_incomplete_or_overlapping_projectors() {
        let p = diag(&[1.0, 0.0]);
        assert!(EnergySpectrum::new(vec![0.0], vec![p.clone()], 1.0).is_err());
        assert!(EnergySpectrum::new(vec![0.0, 1.0], vec![p.clone(), p], 1.0).is_err());
        assert!(EnergySpectrum::new(vec![1.0, 0.0], vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])], 1.0).is_err());
    }

    #[test]
    fn energy_moments() {
        let s = EnergySpectrum::from_diagonal(&[0.0, 2.0]).unwrap();
        let rho = DensityMatrix::from_populations(&[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(s.expectation_energy(&rho).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.variance_energy(&rho).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.third_central_moment(&rho).unwrap(), 0.0, epsilon = 1e-12);

        let s = EnergySpectrum::from_diagonal(&[0.0, 1.0]).unwrap();
        let rho = DensityMatrix::from_populations(&[0.3, 0.7]).unwrap();
        assert_abs_diff_eq!(s.expectation_energy(&rho).unwrap(), 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(s.projector_probability(&rho, 1).unwrap(), 0.7, epsilon = 1e-12);
        let rho = DensityMatrix::from_populations(&[0.25, 0.75]).unwrap();
        assert_abs_diff_eq!(s.third_central_moment(&rho).unwrap(), -0.09375, epsilon = 1e-12);

        let s = EnergySpectrum::from_diagonal(&[0.0, 1.0, 2.0]).unwrap();
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        assert_abs_diff_eq!(s.variance_energy(&rho).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn eigenstate_has_no_spread() {
        let s = EnergySpectrum::from_diagonal(&[0.0, 0.0, 3.0]).unwrap();
        let rho = DensityMatrix::from_populations(&[0.5, 0.5, 0.0]).unwrap();
        assert_abs_diff_eq!(s.expectation_energy(&rho).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.variance_energy(&rho).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.projector_probability(&rho, 0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dimension_and_index_errors() {
        let s = EnergySpectrum::from_diagonal(&[0.0, 1.0]).unwrap();
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(s.expectation_energy(&rho), Err(Error::DimensionMismatch { .. })));
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(matches!(s.projector_probability(&rho, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn maximally_mixed_with_rank_two_projector() {
        let s = EnergySpectrum::from_diagonal(&[0.0, 0.0, 1.0, 2.0]).unwrap();
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        assert_abs_diff_eq!(s.projector_probability(&rho, 0).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn luders_projection() {
        let s = EnergySpectrum::from_diagonal(&[0.0, 1.0]).unwrap();
        let psi = PureState::from_real(&[1.0, 1.0]).unwrap();
        let l = s.luders_state(&psi.to_density(), 0).unwrap();
        assert_matrix_eq(l.matrix(), &diag(&[1.0, 0.0]), 1e-12);

        // an eigenstate is left alone
        let l2 = s.luders_state(&l, 0).unwrap();
        assert_matrix_eq(l2.matrix(), l.matrix(), 1e-12);
        assert!(matches!(s.luders_state(&l, 1), Err(Error::ZeroProbabilityBranch { .. })));

        let s = EnergySpectrum::from_diagonal(&[0.0, 0.0, 1.0]).unwrap();
        let l = s.luders_state(&DensityMatrix::maximally_mixed(3).unwrap(), 0).unwrap();
        assert_matrix_eq(l.matrix(), &diag(&[0.5, 0.5, 0.0]), 1e-12);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(diag(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::new(diag(&[1.5, -0.5])).is_err());
        let tiny_negative = DensityMatrix::new(diag(&[1.0 + 5e-11, -5e-11])).unwrap();
        assert!(tiny_negative.min_eigenvalue() >= 0.0);
        let off = CMatrix::from_row_slice(2, 2, &[creal(0.5), creal(0.1), creal(0.2), creal(0.5)]);
        assert!(DensityMatrix::new(off).is_err());
        assert!(PureState::new(CVector::from_vec(vec![creal(1.0), creal(1.0)])).is_err());
    }

    #[test]
    fn single_precision_spectrum() {
        let s = EnergySpectrum::<f32>::from_diagonal(&[0.0, 2.0]).unwrap();
        let rho = DensityMatrix::<f32>::from_populations(&[0.5, 0.5]).unwrap();
        assert!((s.variance_energy(&rho).unwrap() - 1.0).abs() < 1e-6);
    }
}
