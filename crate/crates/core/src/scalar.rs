//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::{Complex, DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable by the collapse machinery: `f32` or `f64`.
///
/// Arithmetic and transcendental functions come from [`RealField`]; the
/// primitive conversions are used to move constants in and statistics out.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    /// Machine epsilon of the type.
    fn epsilon() -> Self;

    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// A tolerance of `base`, widened to what the type can actually resolve.
    ///
    /// For `f64` this is `base` for every tolerance used in the crate; for
    /// `f32` it saturates near `1e-4`.
    #[inline]
    fn tol(base: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(1000.0);
        let base = Self::lit(base);
        if base > floor {
            base
        } else {
            floor
        }
    }

    #[inline]
    fn infinity() -> Self {
        Self::lit(f64::INFINITY)
    }
}

impl Real for f64 {
    #[inline]
    fn epsilon() -> Self {
        f64::EPSILON
    }
}

impl Real for f32 {
    #[inline]
    fn epsilon() -> Self {
        f32::EPSILON
    }
}

pub type C<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `e^{-i angle}` with the angle reduced into `[0, 2π)` first.
pub(crate) fn phase<T: Real>(angle: T) -> Complex<T> {
    if !angle.is_finite() {
        return creal(T::one());
    }
    let two_pi = T::two_pi();
    let reduced = angle - (angle / two_pi).floor() * two_pi;
    let (s, c) = reduced.sin_cos();
    cplx(c, -s)
}

/// Largest absolute entry of `a - a^†`.
pub(crate) fn hermitian_deviation<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.nrows();
    let mut dev = T::zero();
    for i in 0..n {
        for j in i..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm_sqr().sqrt();
            if d > dev {
                dev = d;
            }
        }
    }
    dev
}

pub(crate) fn hermitian_part<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let half = T::lit(0.5);
    (a + a.adjoint()).map(|z| z * half)
}

pub(crate) fn trace<T: Real>(a: &CMatrix<T>) -> Complex<T> {
    (0..a.nrows()).fold(creal(T::zero()), |acc, i| acc + a[(i, i)])
}

/// `tr(a b)` without forming the product.
pub(crate) fn trace_of_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Complex<T> {
    let n = a.nrows();
    let mut acc = creal(T::zero());
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn frobenius_norm<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    if a.nrows() == 1 {
        return vec![a[(0, 0)].re];
    }
    let mut ev: Vec<T> = hermitian_part(a).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Ascending eigenpairs of a Hermitian matrix; eigenvectors are columns.
pub(crate) fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(a.nrows(), a.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_saturates_for_single_precision() {
        assert_eq!(<f64 as Real>::tol(1e-10), 1e-10);
        assert!(<f32 as Real>::tol(1e-10) > 1e-5);
    }

    #[test]
    fn phase_reduction_matches_direct_evaluation() {
        let a = 12345.678_f64;
        let z = phase(a);
        assert!((z.re - a.cos()).abs() < 1e-9);
        assert!((z.im + a.sin()).abs() < 1e-9);
        assert_eq!(phase(f64::INFINITY * 0.0_f64.signum()), creal(1.0));
    }
}
