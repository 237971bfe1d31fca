//! Adaptive Gauss–Kronrod (7/15) quadrature, generic over the scalar type.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_INTERVALS: usize = 4000;

/// Requested accuracy: the estimate stops refining once the error bound is
/// below `max(abs, rel * |I|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-14, rel: 1e-11 }
    }
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn kronrod<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Result<Segment<T>> {
    let half = T::lit(0.5);
    let center = (a + b) * half;
    let h = (b - a) * half;
    let fc = f(center);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    let mut abs_k = fc.abs() * T::lit(WGK[7]);
    let mut fv = [T::zero(); 15];
    fv[7] = fc;
    for i in 0..7 {
        let dx = h * T::lit(XGK[i]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[i] = f1;
        fv[14 - i] = f2;
        k += (f1 + f2) * T::lit(WGK[i]);
        abs_k += (f1.abs() + f2.abs()) * T::lit(WGK[i]);
        if i % 2 == 1 {
            g += (f1 + f2) * T::lit(WG[i / 2]);
        }
    }
    if !k.is_finite() {
        return Err(Error::QuadratureFailure(format!(
            "non-finite integrand on [{}, {}]",
            a.to_f64_lossy(),
            b.to_f64_lossy()
        )));
    }
    let mean = k * half;
    let mut asc = (fc - mean).abs() * T::lit(WGK[7]);
    for i in 0..7 {
        asc += ((fv[i] - mean).abs() + (fv[14 - i] - mean).abs()) * T::lit(WGK[i]);
    }
    let hk = h.abs();
    let asc = asc * hk;
    let mut err = ((k - g) * h).abs();
    if asc > T::zero() && err > T::zero() {
        let ratio = (T::lit(200.0) * err / asc).powf(T::lit(1.5));
        err = asc * ratio.min(T::one());
    }
    let floor = T::epsilon() * T::lit(50.0) * abs_k * hk;
    if floor > err {
        err = floor;
    }
    Ok(Segment { a, b, value: k * h, error: err })
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: Tolerance) -> Result<T> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureFailure("interval must be finite".into()));
    }
    if a == b {
        return Ok(T::zero());
    }
    let abs_tol = T::lit(tol.abs);
    let rel_tol = T::lit(tol.rel).max(T::epsilon() * T::lit(50.0));
    let mut segments = vec![kronrod(&f, a, b)?];
    loop {
        let total = segments.iter().fold(T::zero(), |s, g| s + g.value);
        let err = segments.iter().fold(T::zero(), |s, g| s + g.error);
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if segments.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureFailure(format!(
                "no convergence after {MAX_INTERVALS} subdivisions (error {:e})",
                err.to_f64_lossy()
            )));
        }
        let worst = (0..segments.len())
            .max_by(|&i, &j| segments[i].error.partial_cmp(&segments[j].error).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = (seg.a + seg.b) * T::lit(0.5);
        if !(mid > seg.a.min(seg.b) && mid < seg.a.max(seg.b)) {
            return Err(Error::QuadratureFailure(format!(
                "interval near {} cannot be refined further (error {:e})",
                seg.a.to_f64_lossy(),
                err.to_f64_lossy()
            )));
        }
        segments.push(kronrod(&f, seg.a, mid)?);
        segments.push(kronrod(&f, mid, seg.b)?);
    }
}

/// Integrates over `[a, ∞)` (or `(-∞, a]` when `upward` is false).
///
/// The range is cut where the integrand has fallen below `1e-16` of the
/// largest value seen while scanning outwards from `a` in doubling steps;
/// `scale` sets the first step.
pub fn integrate_tail<T: Real, F: Fn(T) -> T>(f: F, a: T, upward: bool, scale: T, tol: Tolerance) -> Result<T> {
    let dir = if upward { T::one() } else { -T::one() };
    let scale = if scale > T::zero() { scale } else { T::one() };
    let cutoff = T::lit(1e-16);
    let mut peak = T::zero();
    let mut step = scale;
    let mut quiet = 0;
    let mut end = a;
    for _ in 0..200 {
        end = a + dir * step;
        let v = f(end).abs();
        if !v.is_finite() {
            return Err(Error::QuadratureFailure(format!("integrand is not finite at {}", end.to_f64_lossy())));
        }
        // sample the interior too, so a peak between scan points is seen
        for frac in [0.25, 0.5, 0.75] {
            let w = f(a + dir * step * T::lit(frac)).abs();
            if w.is_finite() && w > peak {
                peak = w;
            }
        }
        if v > peak {
            peak = v;
        }
        if v <= cutoff * peak || (peak == T::zero() && step > scale * T::lit(1e3)) {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        step *= T::lit(2.0);
    }
    if quiet < 2 {
        return Err(Error::QuadratureFailure("integrand does not decay in the tail".into()));
    }
    // geometric pieces, so features near `a` are not lost in one wide panel
    let mut total = T::zero();
    let mut lo = T::zero();
    let mut width = scale;
    let reach = (end - a).abs();
    while lo < reach {
        let hi = (lo + width).min(reach);
        total += integrate(&f, a + dir * lo, a + dir * hi, tol)? * dir;
        lo = hi;
        width *= T::lit(2.0);
    }
    Ok(total)
}
