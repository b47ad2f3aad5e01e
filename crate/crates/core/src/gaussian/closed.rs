use num_complex::Complex;

use super::{check_a, GaussianParams, ModelParams};
use crate::error::{domain, Result};
use crate::numerics::quadrature::trapezoid_fn;
use crate::scalar::{c, Real};

/// Trapezoid panels per unit time for the `c(t)` quadrature.
pub const PANELS_PER_UNIT_TIME: f64 = 1e4;

fn panels<T: Real>(t: T) -> usize {
    (t.abs().as_f64() * PANELS_PER_UNIT_TIME).ceil().max(1.0) as usize
}

/// `c(t) = c(0) + ∫ (i b²/2 - i a) dτ` along a closed-form `(a, b)` path.
fn integrate_c<T: Real>(c0: Complex<T>, t: T, path: impl Fn(T) -> (Complex<T>, Complex<T>)) -> Complex<T> {
    if t == T::zero() {
        return c0;
    }
    let n = panels(t);
    let half = c::<T>(0.5);
    let re = trapezoid_fn(T::zero(), t, n, |s| {
        let (a, b) = path(s);
        a.im - b.re * b.im
    });
    let im = trapezoid_fn(T::zero(), t, n, |s| {
        let (a, b) = path(s);
        -a.re + half * (b.re * b.re - b.im * b.im)
    });
    c0 + Complex::new(re, im)
}

fn free_path<T: Real>(a: Complex<T>, b: Complex<T>, t: T) -> (Complex<T>, Complex<T>) {
    let den = Complex::new(T::one(), T::zero()) + Complex::new(T::zero(), c::<T>(2.0) * t) * a;
    (a / den, b / den)
}

/// Free-particle solution: `a(t) = a/(1 + 2iat)`, `b(t) = b/(1 + 2iat)`, `c(t)` by quadrature.
pub fn free_closed_form<T: Real>(p0: &GaussianParams<T>, t: T) -> Result<GaussianParams<T>> {
    check_a(p0.a.re)?;
    let (a, b) = free_path(p0.a, p0.b, t);
    let cc = integrate_c(p0.c, t, |s| free_path(p0.a, p0.b, s));
    Ok(GaussianParams { a, b, c: cc })
}

/// Harmonic path written with `s = sin(ωt)/ω`, regular for every `t` and at `ω = 0`.
fn harmonic_path<T: Real>(a: Complex<T>, b: Complex<T>, omega: T, t: T) -> (Complex<T>, Complex<T>) {
    let wt = omega * t;
    let cs = wt.cos();
    let s = if omega == T::zero() { t } else { wt.sin() / omega };
    let i = Complex::new(T::zero(), T::one());
    let den = Complex::new(cs, T::zero()) + i * a * (c::<T>(2.0) * s);
    let num = a * cs + i * (omega * omega * s / c::<T>(2.0));
    (num / den, b / den)
}

/// Harmonic-oscillator solution.
///
/// Algebraically identical to the cot/sin expressions of
/// [`harmonic_closed_form_cot`] but free of the removable singularity at
/// `sin(ωt) = 0`.
pub fn harmonic_closed_form<T: Real>(p0: &GaussianParams<T>, m: &ModelParams<T>, t: T) -> Result<GaussianParams<T>> {
    check_a(p0.a.re)?;
    if !(m.omega >= T::zero()) {
        return Err(domain("omega must be non-negative"));
    }
    let (a, b) = harmonic_path(p0.a, p0.b, m.omega, t);
    let cc = integrate_c(p0.c, t, |s| harmonic_path(p0.a, p0.b, m.omega, s));
    Ok(GaussianParams { a, b, c: cc })
}

/// Literal cot/sin form of `(a(t), b(t))`; `None` when `|sin ωt| < 1e-6`.
pub fn harmonic_closed_form_cot<T: Real>(
    p0: &GaussianParams<T>,
    m: &ModelParams<T>,
    t: T,
) -> Option<(Complex<T>, Complex<T>)> {
    let w = m.omega;
    let sn = (w * t).sin();
    if sn.abs() < c::<T>(1e-6) {
        return None;
    }
    let ct = (w * t).cos() / sn;
    let i = Complex::new(T::zero(), T::one());
    let two = c::<T>(2.0);
    let d = p0.a - i * (w * ct / two);
    let a = -i * (w * ct / two) + Complex::new(w * w / (c::<T>(4.0) * sn * sn), T::zero()) / d;
    let b = -i * p0.b * w / (d * (two * sn));
    Some((a, b))
}

/// Logarithmic `c(t) = c + ln[√(ω/2πi sin ωt) √(π/(a - iω cot(ωt)/2))]` with principal branches.
///
/// Valid only for `b = 0`; agrees with the quadrature up to the square-root branch.
pub fn harmonic_log_c_cot<T: Real>(p0: &GaussianParams<T>, m: &ModelParams<T>, t: T) -> Option<Complex<T>> {
    let w = m.omega;
    let sn = (w * t).sin();
    if sn.abs() < c::<T>(1e-6) {
        return None;
    }
    let i = Complex::new(T::zero(), T::one());
    let two = c::<T>(2.0);
    let d = p0.a - i * (w * (w * t).cos() / (two * sn));
    let first = (Complex::new(w, T::zero()) / (i * (two * T::PI() * sn))).sqrt();
    let second = (Complex::new(T::PI(), T::zero()) / d).sqrt();
    Some(p0.c + (first * second).ln())
}
