//! Gaussian wavepackets `ψ = exp(-a x² + b x + c)` with `Re a > 0`.
//!
//! Real coordinates are ordered `(a_R, a_I, b_R, b_I, c_R, c_I)`. The flows are
//! generated by `H = p²/2 + ω² x²/2 + λ x⁴/2` with `ħ = m = 1`.

mod closed;
mod darboux;

pub use closed::{free_closed_form, harmonic_closed_form, harmonic_closed_form_cot, harmonic_log_c_cot, PANELS_PER_UNIT_TIME};
pub use darboux::{
    darboux_jacobian, free_darboux_field, free_invariants, from_darboux, harmonic_darboux_field, harmonic_invariants,
    to_darboux, to_linearizing, DarbouxCoords, LinearizingVars,
};

use num_complex::Complex;

use crate::error::{domain, Result};
use crate::numerics::linalg::SquareMatrix;
use crate::scalar::{c, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
}

fn check_a<T: Real>(a_r: T) -> Result<()> {
    if a_r > T::zero() && a_r.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("Gaussian width parameter a_R = {a_r} must be positive")))
    }
}

impl<T: Real> GaussianParams<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Result<Self> {
        check_a(a.re)?;
        if [a.im, b.re, b.im, c.re, c.im].iter().any(|v| !v.is_finite()) {
            return Err(domain("non-finite Gaussian parameter"));
        }
        Ok(Self { a, b, c })
    }

    /// Parameters with `c` chosen so that `‖ψ‖ = 1` and `c_I = 0`.
    pub fn normalized(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        check_a(a.re)?;
        Self::new(a, b, Complex::new(normalizing_c_r(a.re, b.re), T::zero()))
    }

    pub fn from_real(v: [T; 6]) -> Result<Self> {
        Self::new(Complex::new(v[0], v[1]), Complex::new(v[2], v[3]), Complex::new(v[4], v[5]))
    }

    pub fn to_real(&self) -> [T; 6] {
        [self.a.re, self.a.im, self.b.re, self.b.im, self.c.re, self.c.im]
    }

    /// The `(a_R, a_I, b_R, b_I)` block.
    pub fn ab(&self) -> [T; 4] {
        [self.a.re, self.a.im, self.b.re, self.b.im]
    }

    pub fn with_ab(&self, ab: [T; 4]) -> Result<Self> {
        Self::new(Complex::new(ab[0], ab[1]), Complex::new(ab[2], ab[3]), self.c)
    }

    /// Same `(a, b)` with the normalizing `c_R` and the current `c_I`.
    pub fn renormalized(&self) -> Self {
        Self { c: Complex::new(normalizing_c_r(self.a.re, self.b.re), self.c.im), ..*self }
    }

    pub fn value(&self, x: T) -> Complex<T> {
        (-self.a * x * x + self.b * x + self.c).exp()
    }

    /// `∫|ψ|² dx` in closed form.
    pub fn norm_sqr(&self) -> T {
        let two = c::<T>(2.0);
        (T::PI() / (two * self.a.re)).sqrt() * (two * self.c.re + self.b.re * self.b.re / (two * self.a.re)).exp()
    }

    /// `⟨x⟩` and `⟨x²⟩ - ⟨x⟩²`.
    pub fn position_moments(&self) -> (T, T) {
        let two = c::<T>(2.0);
        (self.b.re / (two * self.a.re), T::one() / (c::<T>(4.0) * self.a.re))
    }

    /// The complex ratio `b/a`, constant under free evolution.
    pub fn ratio(&self) -> Complex<T> {
        self.b / self.a
    }
}

/// `c_R` that normalizes `exp(-a x² + b x + c)`.
pub fn normalizing_c_r<T: Real>(a_r: T, b_r: T) -> T {
    let two = c::<T>(2.0);
    -(T::PI() / (two * a_r)).ln() / c::<T>(4.0) - b_r * b_r / (c::<T>(4.0) * a_r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    pub omega: T,
    pub lambda: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(omega: T, lambda: T) -> Result<Self> {
        if !(omega >= T::zero() && omega.is_finite()) {
            return Err(domain(format!("omega = {omega} must be finite and non-negative")));
        }
        if !(lambda >= T::zero() && lambda.is_finite()) {
            return Err(domain(format!("lambda = {lambda} must be finite and non-negative")));
        }
        Ok(Self { omega, lambda })
    }

    pub fn free() -> Self {
        Self { omega: T::zero(), lambda: T::zero() }
    }

    pub fn harmonic(omega: T) -> Result<Self> {
        Self::new(omega, T::zero())
    }

    /// `V(x) = ω² x²/2 + λ x⁴/2`.
    pub fn potential(&self, x: T) -> T {
        let x2 = x * x;
        (self.omega * self.omega * x2 + self.lambda * x2 * x2) / c::<T>(2.0)
    }
}

/// Schrödinger flow restricted to the Gaussian manifold for `V = 0`.
pub fn free_field<T: Real>(p: &GaussianParams<T>) -> Result<[T; 6]> {
    check_a(p.a.re)?;
    let [ar, ai, br, bi, _, _] = p.to_real();
    let two = c::<T>(2.0);
    Ok([
        c::<T>(4.0) * ar * ai,
        two * (ai * ai - ar * ar),
        two * (ai * br + ar * bi),
        two * (ai * bi - ar * br),
        ai - br * bi,
        -ar + (br * br - bi * bi) / two,
    ])
}

/// Free field plus the harmonic correction `+ω²/2` on `ȧ_I`.
pub fn harmonic_field<T: Real>(p: &GaussianParams<T>, m: &ModelParams<T>) -> Result<[T; 6]> {
    let mut v = free_field(p)?;
    v[1] = v[1] + m.omega * m.omega / c::<T>(2.0);
    Ok(v)
}

/// Variational field for the quartic oscillator on `(a_R, a_I, b_R, b_I)`.
pub fn anharmonic_field<T: Real>(p: &GaussianParams<T>, m: &ModelParams<T>) -> Result<[T; 4]> {
    let h = harmonic_field(p, m)?;
    let mut v = [h[0], h[1], h[2], h[3]];
    if m.lambda == T::zero() {
        return Ok(v);
    }
    let (ar, br, l) = (p.a.re, p.b.re, m.lambda);
    v[1] = v[1] + c::<T>(3.0) * l * (ar + br * br) / (c::<T>(4.0) * ar * ar);
    v[3] = v[3] + l * br * br * br / (c::<T>(2.0) * ar * ar * ar);
    Ok(v)
}

/// Pulled-back energy `⟨H⟩/⟨ψ,ψ⟩` of a Gaussian.
pub fn anharmonic_energy<T: Real>(p: &GaussianParams<T>, m: &ModelParams<T>) -> Result<T> {
    check_a(p.a.re)?;
    let [ar, ai, br, bi] = p.ab();
    let (w2, l) = (m.omega * m.omega, m.lambda);
    let d = ai * br - ar * bi;
    let (ar2, ar3) = (ar * ar, ar * ar * ar);
    let br2 = br * br;
    let two = c::<T>(2.0);
    Ok(ar / two
        + ai * ai / (two * ar)
        + d * d / (two * ar2)
        + w2 / (c::<T>(8.0) * ar)
        + w2 * br2 / (c::<T>(8.0) * ar2)
        + c::<T>(3.0) * l / (c::<T>(32.0) * ar2)
        + c::<T>(3.0) * br2 * l / (c::<T>(16.0) * ar3)
        + br2 * br2 * l / (c::<T>(32.0) * ar2 * ar2))
}

/// Analytic gradient of [`anharmonic_energy`] in `(a_R, a_I, b_R, b_I)`.
pub fn energy_gradient<T: Real>(p: &GaussianParams<T>, m: &ModelParams<T>) -> Result<[T; 4]> {
    check_a(p.a.re)?;
    let [ar, ai, br, bi] = p.ab();
    let (w2, l) = (m.omega * m.omega, m.lambda);
    let d = ai * br - ar * bi;
    let (ar2, ar3, ar4, ar5) = (ar * ar, ar * ar * ar, ar * ar * ar * ar, ar * ar * ar * ar * ar);
    let br2 = br * br;
    let k = |x: f64| c::<T>(x);
    let d_ar = k(0.5) - ai * ai / (k(2.0) * ar2) - d * bi / ar2 - d * d / ar3 - w2 / (k(8.0) * ar2)
        - w2 * br2 / (k(4.0) * ar3)
        - k(3.0) * l / (k(16.0) * ar3)
        - k(9.0) * l * br2 / (k(16.0) * ar4)
        - l * br2 * br2 / (k(8.0) * ar5);
    let d_ai = ai / ar + d * br / ar2;
    let d_br = d * ai / ar2 + w2 * br / (k(4.0) * ar2) + k(3.0) * l * br / (k(8.0) * ar3) + l * br2 * br / (k(8.0) * ar4);
    let d_bi = -d / ar;
    Ok([d_ar, d_ai, d_br, d_bi])
}

/// Closed-form pulled-back two-form on `(a_R, a_I, b_R, b_I)`.
///
/// Entry `(j, k)` is the coefficient of `dx_j ∧ dx_k` (antisymmetric). The
/// Hamiltonian field satisfies `W Γ = dE`.
pub fn two_form<T: Real>(p: &GaussianParams<T>) -> Result<SquareMatrix<T>> {
    check_a(p.a.re)?;
    let (ar, br) = (p.a.re, p.b.re);
    let two = c::<T>(2.0);
    let w01 = -(br * br / (two * ar * ar * ar) + T::one() / (c::<T>(4.0) * ar * ar));
    let w21 = br / (two * ar * ar);
    let w03 = br / (two * ar * ar);
    let w23 = -T::one() / (two * ar);
    let mut m = SquareMatrix::zeros(4);
    for (i, j, v) in [(0, 1, w01), (2, 1, w21), (0, 3, w03), (2, 3, w23)] {
        m.set(i, j, v);
        m.set(j, i, -v);
    }
    Ok(m)
}

/// [`two_form`] padded with zero rows and columns for `(c_R, c_I)`.
pub fn two_form_full<T: Real>(p: &GaussianParams<T>) -> Result<SquareMatrix<T>> {
    let w = two_form(p)?;
    Ok(SquareMatrix::from_fn(6, |i, j| if i < 4 && j < 4 { w.get(i, j) } else { T::zero() }))
}
