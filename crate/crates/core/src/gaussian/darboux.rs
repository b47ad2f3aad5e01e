use num_complex::Complex;

use super::{check_a, GaussianParams, ModelParams};
use crate::error::{domain, Result};
use crate::scalar::{c, Real};

/// Canonical coordinates with `ω = dp1∧dq1 + dp2∧dq2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxCoords<T> {
    pub q1: T,
    pub p1: T,
    pub q2: T,
    pub p2: T,
}

impl<T: Real> DarbouxCoords<T> {
    pub fn new(q1: T, p1: T, q2: T, p2: T) -> Result<Self> {
        if !(q2 > T::zero()) {
            return Err(domain(format!("q2 = {q2} must be positive")));
        }
        Ok(Self { q1, p1, q2, p2 })
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.q1, self.p1, self.q2, self.p2]
    }

    pub fn from_array(v: [T; 4]) -> Result<Self> {
        Self::new(v[0], v[1], v[2], v[3])
    }
}

pub fn to_darboux<T: Real>(p: &GaussianParams<T>) -> Result<DarbouxCoords<T>> {
    check_a(p.a.re)?;
    let [ar, ai, br, bi] = p.ab();
    let sq = ar.sqrt();
    Ok(DarbouxCoords {
        q1: br / (c::<T>(2.0) * ar),
        p1: (ar * bi - ai * br) / ar,
        q2: T::one() / (c::<T>(2.0) * sq),
        p2: -ai / sq,
    })
}

/// Inverse of [`to_darboux`]; `gauge` supplies `(c_R, c_I)`.
pub fn from_darboux<T: Real>(d: &DarbouxCoords<T>, gauge: (T, T)) -> Result<GaussianParams<T>> {
    if !(d.q2 > T::zero()) {
        return Err(domain(format!("q2 = {} must be positive", d.q2)));
    }
    let two = c::<T>(2.0);
    let ar = T::one() / (c::<T>(4.0) * d.q2 * d.q2);
    let ai = -d.p2 / (two * d.q2);
    let br = d.q1 / (two * d.q2 * d.q2);
    let bi = d.p1 - d.p2 * d.q1 / d.q2;
    GaussianParams::new(Complex::new(ar, ai), Complex::new(br, bi), Complex::new(gauge.0, gauge.1))
}

/// `∂(q1, p1, q2, p2)/∂(a_R, a_I, b_R, b_I)`, rows indexed by Darboux coordinate.
pub fn darboux_jacobian<T: Real>(p: &GaussianParams<T>) -> Result<[[T; 4]; 4]> {
    check_a(p.a.re)?;
    let [ar, ai, br, _] = p.ab();
    let z = T::zero();
    let two = c::<T>(2.0);
    let s = ar.sqrt();
    let s3 = s * ar;
    Ok([
        [-br / (two * ar * ar), z, T::one() / (two * ar), z],
        [ai * br / (ar * ar), -br / ar, -ai / ar, T::one()],
        [-T::one() / (c::<T>(4.0) * s3), z, z, z],
        [ai / (two * s3), -T::one() / s, z, z],
    ])
}

/// `(q̇1, ṗ1, q̇2, ṗ2)` for the free particle.
pub fn free_darboux_field<T: Real>(d: &DarbouxCoords<T>) -> [T; 4] {
    [d.p1, T::zero(), d.p2, T::one() / (c::<T>(4.0) * d.q2 * d.q2 * d.q2)]
}

/// `(q̇1, ṗ1, q̇2, ṗ2)` for the harmonic oscillator.
pub fn harmonic_darboux_field<T: Real>(d: &DarbouxCoords<T>, m: &ModelParams<T>) -> [T; 4] {
    let w2 = m.omega * m.omega;
    [d.p1, -w2 * d.q1, d.p2, -w2 * d.q2 + T::one() / (c::<T>(4.0) * d.q2 * d.q2 * d.q2)]
}

/// `(p1, H2)` with `H2 = p2² + 1/(4 q2²)`.
pub fn free_invariants<T: Real>(d: &DarbouxCoords<T>) -> (T, T) {
    (d.p1, d.p2 * d.p2 + T::one() / (c::<T>(4.0) * d.q2 * d.q2))
}

/// `(H1, H2)` with `H1 = p1² + ω² q1²`, `H2 = p2² + ω² q2² + 1/(4 q2²)`.
pub fn harmonic_invariants<T: Real>(d: &DarbouxCoords<T>, m: &ModelParams<T>) -> (T, T) {
    let w2 = m.omega * m.omega;
    (
        d.p1 * d.p1 + w2 * d.q1 * d.q1,
        d.p2 * d.p2 + w2 * d.q2 * d.q2 + T::one() / (c::<T>(4.0) * d.q2 * d.q2),
    )
}

/// Variables that linearize the harmonic flow: `ż = -iωz`, `u̇ = -2iωu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizingVars<T> {
    pub z: Complex<T>,
    pub u: Complex<T>,
}

pub fn to_linearizing<T: Real>(p: &GaussianParams<T>, m: &ModelParams<T>) -> Result<LinearizingVars<T>> {
    check_a(p.a.re)?;
    if !(m.omega > T::zero()) {
        return Err(domain("linearizing variables need omega > 0"));
    }
    let w = Complex::new(m.omega, T::zero());
    let den = w + p.a * c::<T>(2.0);
    Ok(LinearizingVars { z: Complex::new(p.b.im, -p.b.re) / den, u: (w - p.a * c::<T>(2.0)) / den })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let p = GaussianParams::<f64>::new(Complex::new(0.37, -1.2), Complex::new(0.8, 0.05), Complex::new(0.1, 0.2)).unwrap();
        let q = from_darboux(&to_darboux(&p).unwrap(), (p.c.re, p.c.im)).unwrap();
        for (x, y) in p.to_real().into_iter().zip(q.to_real()) {
            assert!((x - y).abs() < 1e-14f64);
        }
        assert!(DarbouxCoords::new(0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = GaussianParams::new(Complex::new(0.9, 0.4), Complex::new(-0.3, 0.6), Complex::new(0.0, 0.0)).unwrap();
        let j = darboux_jacobian(&p).unwrap();
        for k in 0..4 {
            let h = 1e-6f64;
            let (mut u, mut d) = (p.ab(), p.ab());
            u[k] += h;
            d[k] -= h;
            let fu = to_darboux(&p.with_ab(u).unwrap()).unwrap().to_array();
            let fd = to_darboux(&p.with_ab(d).unwrap()).unwrap().to_array();
            for r in 0..4 {
                assert!(((fu[r] - fd[r]) / (2.0 * h) - j[r][k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn linearizing_rejects_zero_frequency() {
        let p = GaussianParams::new(Complex::new(0.5, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)).unwrap();
        assert!(to_linearizing(&p, &ModelParams::free()).is_err());
    }
}
