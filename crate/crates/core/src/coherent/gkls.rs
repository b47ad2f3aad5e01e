use num_complex::Complex;

use crate::error::{domain, invalid, Result};
use crate::scalar::{c, Real};

/// Qubit state `ρ = ½(I + xσ₁ + yσ₂ + zσ₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochState<T> {
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(invalid("non-finite Bloch vector"));
        }
        let s = Self { x, y, z };
        if s.radius() > T::one() + T::epsilon() * c::<T>(4.0) {
            return Err(domain(format!("Bloch radius {} exceeds 1", s.radius())));
        }
        Ok(s)
    }

    pub fn radius(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Matrix form with trace exactly one: the larger diagonal entry is
    /// computed first and the other is its complement.
    pub fn density_matrix(&self) -> [[Complex<T>; 2]; 2] {
        let half = c::<T>(0.5);
        let big = half + self.z.abs() * half;
        let small = T::one() - big;
        let (d11, d22) = if self.z >= T::zero() { (big, small) } else { (small, big) };
        let off = Complex::new(self.x * half, -self.y * half);
        [[Complex::new(d11, T::zero()), off], [off.conj(), Complex::new(d22, T::zero())]]
    }

    /// Eigenvalues `(1 ∓ r)/2`, ascending.
    pub fn eigenvalues(&self) -> (T, T) {
        let half = c::<T>(0.5);
        let r = self.radius();
        ((T::one() - r) * half, (T::one() + r) * half)
    }
}

/// Non-Markovian channel: `x, y ↦ (1 + e^{−ct})/2 · (x, y)`, `z ↦ e^{−ct} z`.
pub fn gkls_flow<T: Real>(rho0: &BlochState<T>, rate: T, t: T) -> Result<BlochState<T>> {
    if !(rate >= T::zero() && rate.is_finite()) {
        return Err(invalid(format!("decay rate {rate} must be non-negative")));
    }
    if !(t >= T::zero() && t.is_finite()) {
        return Err(invalid(format!("time {t} must be non-negative")));
    }
    BlochState::new(rho0.x, rho0.y, rho0.z)?;
    let e = (-rate * t).exp();
    let k = (T::one() + e) * c::<T>(0.5);
    Ok(BlochState { x: rho0.x * k, y: rho0.y * k, z: rho0.z * e })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_is_exact() {
        for &z in &[0.7, -0.3, 0.1, -0.99, 0.0] {
            let s = BlochState::new(0.1, 0.05, z).unwrap();
            let m = s.density_matrix();
            assert_eq!(m[0][0].re + m[1][1].re, 1.0);
        }
    }
}
