use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Hilbert-space vector: finite coefficients (`measure = 1`) or grid samples
/// (`measure = dx`), with `⟨φ, ψ⟩ = measure · Σ conj(φ_i) ψ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub measure: f64,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, measure: f64) -> Result<Self> {
        if !(measure > 0.0 && measure.is_finite()) {
            return Err(invalid(format!("measure {measure} must be positive")));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("non-finite amplitude"));
        }
        Ok(Self { amplitudes, measure })
    }

    /// Finite-dimensional vector with unit measure.
    pub fn finite(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes, measure: 1.0 }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        let s: Complex64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum();
        s * self.measure
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.measure
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { amplitudes: self.amplitudes.iter().map(|a| a * s).collect(), measure: self.measure }
    }

    pub fn normalized(&self) -> Self {
        self.scaled(Complex64::new(1.0 / self.norm(), 0.0))
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        let s: f64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum();
        (s * self.measure).sqrt()
    }

    /// `|⟨φ,ψ⟩|² / (‖φ‖² ‖ψ‖²)`.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }
}
