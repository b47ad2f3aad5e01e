use num_complex::Complex64;

use super::Immersion;
use crate::error::{domain, invalid, Result};
use crate::grid::SpatialGrid;
use crate::state::StateVector;

/// Immersion given by a closure.
pub struct FnImmersion<F> {
    dim: usize,
    label: String,
    f: F,
}

impl<F> FnImmersion<F>
where
    F: Fn(&[f64]) -> Result<StateVector> + Sync,
{
    pub fn new(dim: usize, label: impl Into<String>, f: F) -> Self {
        Self { dim, label: label.into(), f }
    }
}

impl<F> Immersion for FnImmersion<F>
where
    F: Fn(&[f64]) -> Result<StateVector> + Sync,
{
    fn param_dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, point: &[f64]) -> Result<StateVector> {
        (self.f)(point)
    }

    fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussianCoordinates {
    /// `(a_R, a_I, b_R, b_I)` with `c` held at the given value.
    Restricted { c_r: f64, c_i: f64 },
    /// `(a_R, a_I, b_R, b_I, c_R, c_I)`.
    Full,
}

/// `ψ(x) = exp(-a x² + b x + c)` sampled on a grid.
#[derive(Debug, Clone)]
pub struct GaussianImmersion {
    pub grid: SpatialGrid,
    pub coordinates: GaussianCoordinates,
}

impl GaussianImmersion {
    pub fn restricted(grid: SpatialGrid) -> Self {
        Self { grid, coordinates: GaussianCoordinates::Restricted { c_r: 0.0, c_i: 0.0 } }
    }

    pub fn full(grid: SpatialGrid) -> Self {
        Self { grid, coordinates: GaussianCoordinates::Full }
    }
}

impl Immersion for GaussianImmersion {
    fn param_dim(&self) -> usize {
        match self.coordinates {
            GaussianCoordinates::Restricted { .. } => 4,
            GaussianCoordinates::Full => 6,
        }
    }

    fn evaluate(&self, x: &[f64]) -> Result<StateVector> {
        if x.len() != self.param_dim() {
            return Err(invalid(format!("expected {} Gaussian coordinates, got {}", self.param_dim(), x.len())));
        }
        if !(x[0] > 0.0) {
            return Err(domain(format!("a_R = {} must be positive", x[0])));
        }
        let (c_r, c_i) = match self.coordinates {
            GaussianCoordinates::Restricted { c_r, c_i } => (c_r, c_i),
            GaussianCoordinates::Full => (x[4], x[5]),
        };
        let a = Complex64::new(x[0], x[1]);
        let b = Complex64::new(x[2], x[3]);
        let c = Complex64::new(c_r, c_i);
        let amplitudes = self.grid.points().into_iter().map(|s| (-a * s * s + b * s + c).exp()).collect();
        StateVector::new(amplitudes, self.grid.dx())
    }

    fn label(&self) -> &str {
        "gaussian"
    }
}

/// Spin-½ coherent states `(sin(θ/2) e^{iφ}, cos(θ/2))` in `(θ, φ)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RadcliffeImmersion;

impl Immersion for RadcliffeImmersion {
    fn param_dim(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> Result<StateVector> {
        if x.len() != 2 {
            return Err(invalid("Radcliffe immersion takes (theta, phi)"));
        }
        let (th, ph) = (x[0], x[1]);
        Ok(StateVector::finite(vec![
            Complex64::from_polar((0.5 * th).sin(), ph),
            Complex64::new((0.5 * th).cos(), 0.0),
        ]))
    }

    fn label(&self) -> &str {
        "radcliffe"
    }
}
