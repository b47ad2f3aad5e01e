//! Exact evolution on a periodic one-dimensional grid.

mod fit;
mod green;
mod split_step;
mod transport;

pub use fit::{fit_gaussian, GaussianFit};
pub use green::green_propagate_free;
pub use split_step::{split_step_evolve, BoundaryWarning, SplitStepRun};
pub use transport::{parallel_transport_phase, ParallelTransport};

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, invalid, Result};
use crate::lagrangian::HamiltonianAction;
use crate::state::StateVector;
use crate::GaussianParams;

/// Periodic grid `x_j = x_min + j dx`, `dx = (x_max - x_min)/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(invalid(format!("grid bounds [{x_min}, {x_max}] invalid")));
        }
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(invalid(format!("n_points = {n_points} must be a power of two >= 16")));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / self.length();
        (0..n).map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dk).collect()
    }

    /// Indices in the outer 5% on either side.
    pub fn boundary_indices(&self) -> impl Iterator<Item = usize> {
        let n = self.n_points;
        let w = (n as f64 * 0.05).ceil() as usize;
        (0..w).chain(n - w..n)
    }
}

impl Default for SpatialGrid {
    fn default() -> Self {
        Self { x_min: -20.0, x_max: 20.0, n_points: 2048 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    pub grid: SpatialGrid,
    pub samples: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn new(grid: SpatialGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.n_points() {
            return Err(invalid(format!("{} samples for a {}-point grid", samples.len(), grid.n_points())));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("non-finite wavefunction sample"));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect())
    }

    pub fn from_gaussian(grid: SpatialGrid, p: &GaussianParams) -> Result<Self> {
        Self::from_fn(grid, |x| p.value(x))
    }

    pub fn from_state(grid: SpatialGrid, s: StateVector) -> Result<Self> {
        Self::new(grid, s.amplitudes)
    }

    pub fn to_state(&self) -> StateVector {
        StateVector { amplitudes: self.samples.clone(), measure: self.grid.dx() }
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        let s: Complex64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a.conj() * b).sum();
        s * self.grid.dx()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn normalized(&self) -> Self {
        let s = 1.0 / self.norm_sqr().sqrt();
        Self { grid: self.grid, samples: self.samples.iter().map(|a| a * s).collect() }
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-8
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let s: f64 = self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm_sqr()).sum();
        (s * self.grid.dx()).sqrt()
    }

    /// `⟨x^k⟩` for a normalized state.
    pub fn moment(&self, k: i32) -> f64 {
        let dx = self.grid.dx();
        self.samples.iter().enumerate().map(|(j, a)| a.norm_sqr() * self.grid.x(j).powi(k)).sum::<f64>() * dx
    }

    /// Largest `|ψ|` in the outer 5% of the grid.
    pub fn boundary_amplitude(&self) -> f64 {
        self.grid.boundary_indices().map(|j| self.samples[j].norm()).fold(0.0, f64::max)
    }

    /// Probability mass in the outer 5% of the grid.
    pub fn boundary_mass(&self) -> f64 {
        self.grid.boundary_indices().map(|j| self.samples[j].norm_sqr()).sum::<f64>() * self.grid.dx()
    }
}

/// `|⟨ψ, ψ(a,b,c)⟩|²` for a normalized grid state and a normalized Gaussian.
pub fn fidelity(psi: &GridWavefunction, p: &GaussianParams) -> Result<f64> {
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > 1e-8 {
        return Err(domain(format!("grid state not normalized (‖ψ‖² = {n})")));
    }
    let ng = p.norm_sqr();
    if (ng - 1.0).abs() > 1e-8 {
        return Err(domain(format!("Gaussian not normalized (‖ψ‖² = {ng}); fix the c_R gauge")));
    }
    let g = GridWavefunction::from_gaussian(psi.grid, p)?;
    Ok(psi.inner(&g).norm_sqr().clamp(0.0, 1.0))
}

/// Fidelity between two normalized grid states.
pub fn state_fidelity(a: &GridWavefunction, b: &GridWavefunction) -> Result<f64> {
    for (name, s) in [("first", a), ("second", b)] {
        if !s.is_normalized() {
            return Err(domain(format!("{name} state not normalized (‖ψ‖² = {})", s.norm_sqr())));
        }
    }
    Ok(a.inner(b).norm_sqr().clamp(0.0, 1.0))
}

/// `H = -½ d²/dx² + V(x)` with a spectral kinetic term.
#[derive(Clone)]
pub struct GridHamiltonian {
    grid: SpatialGrid,
    potential: Vec<f64>,
    kinetic: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    label: String,
}

impl std::fmt::Debug for GridHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridHamiltonian").field("grid", &self.grid).field("label", &self.label).finish()
    }
}

impl GridHamiltonian {
    pub fn new(grid: SpatialGrid, potential: impl Fn(f64) -> f64, label: impl Into<String>) -> Result<Self> {
        let potential: Vec<f64> = grid.points().into_iter().map(potential).collect();
        if potential.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite potential sample"));
        }
        let mut planner = FftPlanner::new();
        let n = grid.n_points();
        Ok(Self {
            grid,
            potential,
            kinetic: grid.wavenumbers().into_iter().map(|k| 0.5 * k * k).collect(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            label: label.into(),
        })
    }

    pub fn free(grid: SpatialGrid) -> Result<Self> {
        Self::new(grid, |_| 0.0, "free")
    }

    pub fn for_model(grid: SpatialGrid, m: &crate::ModelParams) -> Result<Self> {
        let m = *m;
        Self::new(grid, move |x| m.potential(x), format!("omega={} lambda={}", m.omega, m.lambda))
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn kinetic_symbol(&self) -> &[f64] {
        &self.kinetic
    }

    pub(crate) fn fft_pair(&self) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
        (self.forward.clone(), self.inverse.clone())
    }

    pub fn apply_samples(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = psi.len();
        let mut buf = psi.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / n as f64;
        for (b, k) in buf.iter_mut().zip(&self.kinetic) {
            *b *= k * scale;
        }
        self.inverse.process(&mut buf);
        for ((b, v), p) in buf.iter_mut().zip(&self.potential).zip(psi) {
            *b += v * p;
        }
        buf
    }

    /// `⟨ψ, Hψ⟩ / ⟨ψ, ψ⟩`.
    pub fn energy(&self, psi: &GridWavefunction) -> f64 {
        let h = self.apply_samples(&psi.samples);
        let num: Complex64 = psi.samples.iter().zip(&h).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = psi.samples.iter().map(|a| a.norm_sqr()).sum();
        num.re / den
    }
}

impl HamiltonianAction for GridHamiltonian {
    fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.len() != self.grid.n_points() {
            return Err(invalid(format!("state of length {} on a {}-point grid", psi.len(), self.grid.n_points())));
        }
        Ok(StateVector { amplitudes: self.apply_samples(&psi.amplitudes), measure: psi.measure })
    }

    fn label(&self) -> &str {
        &self.label
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(SpatialGrid::new(-1.0, 1.0, 100).is_err());
        assert!(SpatialGrid::new(1.0, -1.0, 64).is_err());
        assert!(SpatialGrid::new(-1.0, 1.0, 8).is_err());
        let g = SpatialGrid::new(-1.0, 1.0, 64).unwrap();
        assert_eq!(g.boundary_indices().count(), 8);
        assert!(GridWavefunction::new(g, vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn kinetic_energy_of_plane_wave() {
        let g = SpatialGrid::new(0.0, 2.0 * PI, 64).unwrap();
        let h = GridHamiltonian::free(g).unwrap();
        let psi = GridWavefunction::from_fn(g, |x| Complex64::new(0.0, 3.0 * x).exp()).unwrap();
        let hp = h.apply_samples(&psi.samples);
        for (a, b) in hp.iter().zip(&psi.samples) {
            assert!((a - b * 4.5).norm() < 1e-12);
        }
    }
}
