use std::f64::consts::PI;

use num_complex::Complex64;

use super::GridWavefunction;
use crate::error::{invalid, Result};

/// Free propagation by direct convolution with `G = (2πit)^{-1/2} e^{i(x-x')²/2t}`.
pub fn green_propagate_free(psi0: &GridWavefunction, t: f64) -> Result<GridWavefunction> {
    if !(t.abs() >= 1e-6) {
        return Err(invalid(format!("|t| = {} too small for the free kernel on a grid", t.abs())));
    }
    let n = psi0.grid.n_points();
    let dx = psi0.grid.dx();
    let pref = (Complex64::new(0.0, 2.0 * PI * t)).sqrt().inv() * dx;
    // kernel indexed by j - k + n - 1
    let kernel: Vec<Complex64> = (0..2 * n - 1)
        .map(|m| {
            let d = (m as f64 - (n as f64 - 1.0)) * dx;
            pref * Complex64::new(0.0, d * d / (2.0 * t)).exp()
        })
        .collect();
    let samples = (0..n)
        .map(|j| (0..n).map(|k| kernel[j + n - 1 - k] * psi0.samples[k]).sum())
        .collect();
    GridWavefunction::new(psi0.grid, samples)
}
