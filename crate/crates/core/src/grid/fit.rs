use std::f64::consts::PI;

use num_complex::Complex64;

use super::GridWavefunction;
use crate::error::{domain, Result};
use crate::numerics::linalg::{least_squares_with_kernel, SquareMatrix};
use crate::GaussianParams;

/// Gaussian fitted to a grid state.
#[derive(Debug, Clone, Copy)]
pub struct GaussianFit {
    pub params: GaussianParams,
    /// `|ψ|²`-weighted RMS of the log-amplitude misfit.
    pub amplitude_residual: f64,
    /// `|ψ|²`-weighted RMS of the phase misfit (radians).
    pub phase_residual: f64,
    /// Combined `sqrt(amplitude² + phase²)`.
    pub residual: f64,
}

fn wrap(p: f64) -> f64 {
    let r = (p + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

fn weighted_poly(xs: &[f64], ys: &[f64], ws: &[f64], basis: &dyn Fn(f64) -> Vec<f64>) -> Result<Vec<f64>> {
    let k = basis(0.0).len();
    let mut g = SquareMatrix::zeros(k);
    let mut rhs = vec![0.0; k];
    for ((x, y), w) in xs.iter().zip(ys).zip(ws) {
        let phi = basis(*x);
        for i in 0..k {
            rhs[i] += w * phi[i] * y;
            for j in 0..k {
                g.set(i, j, g.get(i, j) + w * phi[i] * phi[j]);
            }
        }
    }
    let sol = least_squares_with_kernel(&g, &rhs, 1e-14)?;
    if !sol.kernel.is_empty() {
        return Err(domain("too few significant samples for a Gaussian fit"));
    }
    Ok(sol.solution)
}

/// Weighted linear least-squares fit of `log|ψ|` and of the local phase slope
/// on the region `|ψ| > 1e-6 max|ψ|`; no phase unwrapping is needed.
pub fn fit_gaussian(psi: &GridWavefunction) -> Result<GaussianFit> {
    let grid = psi.grid;
    let dx = grid.dx();
    let amax = psi.samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if amax == 0.0 {
        return Err(domain("cannot fit the zero state"));
    }
    let cut = 1e-6 * amax;
    let mask: Vec<bool> = psi.samples.iter().map(|z| z.norm() > cut).collect();
    let idx: Vec<usize> = (0..mask.len()).filter(|&j| mask[j]).collect();
    let xs: Vec<f64> = idx.iter().map(|&j| grid.x(j)).collect();
    let ws: Vec<f64> = idx.iter().map(|&j| psi.samples[j].norm_sqr()).collect();
    let logs: Vec<f64> = idx.iter().map(|&j| psi.samples[j].norm().ln()).collect();
    let amp = weighted_poly(&xs, &logs, &ws, &|x| vec![-x * x, x, 1.0])?;
    let (a_r, b_r, c_r) = (amp[0], amp[1], amp[2]);
    if !(a_r > 0.0) {
        return Err(domain(format!("fitted a_R = {a_r} is not positive")));
    }

    let mut mx = Vec::new();
    let mut slopes = Vec::new();
    let mut sw = Vec::new();
    for j in 0..mask.len() - 1 {
        if mask[j] && mask[j + 1] {
            let (p, q) = (psi.samples[j], psi.samples[j + 1]);
            mx.push(grid.x(j) + 0.5 * dx);
            slopes.push((q * p.conj()).arg() / dx);
            sw.push(p.norm() * q.norm());
        }
    }
    let ph = weighted_poly(&mx, &slopes, &sw, &|x| vec![-2.0 * x, 1.0])?;
    let (a_i, b_i) = (ph[0], ph[1]);
    let poly = |x: f64| -a_i * x * x + b_i * x;
    let mean: Complex64 = idx
        .iter()
        .map(|&j| psi.samples[j] * Complex64::new(0.0, -poly(grid.x(j))).exp() * psi.samples[j].norm())
        .sum();
    let c_i = mean.arg();

    let wsum: f64 = ws.iter().sum();
    let mut ra = 0.0;
    let mut rp = 0.0;
    for (k, &j) in idx.iter().enumerate() {
        let x = xs[k];
        let da = logs[k] - (-a_r * x * x + b_r * x + c_r);
        let dp = wrap(psi.samples[j].arg() - poly(x) - c_i);
        ra += ws[k] * da * da;
        rp += ws[k] * dp * dp;
    }
    let amplitude_residual = (ra / wsum).sqrt();
    let phase_residual = (rp / wsum).sqrt();
    let params = GaussianParams::new(Complex64::new(a_r, a_i), Complex64::new(b_r, b_i), Complex64::new(c_r, c_i))?;
    Ok(GaussianFit {
        params,
        amplitude_residual,
        phase_residual,
        residual: amplitude_residual.hypot(phase_residual),
    })
}
