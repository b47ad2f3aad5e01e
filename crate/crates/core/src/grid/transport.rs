use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::lagrangian::HamiltonianAction;
use crate::numerics::quadrature::cumulative_trapezoid;
use crate::state::StateVector;

/// Phase correction `e^{iα(t)}` along a sampled curve of states.
///
/// `α = phase + i·(-log_scale)`: multiplying `ψ(t)` by
/// `exp(log_scale + i·phase)` yields a curve with vanishing projected
/// Schrödinger residual.
#[derive(Debug, Clone)]
pub struct ParallelTransport {
    pub times: Vec<f64>,
    pub phase: Vec<f64>,
    pub log_scale: Vec<f64>,
}

pub const MAX_TRANSPORT_STEP: f64 = 1e-3;

/// `α(t) = ∫ ⟨ψ, (i d/dτ - H)ψ⟩/⟨ψ,ψ⟩ dτ` with `d/dτ` by central differences.
pub fn parallel_transport_phase(times: &[f64], states: &[StateVector], ham: &dyn HamiltonianAction) -> Result<ParallelTransport> {
    let n = times.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    if states.len() != n {
        return Err(invalid(format!("{} states for {n} times", states.len())));
    }
    for w in times.windows(2) {
        let h = w[1] - w[0];
        if !(h > 0.0) {
            return Err(invalid("sample times not strictly increasing"));
        }
        if h > MAX_TRANSPORT_STEP * (1.0 + 1e-9) {
            return Err(invalid(format!("sampling step {h} exceeds {MAX_TRANSPORT_STEP}")));
        }
    }
    let derivative = |k: usize| -> Vec<Complex64> {
        let (i0, i1, i2, t) = if k == 0 {
            (0, 1, 2, times[0])
        } else if k == n - 1 {
            (n - 3, n - 2, n - 1, times[n - 1])
        } else {
            (k - 1, k, k + 1, times[k])
        };
        let (t0, t1, t2) = (times[i0], times[i1], times[i2]);
        // derivative of the quadratic interpolant at t
        let c0 = (2.0 * t - t1 - t2) / ((t0 - t1) * (t0 - t2));
        let c1 = (2.0 * t - t0 - t2) / ((t1 - t0) * (t1 - t2));
        let c2 = (2.0 * t - t0 - t1) / ((t2 - t0) * (t2 - t1));
        states[i0]
            .amplitudes
            .iter()
            .zip(&states[i1].amplitudes)
            .zip(&states[i2].amplitudes)
            .map(|((a, b), c)| a * c0 + b * c1 + c * c2)
            .collect()
    };
    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    for k in 0..n {
        let psi = &states[k];
        let dpsi = StateVector { amplitudes: derivative(k), measure: psi.measure };
        let hpsi = ham.apply(psi)?;
        let num = psi.inner(&dpsi) * Complex64::new(0.0, 1.0) - psi.inner(&hpsi);
        let rate = num / psi.norm_sqr();
        re.push((times[k], rate.re));
        im.push((times[k], rate.im));
    }
    let phase = cumulative_trapezoid(&re)?;
    let log_scale = cumulative_trapezoid(&im)?.into_iter().map(|v| -v).collect();
    Ok(ParallelTransport { times: times.to_vec(), phase, log_scale })
}
