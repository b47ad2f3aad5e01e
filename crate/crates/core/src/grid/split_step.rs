use num_complex::Complex64;

use super::{GridHamiltonian, GridWavefunction};
use crate::error::{domain, invalid, Result};
use crate::numerics::ode::StepGrid;

/// Boundary leakage detected at an output time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryWarning {
    pub time: f64,
    pub leaked_mass: f64,
}

#[derive(Debug, Clone)]
pub struct SplitStepRun {
    pub times: Vec<f64>,
    pub states: Vec<GridWavefunction>,
    pub warnings: Vec<BoundaryWarning>,
}

impl SplitStepRun {
    pub fn last(&self) -> &GridWavefunction {
        self.states.last().expect("run holds the initial state")
    }
}

const BOUNDARY_AMPLITUDE: f64 = 1e-10;

/// Strang-split propagation `e^{-iVh/2} e^{-iTh} e^{-iVh/2}` with the kinetic
/// factor applied in momentum space. States are kept every `stride` steps and
/// at `t_end`.
pub fn split_step_evolve(psi0: &GridWavefunction, ham: &GridHamiltonian, dt: f64, t_end: f64, stride: usize) -> Result<SplitStepRun> {
    if psi0.grid != ham.grid() {
        return Err(invalid("wavefunction and Hamiltonian live on different grids"));
    }
    if stride == 0 {
        return Err(invalid("output stride must be positive"));
    }
    let edge = psi0.boundary_amplitude();
    if edge >= BOUNDARY_AMPLITUDE {
        return Err(domain(format!("initial state not negligible at the grid boundary (|ψ| = {edge:e})")));
    }
    let steps = StepGrid::new(0.0, dt, t_end)?;
    let n = psi0.grid.n_points();
    let (fwd, inv) = ham.fft_pair();
    let scale = 1.0 / n as f64;
    let factors = |h: f64| -> (Vec<Complex64>, Vec<Complex64>) {
        let half_v = ham.potential().iter().map(|v| Complex64::new(0.0, -0.5 * h * v).exp()).collect();
        let kin = ham.kinetic_symbol().iter().map(|k| Complex64::new(0.0, -h * k).exp() * scale).collect();
        (half_v, kin)
    };
    let (full_v, full_k) = factors(dt);
    let mut psi = psi0.samples.clone();
    let mut run = SplitStepRun { times: vec![0.0], states: vec![psi0.clone()], warnings: Vec::new() };
    let total = steps.steps();
    for k in 0..total {
        let h = steps.time(k + 1) - steps.time(k);
        let short;
        let (v, kin) = if h == dt {
            (&full_v, &full_k)
        } else {
            short = factors(h);
            (&short.0, &short.1)
        };
        for (p, f) in psi.iter_mut().zip(v) {
            *p *= f;
        }
        fwd.process(&mut psi);
        for (p, f) in psi.iter_mut().zip(kin) {
            *p *= f;
        }
        inv.process(&mut psi);
        for (p, f) in psi.iter_mut().zip(v) {
            *p *= f;
        }
        if (k + 1) % stride == 0 || k + 1 == total {
            let t = steps.time(k + 1);
            let state = GridWavefunction { grid: psi0.grid, samples: psi.clone() };
            if state.boundary_amplitude() >= BOUNDARY_AMPLITUDE {
                run.warnings.push(BoundaryWarning { time: t, leaked_mass: state.boundary_mass() });
            }
            run.times.push(t);
            run.states.push(state);
        }
    }
    Ok(run)
}
