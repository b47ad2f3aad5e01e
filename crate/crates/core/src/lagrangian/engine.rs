use num_complex::Complex64;

use super::{HamiltonianAction, Immersion};
use crate::error::{domain, invalid, Error, Result};
use crate::numerics::linalg::least_squares_with_kernel;
use crate::SquareMatrix;
use crate::numerics::ode::{midpoint_step, StepGrid};
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    ImplicitMidpoint,
}

#[derive(Debug, Clone, Copy)]
pub struct EngineOptions {
    /// Central-difference step, scaled by `max(1, |x_j|)`.
    pub step: f64,
    pub step_floor: f64,
    /// Relative singular-value threshold of the kernel.
    pub kernel_tol: f64,
    pub integrator: Integrator,
    /// Record every `stride`-th step.
    pub stride: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self { step: 1e-5, step_floor: 1e-7, kernel_tol: 1e-10, integrator: Integrator::Rk4, stride: 1 }
    }
}

impl EngineOptions {
    pub fn step_at(&self, x: f64) -> f64 {
        (self.step * x.abs().max(1.0)).max(self.step_floor)
    }
}

struct Stencil {
    center: StateVector,
    plus: Vec<StateVector>,
    minus: Vec<StateVector>,
    steps: Vec<f64>,
}

impl Stencil {
    fn build(im: &dyn Immersion, point: &[f64], opts: &EngineOptions) -> Result<Self> {
        if point.len() != im.param_dim() {
            return Err(invalid(format!("point has {} coordinates, immersion expects {}", point.len(), im.param_dim())));
        }
        if !(opts.step > 0.0) {
            return Err(invalid("finite-difference step must be positive"));
        }
        let center = im.evaluate(point)?;
        if center.norm_sqr() == 0.0 {
            return Err(domain("immersion returned the zero vector"));
        }
        let d = point.len();
        let mut plus = Vec::with_capacity(d);
        let mut minus = Vec::with_capacity(d);
        let mut steps = Vec::with_capacity(d);
        let mut x = point.to_vec();
        for j in 0..d {
            let h = opts.step_at(point[j]);
            let wrap = |e: Error| Error::Immersion { coordinate: j, reason: e.to_string() };
            x[j] = point[j] + h;
            plus.push(im.evaluate(&x).map_err(wrap)?);
            x[j] = point[j] - h;
            minus.push(im.evaluate(&x).map_err(wrap)?);
            x[j] = point[j];
            steps.push(h);
        }
        Ok(Self { center, plus, minus, steps })
    }

    fn derivatives(&self) -> Vec<StateVector> {
        self.plus
            .iter()
            .zip(&self.minus)
            .zip(&self.steps)
            .map(|((p, m), h)| {
                let s = 1.0 / (2.0 * h);
                StateVector {
                    amplitudes: p.amplitudes.iter().zip(&m.amplitudes).map(|(a, b)| (a - b) * s).collect(),
                    measure: self.center.measure,
                }
            })
            .collect()
    }
}

fn rayleigh(ham: &dyn HamiltonianAction, psi: &StateVector) -> Result<f64> {
    let n = psi.norm_sqr();
    if n == 0.0 {
        return Err(domain("zero-norm state has no energy"));
    }
    let hpsi = ham.apply(psi)?;
    let num = psi.inner(&hpsi);
    let scale = hpsi.norm() * psi.norm();
    if num.im.abs() > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(domain(format!("⟨ψ,Hψ⟩ has imaginary part {:e}; Hamiltonian not Hermitian", num.im)));
    }
    Ok(num.re / n)
}

fn one_form(psi: &StateVector, d: &[StateVector]) -> Vec<f64> {
    let n = psi.norm_sqr();
    d.iter().map(|dj| -psi.inner(dj).im / n).collect()
}

/// `W_jk = -(2/N) Im[⟨∂_jψ, ∂_kψ⟩ - ⟨∂_jψ, ψ⟩⟨ψ, ∂_kψ⟩/N]`, the exterior
/// derivative of the one-form written with first derivatives only.
fn two_form_matrix(psi: &StateVector, d: &[StateVector]) -> SquareMatrix {
    let n = psi.norm_sqr();
    let proj: Vec<Complex64> = d.iter().map(|dj| psi.inner(dj)).collect();
    SquareMatrix::from_fn(d.len(), |j, k| {
        if j == k {
            return 0.0;
        }
        let g = d[j].inner(&d[k]) - proj[j].conj() * proj[k] / n;
        -2.0 * g.im / n
    })
}

/// Pulled-back one-form `θ_j = -Im⟨ψ, ∂_jψ⟩/⟨ψ,ψ⟩`.
pub fn cartan_one_form(im: &dyn Immersion, point: &[f64], opts: &EngineOptions) -> Result<Vec<f64>> {
    let st = Stencil::build(im, point, opts)?;
    Ok(one_form(&st.center, &st.derivatives()))
}

/// Antisymmetric matrix of a two-form with its pre-antisymmetrization defect.
#[derive(Debug, Clone)]
pub struct TwoForm {
    pub matrix: SquareMatrix,
    /// `‖(M + Mᵀ)/2‖_F` of the raw matrix.
    pub asymmetry: f64,
}

/// Pulled-back two-form `ω = dθ`.
pub fn lagrangian_two_form(im: &dyn Immersion, point: &[f64], opts: &EngineOptions) -> Result<TwoForm> {
    let st = Stencil::build(im, point, opts)?;
    let raw = two_form_matrix(&st.center, &st.derivatives());
    let (matrix, asymmetry) = raw.antisymmetrize();
    Ok(TwoForm { matrix, asymmetry })
}

/// `ω` as a central-difference exterior derivative of [`cartan_one_form`].
///
/// Second differences amplify round-off by `1/h²`; intended as a cross-check.
pub fn lagrangian_two_form_nested(im: &dyn Immersion, point: &[f64], opts: &EngineOptions, outer_step: f64) -> Result<TwoForm> {
    exterior_derivative(|x| cartan_one_form(im, x, opts), point, outer_step)
}

/// `M_jk = ∂_j f_k - ∂_k f_j` by central differences with step `h·max(1, |x_j|)`.
pub fn exterior_derivative(f: impl Fn(&[f64]) -> Result<Vec<f64>>, point: &[f64], h: f64) -> Result<TwoForm> {
    let d = point.len();
    let mut jac = SquareMatrix::zeros(d);
    let mut x = point.to_vec();
    for j in 0..d {
        let hj = h * point[j].abs().max(1.0);
        x[j] = point[j] + hj;
        let up = f(&x)?;
        x[j] = point[j] - hj;
        let dn = f(&x)?;
        x[j] = point[j];
        if up.len() != d || dn.len() != d {
            return Err(invalid("one-form length differs from the dimension"));
        }
        for k in 0..d {
            jac.set(j, k, (up[k] - dn[k]) / (2.0 * hj));
        }
    }
    let raw = SquareMatrix::from_fn(d, |j, k| jac.get(j, k) - jac.get(k, j));
    let (matrix, asymmetry) = raw.antisymmetrize();
    Ok(TwoForm { matrix, asymmetry })
}

/// Rayleigh quotient `⟨ψ, Hψ⟩/⟨ψ, ψ⟩` at a point.
pub fn reduced_energy(im: &dyn Immersion, ham: &dyn HamiltonianAction, point: &[f64]) -> Result<f64> {
    rayleigh(ham, &im.evaluate(point)?)
}

fn stencil_energy(st: &Stencil, ham: &dyn HamiltonianAction) -> Result<(f64, Vec<f64>)> {
    let e = rayleigh(ham, &st.center)?;
    let mut de = Vec::with_capacity(st.steps.len());
    for ((p, m), h) in st.plus.iter().zip(&st.minus).zip(&st.steps) {
        de.push((rayleigh(ham, p)? - rayleigh(ham, m)?) / (2.0 * h));
    }
    Ok((e, de))
}

/// Central-difference differential of [`reduced_energy`].
pub fn energy_differential(im: &dyn Immersion, ham: &dyn HamiltonianAction, point: &[f64], opts: &EngineOptions) -> Result<Vec<f64>> {
    let st = Stencil::build(im, point, opts)?;
    Ok(stencil_energy(&st, ham)?.1)
}

/// Pulled-back data at a point.
#[derive(Debug, Clone)]
pub struct ReducedGeometry {
    pub point: Vec<f64>,
    pub omega_tilde: SquareMatrix,
    pub asymmetry: f64,
    pub de_tilde: Vec<f64>,
    pub energy: f64,
    pub kernel_basis: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ReducedField {
    pub geometry: ReducedGeometry,
    /// Minimum-norm solution of `W Γ = dE`.
    pub velocity: Vec<f64>,
    /// `‖W Γ - dE‖`; large values flag constraint rather than dynamical equations.
    pub residual: f64,
}

/// Solves `i_Γ ω = -dE` for the reduced vector field.
pub fn reduced_field(im: &dyn Immersion, ham: &dyn HamiltonianAction, point: &[f64], opts: &EngineOptions) -> Result<ReducedField> {
    let st = Stencil::build(im, point, opts)?;
    let d = st.derivatives();
    let raw = two_form_matrix(&st.center, &d);
    let (w, asymmetry) = raw.antisymmetrize();
    let (energy, de) = stencil_energy(&st, ham)?;
    let n = st.center.norm_sqr();
    let tangent_scale = d.iter().map(|v| v.norm_sqr() / n).fold(0.0, f64::max);
    let sol = least_squares_with_kernel(&w, &de, opts.kernel_tol)?;
    let smax = sol.singular_values.first().copied().unwrap_or(0.0);
    if !(smax > 1e-12 * tangent_scale) {
        let gradient_norm = de.iter().map(|v| v * v).sum::<f64>().sqrt();
        return Err(Error::NoDynamics { gradient_norm });
    }
    Ok(ReducedField {
        velocity: sol.solution,
        residual: sol.residual,
        geometry: ReducedGeometry {
            point: point.to_vec(),
            omega_tilde: w,
            asymmetry,
            de_tilde: de,
            energy,
            kernel_basis: sol.kernel,
            singular_values: sol.singular_values,
        },
    })
}

/// Trajectory of the reduced field with per-sample diagnostics.
#[derive(Debug, Clone, Default)]
pub struct ReducedTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub energies: Vec<f64>,
    pub kernel_dims: Vec<usize>,
    pub residuals: Vec<f64>,
}

impl ReducedTrajectory {
    /// `max |E(t) - E(0)|` over the samples.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energies.first().copied().unwrap_or(0.0);
        self.energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }

    fn record(&mut self, t: f64, f: &ReducedField) {
        self.times.push(t);
        self.points.push(f.geometry.point.clone());
        self.energies.push(f.geometry.energy);
        self.kernel_dims.push(f.geometry.kernel_basis.len());
        self.residuals.push(f.residual);
    }
}

/// Integrates the reduced field from `p0` over `[0, t_end]`.
pub fn integrate_reduced(
    im: &dyn Immersion,
    ham: &dyn HamiltonianAction,
    p0: &[f64],
    dt: f64,
    t_end: f64,
    opts: &EngineOptions,
) -> Result<ReducedTrajectory> {
    if opts.stride == 0 {
        return Err(invalid("output stride must be positive"));
    }
    let grid = StepGrid::new(0.0, dt, t_end)?;
    let dim = p0.len();
    let mut out = ReducedTrajectory::default();
    let mut y = p0.to_vec();
    let velocity = |x: &[f64], o: &mut [f64]| -> Result<()> {
        let f = reduced_field(im, ham, x, opts)?;
        o.copy_from_slice(&f.velocity);
        Ok(())
    };
    let n = grid.steps();
    let mut tmp = vec![0.0; dim];
    let (mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut next = vec![0.0; dim];
    for k in 0..n {
        let t = grid.time(k);
        let h = grid.time(k + 1) - t;
        let here = reduced_field(im, ham, &y, opts)?;
        if k % opts.stride == 0 {
            out.record(t, &here);
        }
        match opts.integrator {
            Integrator::Rk4 => {
                let k1 = &here.velocity;
                for i in 0..dim {
                    tmp[i] = y[i] + 0.5 * h * k1[i];
                }
                velocity(&tmp, &mut k2)?;
                for i in 0..dim {
                    tmp[i] = y[i] + 0.5 * h * k2[i];
                }
                velocity(&tmp, &mut k3)?;
                for i in 0..dim {
                    tmp[i] = y[i] + h * k3[i];
                }
                velocity(&tmp, &mut k4)?;
                for i in 0..dim {
                    next[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            Integrator::ImplicitMidpoint => {
                let mut field = |_: f64, x: &[f64], o: &mut [f64]| velocity(x, o);
                let mut mid = vec![0.0; dim];
                let (residual, ok) = midpoint_step(&mut field, t, &y, h, &mut tmp, &mut mid, &mut next)?;
                if !ok {
                    return Err(Error::NoConvergence { step: k, time: t, residual });
                }
            }
        }
        std::mem::swap(&mut y, &mut next);
    }
    let last = reduced_field(im, ham, &y, opts)?;
    out.record(grid.time(n), &last);
    Ok(out)
}
