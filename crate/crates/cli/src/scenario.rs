use std::f64::consts::TAU;

use num_complex::Complex64;
use serde_json::{Map, Value};
use varqdyn::coherent::fermi::{fermi_two_mode_flow, FermiFiducial, TwoModeParams};
use varqdyn::coherent::fock::{cat_state, coherent_state, f_leakage, oscillator_energies, OscillatorParams, Parity};
use varqdyn::coherent::gkls::gkls_flow;
use varqdyn::coherent::grassmann::{super_bracket, super_coherent_state, super_coherent_state_closed, super_reduced_flow};
use varqdyn::coherent::spin::{probabilities, radcliffe_flow, radcliffe_generator, radcliffe_state, ProbabilityVector, SpinCoherentPoint};
use varqdyn::coherent::BlochState;
use varqdyn::gaussian::{
    anharmonic_energy, anharmonic_field, free_invariants, harmonic_closed_form, harmonic_field, harmonic_invariants, to_darboux, to_linearizing,
};
use varqdyn::grid::{fidelity, fit_gaussian, split_step_evolve, GridHamiltonian, GridWavefunction, SpatialGrid, SplitStepRun};
use varqdyn::lagrangian::{integrate_reduced, EngineOptions, GaussianImmersion, RadcliffeImmersion};
use varqdyn::numerics::ode::{integrate_rk4_strided, OdeProblem, StepGrid};
use varqdyn::{GaussianParams, ModelParams};

use crate::config::{CatParity, Fiducial, Method, Model, Scenario};
use crate::error::CliResult;

/// Time series plus diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub diagnostics: Map<String, Value>,
}

impl RunOutput {
    fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), diagnostics: Map::new() }
    }

    fn diag(&mut self, key: &str, v: impl Into<Value>) {
        self.diagnostics.insert(key.to_string(), v.into());
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        self.diagnostics.get(key).and_then(Value::as_f64)
    }
}

const GAUSSIAN_COLUMNS: [&str; 7] = ["t", "a_R", "a_I", "b_R", "b_I", "c_R", "c_I"];

fn cx(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, v| m.max(v.abs()))
}

/// Output times of a fixed-step run: every `stride`-th step and the last.
fn sample_times(dt: f64, t_end: f64, stride: usize) -> CliResult<Vec<f64>> {
    let g = StepGrid::new(0.0, dt, t_end)?;
    let n = g.steps();
    let mut out = vec![0.0];
    out.extend((1..=n).filter(|k| k % stride == 0 || *k == n).map(|k| g.time(k)));
    Ok(out)
}

fn model_params(s: &Scenario) -> CliResult<ModelParams> {
    Ok(ModelParams::new(s.params.omega, s.params.lambda)?)
}

fn initial_gaussian(s: &Scenario) -> CliResult<GaussianParams> {
    let a = cx(s.initial.a.expect("validated"));
    let b = cx(s.initial.b.expect("validated"));
    Ok(match s.initial.c {
        Some(c) => GaussianParams::new(a, b, cx(c))?,
        None => GaussianParams::normalized(a, b)?,
    })
}

fn spatial_grid(s: &Scenario) -> CliResult<SpatialGrid> {
    Ok(SpatialGrid::new(s.grid.x_min, s.grid.x_max, s.grid.n_points)?)
}

fn engine_options(s: &Scenario) -> EngineOptions {
    EngineOptions { step: s.tolerances.fd_step, kernel_tol: s.tolerances.kernel, stride: s.time.stride, ..EngineOptions::default() }
}

pub fn run(s: &Scenario) -> CliResult<RunOutput> {
    match s.model {
        Model::Free | Model::Harmonic | Model::Anharmonic => match s.method {
            Method::Restricted => gaussian_restricted(s),
            Method::Lagrangian => gaussian_lagrangian(s),
            Method::Grid => gaussian_grid(s),
            Method::Compare => gaussian_compare(s),
        },
        Model::Radcliffe => match s.method {
            Method::Lagrangian => radcliffe_lagrangian(s),
            _ => radcliffe(s),
        },
        Model::Bosonic | Model::Cat => bosonic(s),
        Model::FOscillator => f_oscillator(s),
        Model::Fermi2 => fermi2(s),
        Model::Grassmann => grassmann(s),
        Model::Gkls => gkls(s),
    }
}

/// Reduced Gaussian trajectory sampled at the configured stride: the full
/// six-component flow for free/harmonic, `(a, b)` with the normalizing gauge
/// for the quartic model.
fn gaussian_trajectory(s: &Scenario) -> CliResult<(Vec<f64>, Vec<GaussianParams>)> {
    let p0 = initial_gaussian(s)?;
    let m = model_params(s)?;
    let (dt, t_end, stride) = (s.time.dt, s.time.t_end, s.time.stride);
    if s.model == Model::Anharmonic {
        let prob = OdeProblem::new(0.0, p0.ab().to_vec(), move |_, y: &[f64], out: &mut [f64]| {
            match GaussianParams::from_real([y[0], y[1], y[2], y[3], 0.0, 0.0]).and_then(|p| anharmonic_field(&p, &m)) {
                Ok(v) => out.copy_from_slice(&v),
                Err(_) => out.fill(f64::NAN),
            }
        })?;
        let tr = integrate_rk4_strided(&prob, dt, t_end, stride)?;
        let ps = tr
            .states
            .iter()
            .map(|y| GaussianParams::normalized(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((tr.times, ps))
    } else {
        let prob = OdeProblem::new(0.0, p0.to_real().to_vec(), move |_, y: &[f64], out: &mut [f64]| {
            match GaussianParams::from_real([y[0], y[1], y[2], y[3], y[4], y[5]]).and_then(|p| harmonic_field(&p, &m)) {
                Ok(v) => out.copy_from_slice(&v),
                Err(_) => out.fill(f64::NAN),
            }
        })?;
        let tr = integrate_rk4_strided(&prob, dt, t_end, stride)?;
        let ps = tr.states.iter().map(|y| GaussianParams::from_real([y[0], y[1], y[2], y[3], y[4], y[5]])).collect::<Result<Vec<_>, _>>()?;
        Ok((tr.times, ps))
    }
}

fn push_gaussian(out: &mut RunOutput, t: f64, p: &GaussianParams, extra: &[f64]) {
    let mut row = vec![t];
    row.extend_from_slice(&p.to_real());
    row.extend_from_slice(extra);
    out.rows.push(row);
}

/// Closed-form checks shared by the restricted and Lagrangian runs.
fn invariant_diagnostics(s: &Scenario, out: &mut RunOutput, times: &[f64], ps: &[GaussianParams]) -> CliResult<()> {
    let m = model_params(s)?;
    let e: Vec<f64> = ps.iter().map(|p| anharmonic_energy(p, &m)).collect::<Result<_, _>>()?;
    out.diag("energy_drift", max_abs(e.iter().map(|v| v - e[0])));
    if s.model == Model::Anharmonic {
        return Ok(());
    }
    let p0 = initial_gaussian(s)?;
    let mut err: f64 = 0.0;
    for (t, p) in times.iter().zip(ps) {
        let q = harmonic_closed_form(&p0, &m, *t)?;
        err = err.max(max_abs(p.ab().iter().zip(q.ab()).map(|(x, y)| x - y)));
    }
    out.diag("closed_form_error", err);
    let r0 = p0.ratio();
    if s.model == Model::Free {
        out.diag("ratio_drift", max_abs(ps.iter().map(|p| (p.ratio() - r0).norm())));
    }
    let inv = |p: &GaussianParams| -> CliResult<(f64, f64)> {
        let d = to_darboux(p)?;
        Ok(if s.model == Model::Free { free_invariants(&d) } else { harmonic_invariants(&d, &m) })
    };
    let i0 = inv(&p0)?;
    let mut drift: f64 = 0.0;
    for p in ps {
        let i = inv(p)?;
        drift = drift.max((i.0 - i0.0).abs()).max((i.1 - i0.1).abs());
    }
    out.diag("invariant_drift", drift);
    if s.model == Model::Harmonic && m.omega > 0.0 {
        let l0 = to_linearizing(&p0, &m)?;
        let (mut modulus, mut phase): (f64, f64) = (0.0, 0.0);
        for (t, p) in times.iter().zip(ps) {
            let l = to_linearizing(p, &m)?;
            modulus = modulus.max((l.z.norm() - l0.z.norm()).abs()).max((l.u.norm() - l0.u.norm()).abs());
            // phases advance at −ω and −2ω
            let rz = l.z * l0.z.conj() * Complex64::from_polar(1.0, m.omega * t);
            let ru = l.u * l0.u.conj() * Complex64::from_polar(1.0, 2.0 * m.omega * t);
            for r in [rz, ru] {
                if r.norm() > 0.0 {
                    phase = phase.max(r.arg().abs());
                }
            }
        }
        out.diag("linearizing_modulus_drift", modulus);
        out.diag("linearizing_phase_error", phase);
    }
    Ok(())
}

fn gaussian_restricted(s: &Scenario) -> CliResult<RunOutput> {
    let m = model_params(s)?;
    let (times, ps) = gaussian_trajectory(s)?;
    let mut cols = GAUSSIAN_COLUMNS.to_vec();
    cols.push("energy");
    let mut out = RunOutput::new(&cols);
    for (t, p) in times.iter().zip(&ps) {
        push_gaussian(&mut out, *t, p, &[anharmonic_energy(p, &m)?]);
    }
    invariant_diagnostics(s, &mut out, &times, &ps)?;
    if s.model == Model::Anharmonic {
        out.diag("gauge", "normalized");
    }
    Ok(out)
}

fn gaussian_lagrangian(s: &Scenario) -> CliResult<RunOutput> {
    let grid = spatial_grid(s)?;
    let m = model_params(s)?;
    let ham = GridHamiltonian::for_model(grid, &m)?;
    let im = GaussianImmersion::restricted(grid);
    let p0 = initial_gaussian(s)?;
    let tr = integrate_reduced(&im, &ham, &p0.ab(), s.time.dt, s.time.t_end, &engine_options(s))?;
    let mut cols = GAUSSIAN_COLUMNS.to_vec();
    cols.extend(["energy", "kernel_dim", "residual"]);
    let mut out = RunOutput::new(&cols);
    let mut ps = Vec::with_capacity(tr.points.len());
    for (k, x) in tr.points.iter().enumerate() {
        let p = GaussianParams::normalized(Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]))?;
        push_gaussian(&mut out, tr.times[k], &p, &[tr.energies[k], tr.kernel_dims[k] as f64, tr.residuals[k]]);
        ps.push(p);
    }
    out.diag("reduced_energy_drift", tr.energy_drift());
    out.diag("max_kernel_dim", tr.kernel_dims.iter().copied().max().unwrap_or(0));
    out.diag("max_residual", max_abs(tr.residuals.iter().copied()));
    out.diag("gauge", "normalized");
    invariant_diagnostics(s, &mut out, &tr.times, &ps)?;
    Ok(out)
}

fn grid_run(s: &Scenario) -> CliResult<(GridHamiltonian, SplitStepRun)> {
    let grid = spatial_grid(s)?;
    let ham = GridHamiltonian::for_model(grid, &model_params(s)?)?;
    let p0 = initial_gaussian(s)?;
    let psi0 = GridWavefunction::from_gaussian(grid, &GaussianParams::normalized(p0.a, p0.b)?)?;
    let run = split_step_evolve(&psi0, &ham, s.time.dt, s.time.t_end, s.time.stride)?;
    Ok((ham, run))
}

fn boundary_diagnostics(out: &mut RunOutput, run: &SplitStepRun) {
    out.diag("boundary_warnings", run.warnings.len());
    out.diag("max_leaked_mass", run.warnings.iter().map(|w| w.leaked_mass).fold(0.0, f64::max));
}

fn gaussian_grid(s: &Scenario) -> CliResult<RunOutput> {
    let (ham, run) = grid_run(s)?;
    let mut cols = GAUSSIAN_COLUMNS.to_vec();
    cols.extend(["fit_residual", "norm", "energy"]);
    let mut out = RunOutput::new(&cols);
    let e0 = ham.energy(&run.states[0]);
    let (mut norm_drift, mut energy_drift, mut residual): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (t, psi) in run.times.iter().zip(&run.states) {
        let fit = fit_gaussian(psi)?;
        let (n, e) = (psi.norm_sqr(), ham.energy(psi));
        norm_drift = norm_drift.max((n - 1.0).abs());
        energy_drift = energy_drift.max((e - e0).abs());
        residual = residual.max(fit.residual);
        push_gaussian(&mut out, *t, &fit.params, &[fit.residual, n, e]);
    }
    out.diag("norm_drift", norm_drift);
    out.diag("energy_drift", energy_drift);
    out.diag("max_fit_residual", residual);
    out.diag("final_fit_residual", out.rows.last().map_or(0.0, |r| r[7]));
    boundary_diagnostics(&mut out, &run);
    Ok(out)
}

fn gaussian_compare(s: &Scenario) -> CliResult<RunOutput> {
    let (times, ps) = gaussian_trajectory(s)?;
    let (_, run) = grid_run(s)?;
    if times.len() != run.times.len() || times.iter().zip(&run.times).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(crate::error::CliError::Output("reduced and grid sample times disagree".into()));
    }
    let mut cols = GAUSSIAN_COLUMNS.to_vec();
    cols.push("fidelity");
    let mut out = RunOutput::new(&cols);
    let frozen = GaussianParams::normalized(ps[0].a, ps[0].b)?;
    let mut min_f: f64 = 1.0;
    for ((t, p), psi) in times.iter().zip(&ps).zip(&run.states) {
        let f = fidelity(psi, &GaussianParams::normalized(p.a, p.b)?)?;
        min_f = min_f.min(f);
        push_gaussian(&mut out, *t, p, &[f]);
    }
    let last = run.states.last().expect("run holds the initial state");
    out.diag("min_fidelity", min_f);
    out.diag("final_fidelity", out.rows.last().map_or(1.0, |r| r[7]));
    out.diag("frozen_final_fidelity", fidelity(last, &frozen)?);
    boundary_diagnostics(&mut out, &run);
    Ok(out)
}

fn point(s: &Scenario) -> CliResult<SpinCoherentPoint> {
    Ok(SpinCoherentPoint::from_z(cx(s.initial.z.expect("validated")))?)
}

fn radcliffe(s: &Scenario) -> CliResult<RunOutput> {
    let p0 = point(s)?;
    let (a, b) = (s.params.a, s.params.b);
    let compare = s.method == Method::Compare;
    let mut cols = vec!["t", "z_re", "z_im", "theta", "phi", "p1", "p2", "p3"];
    if compare {
        cols.extend(["overlap", "probability_error"]);
    }
    let mut out = RunOutput::new(&cols);
    let prob0 = probabilities(&p0);
    let psi0 = radcliffe_state(&p0);
    let (mut radius, mut p3, mut min_overlap, mut p_err): (f64, f64, f64, f64) = (0.0, 0.0, 1.0, 0.0);
    for t in sample_times(s.time.dt, s.time.t_end, s.time.stride)? {
        let (p, phase) = radcliffe_flow(&p0, a, b, t);
        let pr = probabilities(&p);
        let mut row = vec![t, p.z().re, p.z().im, p.theta(), p.phi(), pr.p1, pr.p2, pr.p3];
        radius = radius.max((p.z().norm() - p0.z().norm()).abs());
        let flowed = varqdyn::coherent::spin::tomographic_flow(&prob0, b, t);
        p3 = p3.max((flowed.p3 - prob0.p3).abs());
        if compare {
            // e^{itH_R} is diagonal: exact phases on each component
            let exact = [psi0[0] * Complex64::from_polar(1.0, t * (a + b) / 2.0), psi0[1] * Complex64::from_polar(1.0, t * (a - b) / 2.0)];
            let built = radcliffe_state(&p) * phase;
            let ov = (built[0].conj() * exact[0] + built[1].conj() * exact[1]).norm_sqr();
            let rho12 = exact[0] * exact[1].conj();
            let from_rho = ProbabilityVector::new(0.5 + rho12.re, 0.5 + rho12.im, exact[0].norm_sqr())?;
            let e = max_abs(from_rho.as_array().iter().zip(flowed.as_array()).map(|(x, y)| x - y));
            min_overlap = min_overlap.min(ov);
            p_err = p_err.max(e);
            row.extend([ov, e]);
        }
        out.rows.push(row);
    }
    out.diag("radius_drift", radius);
    out.diag("p3_drift", p3);
    if compare {
        out.diag("min_overlap", min_overlap);
        out.diag("max_probability_error", p_err);
    }
    Ok(out)
}

fn radcliffe_lagrangian(s: &Scenario) -> CliResult<RunOutput> {
    let p0 = point(s)?;
    let gen = radcliffe_generator(s.params.a, s.params.b)?;
    let tr = integrate_reduced(&RadcliffeImmersion, &gen, &[p0.theta(), p0.phi()], s.time.dt, s.time.t_end, &engine_options(s))?;
    let mut out = RunOutput::new(&["t", "theta", "phi", "energy", "kernel_dim"]);
    let (mut theta, mut phase): (f64, f64) = (0.0, 0.0);
    for (k, x) in tr.points.iter().enumerate() {
        let t = tr.times[k];
        theta = theta.max((x[0] - p0.theta()).abs());
        let d = (x[1] - p0.phi() - s.params.b * t).rem_euclid(TAU);
        phase = phase.max(d.min(TAU - d));
        out.rows.push(vec![t, x[0], x[1], tr.energies[k], tr.kernel_dims[k] as f64]);
    }
    out.diag("reduced_energy_drift", tr.energy_drift());
    out.diag("theta_drift", theta);
    out.diag("azimuth_error", phase);
    Ok(out)
}

fn bosonic(s: &Scenario) -> CliResult<RunOutput> {
    let z0 = cx(s.initial.z.expect("validated"));
    let p = OscillatorParams::new(s.params.a, s.params.b)?;
    let n = s.tolerances.cutoff;
    let build = |z: Complex64| match (s.model, s.params.parity) {
        (Model::Cat, CatParity::Even) => cat_state(z, Parity::Even, n),
        (Model::Cat, CatParity::Odd) => cat_state(z, Parity::Odd, n),
        _ => coherent_state(z, n),
    };
    let compare = s.method == Method::Compare;
    let mut out = RunOutput::new(if compare { &["t", "z_re", "z_im", "overlap"] } else { &["t", "z_re", "z_im"] });
    let psi0 = build(z0)?;
    let energies = oscillator_energies(p, n);
    let mut min_overlap: f64 = 1.0;
    for t in sample_times(s.time.dt, s.time.t_end, s.time.stride)? {
        let z = z0 * Complex64::from_polar(1.0, p.omega() * t);
        let mut row = vec![t, z.re, z.im];
        if compare {
            let ov = psi0.evolve_diagonal(&energies, t)?.overlap(&build(z)?);
            min_overlap = min_overlap.min(ov);
            row.push(ov);
        }
        out.rows.push(row);
    }
    if compare {
        out.diag("min_overlap", min_overlap);
    }
    Ok(out)
}

fn f_oscillator(s: &Scenario) -> CliResult<RunOutput> {
    let z0 = cx(s.initial.z.expect("validated"));
    let p = OscillatorParams::new(s.params.a, s.params.b)?;
    let def = s.params.deformation;
    let f = move |n: usize| def.eval(n);
    let mut out = RunOutput::new(&["t", "leakage", "best_re", "best_im", "overlap"]);
    let mut worst: f64 = 0.0;
    for t in sample_times(s.time.dt, s.time.t_end, s.time.stride)? {
        let fit = f_leakage(z0, f, p, t, s.tolerances.cutoff)?;
        worst = worst.max(fit.leakage);
        out.rows.push(vec![t, fit.leakage, fit.best.re, fit.best.im, fit.overlap]);
    }
    out.diag("max_leakage", worst);
    out.diag("final_leakage", out.rows.last().map_or(0.0, |r| r[1]));
    Ok(out)
}

fn fermi2(s: &Scenario) -> CliResult<RunOutput> {
    let z1 = cx(s.initial.z.expect("validated"));
    let z2 = cx(s.initial.z2.expect("validated"));
    let q = &s.params;
    let params = TwoModeParams::new(q.a1, q.b1, q.a2, q.b2)?;
    let fid = match q.fiducial {
        Fiducial::Vacuum => FermiFiducial::Vacuum,
        Fiducial::Entangled => FermiFiducial::Entangled,
    };
    let compare = s.method == Method::Compare;
    let mut cols = vec!["t", "z1_re", "z1_im", "z2_re", "z2_im"];
    if compare {
        cols.extend(["deficit_bound", "best_deficit", "in_family"]);
    }
    let mut out = RunOutput::new(&cols);
    let (mut bound, mut best, mut all_in): (f64, f64, bool) = (0.0, 0.0, true);
    for t in sample_times(s.time.dt, s.time.t_end, s.time.stride)? {
        let flow = fermi_two_mode_flow(z1, z2, fid, params, t);
        let (w1, w2) = flow.predicted;
        let mut row = vec![t, w1.re, w1.im, w2.re, w2.im];
        if compare {
            bound = bound.max(flow.deficit_lower_bound);
            best = best.max(flow.best_deficit);
            all_in &= flow.in_family;
            row.extend([flow.deficit_lower_bound, flow.best_deficit, if flow.in_family { 1.0 } else { 0.0 }]);
        }
        out.rows.push(row);
    }
    if compare {
        out.diag("max_deficit_bound", bound);
        out.diag("max_best_deficit", best);
        out.diag("family_preserved", all_in);
    }
    Ok(out)
}

fn grassmann(s: &Scenario) -> CliResult<RunOutput> {
    let [x1, x2] = s.initial.xi.expect("validated");
    let a = s.params.a;
    let mut out = RunOutput::new(&["t", "xi1", "xi2"]);
    let r0 = x1.hypot(x2);
    let mut radius: f64 = 0.0;
    for t in sample_times(s.time.dt, s.time.t_end, s.time.stride)? {
        let (y1, y2) = super_reduced_flow(x1, x2, a, t);
        radius = radius.max((y1.hypot(y2) - r0).abs());
        out.rows.push(vec![t, y1, y2]);
    }
    out.diag("radius_drift", radius);
    out.diag("bracket_11", super_bracket(1, 1)?);
    out.diag("bracket_22", super_bracket(2, 2)?);
    out.diag("bracket_12", super_bracket(1, 2)?);
    out.diag("coherent_state_exact", super_coherent_state::<f64>()? == super_coherent_state_closed::<f64>()?);
    Ok(out)
}

fn gkls(s: &Scenario) -> CliResult<RunOutput> {
    let [x, y, z] = s.initial.bloch.expect("validated");
    let rho0 = BlochState::new(x, y, z)?;
    let mut out = RunOutput::new(&["t", "x", "y", "z", "rho11", "rho22", "min_eigenvalue"]);
    let (mut min_ev, mut trace): (f64, f64) = (1.0, 0.0);
    for t in sample_times(s.time.dt, s.time.t_end, s.time.stride)? {
        let st = gkls_flow(&rho0, s.params.rate, t)?;
        let m = st.density_matrix();
        let (lo, _) = st.eigenvalues();
        min_ev = min_ev.min(lo);
        trace = trace.max((m[0][0].re + m[1][1].re - 1.0).abs());
        out.rows.push(vec![t, st.x, st.y, st.z, m[0][0].re, m[1][1].re, lo]);
    }
    out.diag("min_eigenvalue", min_ev);
    out.diag("trace_error", trace);
    out.diag("max_abs_z", max_abs(out.column("z").expect("column exists").into_iter()));
    Ok(out)
}
