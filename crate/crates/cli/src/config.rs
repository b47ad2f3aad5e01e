use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{config, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Free,
    Harmonic,
    Anharmonic,
    Radcliffe,
    Bosonic,
    FOscillator,
    Fermi2,
    Cat,
    Grassmann,
    Gkls,
}

impl Model {
    pub const ALL: [Model; 10] = [
        Model::Free,
        Model::Harmonic,
        Model::Anharmonic,
        Model::Radcliffe,
        Model::Bosonic,
        Model::FOscillator,
        Model::Fermi2,
        Model::Cat,
        Model::Grassmann,
        Model::Gkls,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Free => "free",
            Model::Harmonic => "harmonic",
            Model::Anharmonic => "anharmonic",
            Model::Radcliffe => "radcliffe",
            Model::Bosonic => "bosonic",
            Model::FOscillator => "f-oscillator",
            Model::Fermi2 => "fermi2",
            Model::Cat => "cat",
            Model::Grassmann => "grassmann",
            Model::Gkls => "gkls",
        }
    }

    pub fn is_gaussian(self) -> bool {
        matches!(self, Model::Free | Model::Harmonic | Model::Anharmonic)
    }

    pub fn methods(self) -> &'static [Method] {
        use Method::*;
        match self {
            Model::Free | Model::Harmonic | Model::Anharmonic => &[Restricted, Lagrangian, Grid, Compare],
            Model::Radcliffe => &[Restricted, Lagrangian, Compare],
            Model::Bosonic | Model::Fermi2 | Model::Cat => &[Restricted, Compare],
            Model::FOscillator => &[Compare],
            Model::Grassmann | Model::Gkls => &[Restricted],
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Restricted,
    Lagrangian,
    Grid,
    Compare,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Restricted => "restricted",
            Method::Lagrangian => "lagrangian",
            Method::Grid => "grid",
            Method::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Deformation {
    /// `f ≡ 1`
    Identity,
    /// `f(n) = √((n+1)/(n+2))`
    SqrtRatio,
}

impl Deformation {
    pub fn eval(self, n: usize) -> f64 {
        match self {
            Deformation::Identity => 1.0,
            Deformation::SqrtRatio => ((n as f64 + 1.0) / (n as f64 + 2.0)).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fiducial {
    Vacuum,
    Entangled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatParity {
    Even,
    Odd,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    model: Option<String>,
    method: Option<String>,
    #[serde(default)]
    initial: RawInitial,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    time: RawTime,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    tolerances: RawTolerances,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    a: Option<[f64; 2]>,
    b: Option<[f64; 2]>,
    c: Option<[f64; 2]>,
    z: Option<[f64; 2]>,
    z2: Option<[f64; 2]>,
    theta: Option<f64>,
    phi: Option<f64>,
    bloch: Option<[f64; 3]>,
    xi: Option<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    omega: Option<f64>,
    lambda: Option<f64>,
    #[serde(rename = "A")]
    a: Option<f64>,
    #[serde(rename = "B")]
    b: Option<f64>,
    #[serde(rename = "A1")]
    a1: Option<f64>,
    #[serde(rename = "B1")]
    b1: Option<f64>,
    #[serde(rename = "A2")]
    a2: Option<f64>,
    #[serde(rename = "B2")]
    b2: Option<f64>,
    rate: Option<f64>,
    deformation: Option<Deformation>,
    fiducial: Option<Fiducial>,
    parity: Option<CatParity>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    dt: Option<f64>,
    t_end: Option<f64>,
    stride: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min: Option<f64>,
    x_max: Option<f64>,
    n_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    fd_step: Option<f64>,
    kernel: Option<f64>,
    cutoff: Option<usize>,
}

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_END: f64 = 1.0;
pub const DEFAULT_GRID: (f64, f64, usize) = (-20.0, 20.0, 2048);
pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const DEFAULT_KERNEL_TOL: f64 = 1e-10;

/// Initial data, validated for the chosen model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Initial {
    pub a: Option<[f64; 2]>,
    pub b: Option<[f64; 2]>,
    /// `None` selects the normalizing gauge `c_R(a, b)`, `c_I = 0`.
    pub c: Option<[f64; 2]>,
    pub z: Option<[f64; 2]>,
    pub z2: Option<[f64; 2]>,
    pub bloch: Option<[f64; 3]>,
    pub xi: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub omega: f64,
    pub lambda: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "B1")]
    pub b1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "B2")]
    pub b2: f64,
    pub rate: f64,
    pub deformation: Deformation,
    pub fiducial: Fiducial,
    pub parity: CatParity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeSpan {
    pub dt: f64,
    pub t_end: f64,
    pub stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub fd_step: f64,
    pub kernel: f64,
    pub cutoff: usize,
}

/// A validated run description; every field is concrete.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub method: Method,
    pub initial: Initial,
    pub params: Params,
    pub time: TimeSpan,
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    /// `field = value` for every defaulted field the run consumes.
    pub defaults: Vec<String>,
}

/// Command-line overrides applied before validation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

struct Resolver {
    defaults: Vec<String>,
}

impl Resolver {
    fn or<T: fmt::Debug + Copy>(&mut self, v: Option<T>, field: &str, default: T) -> T {
        v.unwrap_or_else(|| {
            self.defaults.push(format!("{field} = {default:?}"));
            default
        })
    }
}

fn need<T>(v: Option<T>, field: &str, model: Model) -> CliResult<T> {
    v.ok_or_else(|| config(format!("model `{model}` requires `{field}`")))
}

fn finite(field: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(config(format!("`{field}` must be finite, got {v}")))
    }
}

fn finite_all(field: &str, v: &[f64]) -> CliResult<()> {
    for x in v {
        finite(field, *x)?;
    }
    Ok(())
}

pub fn load(path: &Path, ov: Overrides) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse(&text, stem, ov)
}

pub fn parse(text: &str, default_name: &str, ov: Overrides) -> CliResult<Scenario> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| config(e.to_string()))?;
    resolve(raw, default_name, ov)
}

fn parse_model(s: &str) -> CliResult<Model> {
    Model::ALL
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| config(format!("unknown model `{s}`; expected one of {}", Model::ALL.map(|m| m.name()).join(", "))))
}

fn parse_method(s: &str) -> CliResult<Method> {
    [Method::Restricted, Method::Lagrangian, Method::Grid, Method::Compare]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| config(format!("unknown method `{s}`; expected restricted, lagrangian, grid or compare")))
}

fn resolve(raw: RawConfig, default_name: &str, ov: Overrides) -> CliResult<Scenario> {
    let mut r = Resolver { defaults: Vec::new() };
    let model = parse_model(&raw.model.ok_or_else(|| config("missing `model`"))?)?;
    let method = match raw.method {
        Some(m) => parse_method(&m)?,
        None => {
            let m = model.methods()[0];
            r.defaults.push(format!("method = {:?}", m.name()));
            m
        }
    };
    if !model.methods().contains(&method) {
        let allowed: Vec<&str> = model.methods().iter().map(|m| m.name()).collect();
        return Err(config(format!("method `{}` is not available for model `{model}` (allowed: {})", method.name(), allowed.join(", "))));
    }

    let ri = raw.initial;
    let rp = raw.params;
    let mut initial = Initial { a: None, b: None, c: None, z: None, z2: None, bloch: None, xi: None };
    let mut params = Params {
        omega: 0.0,
        lambda: 0.0,
        a: 0.0,
        b: 0.0,
        a1: 0.0,
        b1: 0.0,
        a2: 0.0,
        b2: 0.0,
        rate: 0.0,
        deformation: Deformation::Identity,
        fiducial: Fiducial::Vacuum,
        parity: CatParity::Even,
    };

    match model {
        Model::Free | Model::Harmonic | Model::Anharmonic => {
            let a = need(ri.a, "initial.a", model)?;
            let b = need(ri.b, "initial.b", model)?;
            finite_all("initial.a", &a)?;
            finite_all("initial.b", &b)?;
            if !(a[0] > 0.0) {
                return Err(config(format!("`initial.a` needs a positive real part, got {}", a[0])));
            }
            if let Some(c) = ri.c {
                finite_all("initial.c", &c)?;
            } else {
                r.defaults.push("initial.c = normalizing gauge".into());
            }
            initial.a = Some(a);
            initial.b = Some(b);
            initial.c = ri.c;
            if model != Model::Free {
                params.omega = finite("params.omega", need(rp.omega, "params.omega", model)?)?;
                if params.omega < 0.0 {
                    return Err(config("`params.omega` must be non-negative"));
                }
            }
            if model == Model::Anharmonic {
                params.lambda = finite("params.lambda", need(rp.lambda, "params.lambda", model)?)?;
                if params.lambda < 0.0 {
                    return Err(config("`params.lambda` must be non-negative"));
                }
            }
        }
        Model::Radcliffe | Model::Bosonic | Model::FOscillator | Model::Cat => {
            let z = match (ri.z, ri.theta, ri.phi) {
                (Some(z), None, None) => z,
                (None, Some(th), Some(ph)) if model == Model::Radcliffe => [th / 2.0 * ph.cos(), th / 2.0 * ph.sin()],
                (None, None, None) => return Err(config(format!("model `{model}` requires `initial.z`"))),
                _ => return Err(config("give either `initial.z` or both `initial.theta` and `initial.phi`")),
            };
            finite_all("initial.z", &z)?;
            if model == Model::Radcliffe && z[0].hypot(z[1]) >= std::f64::consts::PI {
                return Err(config("`initial.z` must satisfy |z| < π"));
            }
            initial.z = Some(z);
            params.a = finite("params.A", need(rp.a, "params.A", model)?)?;
            params.b = finite("params.B", need(rp.b, "params.B", model)?)?;
            if model == Model::FOscillator {
                params.deformation = r.or(rp.deformation, "params.deformation", Deformation::Identity);
            }
            if model == Model::Cat {
                params.parity = r.or(rp.parity, "params.parity", CatParity::Even);
                if params.parity == CatParity::Odd && z == [0.0, 0.0] {
                    return Err(config("odd cat state needs `initial.z` ≠ 0"));
                }
            }
        }
        Model::Fermi2 => {
            let z1 = need(ri.z, "initial.z", model)?;
            let z2 = need(ri.z2, "initial.z2", model)?;
            finite_all("initial.z", &z1)?;
            finite_all("initial.z2", &z2)?;
            initial.z = Some(z1);
            initial.z2 = Some(z2);
            params.a1 = finite("params.A1", need(rp.a1, "params.A1", model)?)?;
            params.b1 = finite("params.B1", need(rp.b1, "params.B1", model)?)?;
            params.a2 = finite("params.A2", need(rp.a2, "params.A2", model)?)?;
            params.b2 = finite("params.B2", need(rp.b2, "params.B2", model)?)?;
            params.fiducial = r.or(rp.fiducial, "params.fiducial", Fiducial::Vacuum);
        }
        Model::Grassmann => {
            let xi = need(ri.xi, "initial.xi", model)?;
            finite_all("initial.xi", &xi)?;
            initial.xi = Some(xi);
            params.a = finite("params.A", need(rp.a, "params.A", model)?)?;
        }
        Model::Gkls => {
            let v = need(ri.bloch, "initial.bloch", model)?;
            finite_all("initial.bloch", &v)?;
            if (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() > 1.0 + 4.0 * f64::EPSILON {
                return Err(config("`initial.bloch` lies outside the Bloch ball"));
            }
            initial.bloch = Some(v);
            params.rate = finite("params.rate", need(rp.rate, "params.rate", model)?)?;
            if params.rate < 0.0 {
                return Err(config("`params.rate` must be non-negative"));
            }
        }
    }

    let dt = finite("time.dt", r.or(ov.dt.or(raw.time.dt), "time.dt", DEFAULT_DT))?;
    let t_end = finite("time.t_end", r.or(ov.t_end.or(raw.time.t_end), "time.t_end", DEFAULT_T_END))?;
    if !(dt > 0.0) {
        return Err(config("`time.dt` must be positive"));
    }
    if !(t_end > 0.0) {
        return Err(config("`time.t_end` must be positive"));
    }
    let stride = r.or(raw.time.stride, "time.stride", 1usize);
    if stride == 0 {
        return Err(config("`time.stride` must be positive"));
    }
    let steps = (t_end / dt).ceil();
    if steps > 1e8 {
        return Err(config(format!("{steps} time steps exceed the limit of 1e8")));
    }

    let uses_grid = model.is_gaussian() && method != Method::Restricted;
    let grid = if uses_grid {
        let g = GridSpec {
            x_min: r.or(raw.grid.x_min, "grid.x_min", DEFAULT_GRID.0),
            x_max: r.or(raw.grid.x_max, "grid.x_max", DEFAULT_GRID.1),
            n_points: r.or(raw.grid.n_points, "grid.n_points", DEFAULT_GRID.2),
        };
        finite("grid.x_min", g.x_min)?;
        finite("grid.x_max", g.x_max)?;
        if !(g.x_max > g.x_min) {
            return Err(config("`grid.x_max` must exceed `grid.x_min`"));
        }
        if g.n_points < 16 || !g.n_points.is_power_of_two() {
            return Err(config("`grid.n_points` must be a power of two, at least 16"));
        }
        g
    } else {
        let g = raw.grid;
        if g.x_min.is_some() || g.x_max.is_some() || g.n_points.is_some() {
            return Err(config(format!("`[grid]` is not used by {model}/{}", method.name())));
        }
        GridSpec { x_min: DEFAULT_GRID.0, x_max: DEFAULT_GRID.1, n_points: DEFAULT_GRID.2 }
    };

    let uses_engine = method == Method::Lagrangian;
    let uses_fock = matches!(model, Model::Bosonic | Model::FOscillator | Model::Cat);
    let fd_step = if uses_engine { r.or(raw.tolerances.fd_step, "tolerances.fd_step", DEFAULT_FD_STEP) } else { DEFAULT_FD_STEP };
    let kernel = if uses_engine { r.or(raw.tolerances.kernel, "tolerances.kernel", DEFAULT_KERNEL_TOL) } else { DEFAULT_KERNEL_TOL };
    let cutoff = if uses_fock {
        r.or(raw.tolerances.cutoff, "tolerances.cutoff", varqdyn::coherent::fock::DEFAULT_CUTOFF)
    } else {
        varqdyn::coherent::fock::DEFAULT_CUTOFF
    };
    if !(fd_step > 0.0 && fd_step.is_finite()) || !(kernel > 0.0 && kernel < 1.0) {
        return Err(config("`tolerances.fd_step` must be positive and `tolerances.kernel` in (0, 1)"));
    }
    if cutoff == 0 {
        return Err(config("`tolerances.cutoff` must be positive"));
    }

    Ok(Scenario {
        name: raw.name.unwrap_or_else(|| default_name.to_string()),
        model,
        method,
        initial,
        params,
        time: TimeSpan { dt, t_end, stride },
        grid,
        tolerances: Tolerances { fd_step, kernel, cutoff },
        defaults: r.defaults,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_omega_is_named() {
        let e = parse("model = \"harmonic\"\n[initial]\na = [0.5, 0.0]\nb = [0.0, 0.0]\n", "x", Overrides::default()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("omega"));
    }

    #[test]
    fn defaults_are_recorded() {
        let s = parse("model = \"free\"\n[initial]\na = [0.5, 0.0]\nb = [0.3, 0.2]\n", "x", Overrides::default()).unwrap();
        assert!(s.defaults.iter().any(|d| d.starts_with("time.dt")));
        assert!(s.defaults.iter().any(|d| d.starts_with("method")));
        let s = parse("model = \"free\"\n[initial]\na = [0.5, 0.0]\nb = [0.3, 0.2]\n", "x", Overrides { dt: Some(0.01), t_end: None }).unwrap();
        assert_eq!(s.time.dt, 0.01);
        assert!(!s.defaults.iter().any(|d| d.starts_with("time.dt")));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(parse("model = \"free\"\nfoo = 1\n", "x", Overrides::default()).is_err());
        assert!(parse("model = \"gkls\"\nmethod = \"grid\"\n", "x", Overrides::default()).is_err());
    }
}
