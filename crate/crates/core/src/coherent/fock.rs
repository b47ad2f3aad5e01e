use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, invalid, Error, Result};

pub const DEFAULT_CUTOFF: usize = 64;

/// Admissibility bound on `|c_N|²` of the normalized expansion.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Grid resolution and refinement budget of the family search.
pub const SEARCH_GRID: usize = 41;
pub const NEWTON_STEPS: usize = 20;

/// Coefficients on `|0⟩ … |N⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub coefficients: Vec<Complex64>,
}

impl FockState {
    pub fn cutoff(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-8
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Applies `e^{−iE_n t}` given the diagonal energies `E_n`.
    pub fn evolve_diagonal(&self, energies: &[f64], t: f64) -> Result<Self> {
        if energies.len() != self.coefficients.len() {
            return Err(invalid(format!("{} energies for {} coefficients", energies.len(), self.coefficients.len())));
        }
        let coefficients =
            self.coefficients.iter().zip(energies).map(|(c, e)| c * Complex64::from_polar(1.0, -e * t)).collect();
        Ok(Self { coefficients })
    }

    fn from_raw(raw: Vec<Complex64>) -> Result<Self> {
        let n2: f64 = raw.iter().map(|c| c.norm_sqr()).sum();
        if !(n2.is_finite() && n2 > 0.0) {
            return Err(domain("Fock expansion has zero or non-finite norm"));
        }
        let cutoff = raw.len() - 1;
        let tail = raw[cutoff].norm_sqr() / n2;
        if !(tail < TAIL_TOLERANCE) {
            return Err(Error::Truncation { cutoff, tail, tolerance: TAIL_TOLERANCE });
        }
        let s = 1.0 / n2.sqrt();
        Ok(Self { coefficients: raw.into_iter().map(|c| c * s).collect() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Couplings of `H = (A/2){a†, a} + (B/2)[a†, a]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub a: f64,
    pub b: f64,
}

impl OscillatorParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(invalid("non-finite oscillator couplings"));
        }
        Ok(Self { a, b })
    }

    /// Frequency of the induced rotation `z ↦ z e^{iωt}` on bosonic coherent states.
    pub fn omega(&self) -> f64 {
        self.a
    }
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff == 0 {
        return Err(invalid("Fock cutoff must be positive"));
    }
    Ok(())
}

/// Glauber state `e^{−|α|²/2} Σ αⁿ/√n! |n⟩`.
pub fn glauber_state(alpha: Complex64, cutoff: usize) -> Result<FockState> {
    check_cutoff(cutoff)?;
    let mut raw = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    raw.push(c);
    for n in 1..=cutoff {
        c = c * alpha / (n as f64).sqrt();
        raw.push(c);
    }
    FockState::from_raw(raw)
}

/// `|z⟩ = exp(z a − z̄ a†)|0⟩`, i.e. the Glauber state at `α = −z̄`.
pub fn coherent_state(z: Complex64, cutoff: usize) -> Result<FockState> {
    glauber_state(-z.conj(), cutoff)
}

/// `|z⟩_f ∝ Σ zⁿ/(√n! [f(n)]!) |n⟩` with `[f(n)]! = f(n)⋯f(1)`.
pub fn f_coherent_state(z: Complex64, f: impl Fn(usize) -> f64, cutoff: usize) -> Result<FockState> {
    check_cutoff(cutoff)?;
    let mut raw = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new(1.0, 0.0);
    raw.push(c);
    for n in 1..=cutoff {
        let fn_ = f(n);
        if !(fn_.is_finite() && fn_ > 0.0) {
            return Err(domain(format!("f({n}) = {fn_} must be positive")));
        }
        c = c * z / ((n as f64).sqrt() * fn_);
        raw.push(c);
    }
    FockState::from_raw(raw)
}

/// Truncated `a` on `|0⟩ … |N⟩`.
pub fn annihilation(cutoff: usize) -> DMatrix<Complex64> {
    deformed_annihilation(|_| 1.0, cutoff)
}

/// Truncated `A_f = a f(n)`.
pub fn deformed_annihilation(f: impl Fn(usize) -> f64, cutoff: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(cutoff + 1, cutoff + 1);
    for n in 1..=cutoff {
        m[(n - 1, n)] = Complex64::new((n as f64).sqrt() * f(n), 0.0);
    }
    m
}

/// Diagonal of `A(n + ½) − B/2`, exact at every level including the cutoff.
pub fn oscillator_energies(p: OscillatorParams, cutoff: usize) -> Vec<f64> {
    (0..=cutoff).map(|n| p.a * (n as f64 + 0.5) - p.b / 2.0).collect()
}

/// Diagonal of `(A/2){A_f†, A_f} + (B/2)[A_f†, A_f]`.
pub fn f_oscillator_energies(f: impl Fn(usize) -> f64, p: OscillatorParams, cutoff: usize) -> Vec<f64> {
    (0..=cutoff)
        .map(|n| {
            let down = if n == 0 { 0.0 } else { n as f64 * f(n).powi(2) };
            let up = (n + 1) as f64 * f(n + 1).powi(2);
            p.a / 2.0 * (down + up) + p.b / 2.0 * (down - up)
        })
        .collect()
}

/// `N±(|z⟩ ± |−z⟩)` with the normalization computed from the vector.
pub fn cat_state(z: Complex64, parity: Parity, cutoff: usize) -> Result<FockState> {
    if parity == Parity::Odd && z == Complex64::new(0.0, 0.0) {
        return Err(domain("odd cat state vanishes at z = 0"));
    }
    let plus = coherent_state(z, cutoff)?;
    let minus = coherent_state(-z, cutoff)?;
    let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
    let raw: Vec<Complex64> = plus.coefficients.iter().zip(&minus.coefficients).map(|(a, b)| a + b * sign).collect();
    FockState::from_raw(raw)
}

/// Best member of a one-complex-parameter family for a target state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyFit {
    pub leakage: f64,
    pub best: Complex64,
    pub overlap: f64,
}

/// Maximizes `|⟨w|ψ⟩|²` over `w` in the disc of the given radius: a square
/// grid restricted to the disc, then damped Newton steps.
pub fn best_family_member(
    family: impl Fn(Complex64) -> Result<FockState>,
    target: &FockState,
    radius: f64,
) -> Result<FamilyFit> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid(format!("search radius {radius} must be positive")));
    }
    let g = |w: Complex64| family(w).map(|s| s.overlap(target)).unwrap_or(0.0);
    let spacing = 2.0 * radius / (SEARCH_GRID - 1) as f64;
    let mut best = (Complex64::new(0.0, 0.0), g(Complex64::new(0.0, 0.0)));
    for i in 0..SEARCH_GRID {
        for j in 0..SEARCH_GRID {
            let w = Complex64::new(-radius + i as f64 * spacing, -radius + j as f64 * spacing);
            if w.norm() > radius * (1.0 + 1e-12) {
                continue;
            }
            let v = g(w);
            if v > best.1 {
                best = (w, v);
            }
        }
    }
    let (mut w, mut v) = best;
    for _ in 0..NEWTON_STEPS {
        let h = 1e-4 * w.norm().max(1.0);
        let at = |dx: f64, dy: f64| g(w + Complex64::new(dx, dy));
        let (gxp, gxm, gyp, gym) = (at(h, 0.0), at(-h, 0.0), at(0.0, h), at(0.0, -h));
        let grad = [(gxp - gxm) / (2.0 * h), (gyp - gym) / (2.0 * h)];
        let hxx = (gxp - 2.0 * v + gxm) / (h * h);
        let hyy = (gyp - 2.0 * v + gym) / (h * h);
        let hxy = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
        let det = hxx * hyy - hxy * hxy;
        let mut step = if hxx < 0.0 && det > 0.0 {
            Complex64::new(-(hyy * grad[0] - hxy * grad[1]) / det, -(hxx * grad[1] - hxy * grad[0]) / det)
        } else {
            Complex64::new(grad[0], grad[1]) * spacing
        };
        if step.norm() > spacing {
            step *= spacing / step.norm();
        }
        let mut accepted = false;
        for _ in 0..12 {
            let cand = g(w + step);
            if cand > v {
                w += step;
                v = cand;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(FamilyFit { leakage: (1.0 - v).clamp(0.0, 1.0), best: w, overlap: v })
}

/// Leakage of `e^{−iHt}|z⟩_f` out of the f-coherent family, `H` the f-oscillator Hamiltonian.
pub fn f_leakage(
    z: Complex64,
    f: impl Fn(usize) -> f64 + Copy,
    p: OscillatorParams,
    t: f64,
    cutoff: usize,
) -> Result<FamilyFit> {
    let psi0 = f_coherent_state(z, f, cutoff)?;
    let psi = psi0.evolve_diagonal(&f_oscillator_energies(f, p, cutoff), t)?;
    best_family_member(|w| f_coherent_state(w, f, cutoff), &psi, (2.0 * z.norm()).max(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undeformed_state_is_glauber() {
        let z = Complex64::new(0.6, -0.3);
        let a = f_coherent_state(z, |_| 1.0, 40).unwrap();
        let b = glauber_state(z, 40).unwrap();
        assert!((a.overlap(&b) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn divergent_series_is_reported() {
        let err = f_coherent_state(Complex64::new(6.0, 0.0), |_| 1.0, 20).unwrap_err();
        assert!(matches!(err, Error::Truncation { cutoff: 20, .. }));
    }

    #[test]
    fn deformed_operator_has_state_as_eigenvector() {
        let f = |n: usize| ((n as f64 + 1.0) / (n as f64 + 2.0)).sqrt();
        let z = Complex64::new(0.5, 0.4);
        let s = f_coherent_state(z, f, 60).unwrap();
        let a = deformed_annihilation(f, 60);
        let v = nalgebra::DVector::from_vec(s.coefficients.clone());
        let av = &a * &v;
        for n in 0..50 {
            assert!((av[n] - z * v[n]).norm() < 1e-12);
        }
    }
}
