use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::{Complex, Complex64};

use crate::coherent::fock::Parity;
use crate::error::{domain, invalid, Result};
use crate::lagrangian::MatrixHamiltonian;
use crate::scalar::{c, Real};

pub type DensityMatrix = Matrix2<Complex64>;

/// Spin-½ state in the basis `(|+½⟩, |−½⟩)`.
pub type Spinor = Vector2<Complex64>;

/// Point of the punctured sphere, stored as `z` with `θ = 2|z|`, `φ = arg z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinCoherentPoint {
    z: Complex64,
}

impl SpinCoherentPoint {
    pub fn from_z(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(invalid("non-finite z"));
        }
        if z.norm() >= PI {
            return Err(domain(format!("|z| = {} must be below π", z.norm())));
        }
        Ok(Self { z })
    }

    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) || theta < 0.0 {
            return Err(invalid(format!("angles ({theta}, {phi}) out of range")));
        }
        Self::from_z(Complex64::from_polar(theta / 2.0, phi))
    }

    /// Inverse of the stereographic chart `ζ = tan(θ/2) e^{−iφ}`.
    pub fn from_zeta(zeta: Complex64) -> Result<Self> {
        if !(zeta.re.is_finite() && zeta.im.is_finite()) {
            return Err(invalid("non-finite ζ"));
        }
        Self::from_angles(2.0 * zeta.norm().atan(), -zeta.arg())
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn theta(&self) -> f64 {
        2.0 * self.z.norm()
    }

    /// Azimuth in `[0, 2π)`; zero at the pole `z = 0`.
    pub fn phi(&self) -> f64 {
        let p = self.z.arg();
        if p < 0.0 {
            p + TAU
        } else {
            p
        }
    }

    pub fn zeta(&self) -> Complex64 {
        Complex64::from_polar((self.theta() / 2.0).tan(), -self.phi())
    }
}

/// `sin|z|/|z|`, continuous at the origin.
pub(crate) fn sinc(r: f64) -> f64 {
    if r.abs() < 1e-8 {
        1.0 - r * r / 6.0
    } else {
        r.sin() / r
    }
}

pub fn radcliffe_state(p: &SpinCoherentPoint) -> Spinor {
    let r = p.z.norm();
    Spinor::new(p.z * sinc(r), Complex64::new(r.cos(), 0.0))
}

/// Stereographic family `(ζ, 1)/√(1+|ζ|²)`.
pub fn zeta_state(zeta: Complex64) -> Spinor {
    let n = (1.0 + zeta.norm_sqr()).sqrt();
    Spinor::new(zeta / n, Complex64::new(1.0 / n, 0.0))
}

pub fn radcliffe_density(p: &SpinCoherentPoint) -> DensityMatrix {
    let psi = radcliffe_state(p);
    psi * psi.adjoint()
}

/// `H_R = (A/2){J₊, J₋} + (B/2)[J₊, J₋] = diag((A+B)/2, (A−B)/2)`.
pub fn radcliffe_hamiltonian(a: f64, b: f64) -> DensityMatrix {
    Matrix2::new(
        Complex64::new((a + b) / 2.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new((a - b) / 2.0, 0.0),
    )
}

/// `−H_R` as an operator for the variational engine, whose physical
/// evolution `e^{−iHt}` then coincides with `e^{itH_R}`.
pub fn radcliffe_generator(a: f64, b: f64) -> Result<MatrixHamiltonian> {
    let h = -radcliffe_hamiltonian(a, b);
    MatrixHamiltonian::new(DMatrix::from_fn(2, 2, |i, j| h[(i, j)]), "radcliffe")
}

/// Evolution under `e^{itH_R}`: returns the flowed point and the global phase
/// `e^{it(A−B)/2}` with `e^{itH_R}|z⟩ = phase · |z(t)⟩`.
pub fn radcliffe_flow(p0: &SpinCoherentPoint, a: f64, b: f64, t: f64) -> (SpinCoherentPoint, Complex64) {
    let z = p0.z * Complex64::from_polar(1.0, b * t);
    let phase = Complex64::from_polar(1.0, t * (a - b) / 2.0);
    (SpinCoherentPoint { z }, phase)
}

/// Spin-projection probabilities along x, y, z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityVector<T> {
    pub p1: T,
    pub p2: T,
    pub p3: T,
}

impl<T: Real> ProbabilityVector<T> {
    pub fn new(p1: T, p2: T, p3: T) -> Result<Self> {
        let slack = c::<T>(1e-12);
        for (name, p) in [("p1", p1), ("p2", p2), ("p3", p3)] {
            if !(p >= -slack && p <= T::one() + slack) {
                return Err(domain(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(Self { p1, p2, p3 })
    }

    /// Reads `p1 = ½ + Re ρ₁₂`, `p2 = ½ + Im ρ₁₂`, `p3 = ρ₁₁` with `ρ₁₂ = ψ₁ψ̄₂`.
    pub fn from_density(rho: &[[Complex<T>; 2]; 2]) -> Result<Self> {
        let half = c::<T>(0.5);
        Self::new(half + rho[0][1].re, half + rho[0][1].im, rho[0][0].re)
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.p1, self.p2, self.p3]
    }
}

pub fn probabilities(p: &SpinCoherentPoint) -> ProbabilityVector<f64> {
    let rho = radcliffe_density(p);
    let arr = [[rho[(0, 0)], rho[(0, 1)]], [rho[(1, 0)], rho[(1, 1)]]];
    ProbabilityVector::from_density(&arr).expect("pure state yields probabilities in [0, 1]")
}

/// `(L, r)` of the linear probability equation `ṗ = L p + r`.
pub fn tomographic_generator<T: Real>(b: T) -> ([[T; 3]; 3], [T; 3]) {
    let z = T::zero();
    let half = c::<T>(0.5);
    ([[z, -b, z], [b, z, z], [z, z, z]], [b * half, -b * half, z])
}

/// Solution of `ṗ = L p + r`: the pair `(p1 − ½, p2 − ½)` rotates by `Bt`, `p3` is fixed.
pub fn tomographic_flow<T: Real>(p0: &ProbabilityVector<T>, b: T, t: T) -> ProbabilityVector<T> {
    let half = c::<T>(0.5);
    let (q1, q2) = (p0.p1 - half, p0.p2 - half);
    let (s, co) = (b * t).sin_cos();
    ProbabilityVector { p1: half + co * q1 - s * q2, p2: half + s * q1 + co * q2, p3: p0.p3 }
}

/// Spin analogue of the cat states, with the free angle `γ` supplied by the caller.
pub fn spin_cat_state(z: Complex64, gamma: f64, parity: Parity) -> Result<Spinor> {
    let r = z.norm();
    let raw = match parity {
        Parity::Even => Spinor::new(Complex64::new(r.sin() * gamma.cos(), 0.0), Complex64::new(r.cos(), 0.0)),
        Parity::Odd => Spinor::new(Complex64::new(r.sin() * gamma.sin(), 0.0), Complex64::new(0.0, 0.0)),
    };
    let n = raw.norm();
    if !(n > 1e-150) {
        return Err(domain(format!("{parity:?} spin cat vanishes at z = {z}, γ = {gamma}")));
    }
    Ok(raw / Complex64::new(n, 0.0))
}

pub fn spin_cat_density(z: Complex64, gamma: f64, parity: Parity) -> Result<DensityMatrix> {
    let psi = spin_cat_state(z, gamma, parity)?;
    Ok(psi * psi.adjoint())
}
