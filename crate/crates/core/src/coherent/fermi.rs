use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::coherent::fock::OscillatorParams;
use crate::coherent::spin::sinc;
use crate::numerics::optimize::nelder_mead;

/// Deficit below which an evolved state counts as a family member.
pub const FAMILY_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Single-mode `c` in the basis `(|1⟩, |0⟩)`.
pub fn annihilation() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, ZERO, ONE, ZERO)
}

pub fn sigma3() -> Matrix2<Complex64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

/// `H_F = (A/2){c†, c} + (B/2)[c†, c]`.
pub fn single_mode_hamiltonian(p: OscillatorParams) -> Matrix2<Complex64> {
    let c = annihilation();
    let cd = c.adjoint();
    (cd * c + c * cd) * Complex64::new(p.a / 2.0, 0.0) + (cd * c - c * cd) * Complex64::new(p.b / 2.0, 0.0)
}

fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// `(c₁, c₂) = (c ⊗ I, σ₃ ⊗ c)` on the basis `(|11⟩, |10⟩, |01⟩, |00⟩)`.
pub fn two_mode_annihilators() -> (Matrix4<Complex64>, Matrix4<Complex64>) {
    (kron(&annihilation(), &Matrix2::identity()), kron(&sigma3(), &annihilation()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeParams {
    pub mode1: OscillatorParams,
    pub mode2: OscillatorParams,
}

impl TwoModeParams {
    pub fn new(a1: f64, b1: f64, a2: f64, b2: f64) -> crate::Result<Self> {
        Ok(Self { mode1: OscillatorParams::new(a1, b1)?, mode2: OscillatorParams::new(a2, b2)? })
    }

    /// `ω₁ … ω₄ = ½(A₁ + A₂ ± B₁ ± B₂)`, the energies of `|11⟩, |10⟩, |01⟩, |00⟩`.
    pub fn frequencies(&self) -> [f64; 4] {
        let s = self.mode1.a + self.mode2.a;
        let (b1, b2) = (self.mode1.b, self.mode2.b);
        [(s + b1 + b2) / 2.0, (s + b1 - b2) / 2.0, (s - b1 + b2) / 2.0, (s - b1 - b2) / 2.0]
    }

    /// `H¹² = H¹_F + H²_F` assembled from the mode operators.
    pub fn hamiltonian(&self) -> Matrix4<Complex64> {
        let (c1, c2) = two_mode_annihilators();
        let part = |c: &Matrix4<Complex64>, p: OscillatorParams| {
            let cd = c.adjoint();
            (cd * c + c * cd) * Complex64::new(p.a / 2.0, 0.0) + (cd * c - c * cd) * Complex64::new(p.b / 2.0, 0.0)
        };
        part(&c1, self.mode1) + part(&c2, self.mode2)
    }

    /// Diagonal of `U(t) = e^{iH¹²t}`.
    pub fn evolution(&self, t: f64) -> Vector4<Complex64> {
        Vector4::from_iterator(self.frequencies().iter().map(|w| Complex64::from_polar(1.0, w * t)))
    }
}

/// Closed form of `exp(z₁c₁ − z̄₁c₁† + z₂c₂ − z̄₂c₂†)`.
pub fn two_mode_unitary(z1: Complex64, z2: Complex64) -> Matrix4<Complex64> {
    let r = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
    let co = Complex64::new(r.cos(), 0.0);
    let s = sinc(r);
    let (a1, a2) = (z1 * s, z2 * s);
    let (b1, b2) = (z1.conj() * s, z2.conj() * s);
    Matrix4::new(
        co, -b2, -b1, ZERO, //
        a2, co, ZERO, -b1, //
        a1, ZERO, co, b2, //
        ZERO, a1, -a2, co,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FermiFiducial {
    /// `|00⟩`
    Vacuum,
    /// `(|10⟩ + |01⟩)/√2`
    Entangled,
}

impl FermiFiducial {
    pub fn vector(self) -> Vector4<Complex64> {
        match self {
            Self::Vacuum => Vector4::new(ZERO, ZERO, ZERO, ONE),
            Self::Entangled => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                Vector4::new(ZERO, h, h, ZERO)
            }
        }
    }
}

pub fn fermi_two_mode_state(z1: Complex64, z2: Complex64, fiducial: FermiFiducial) -> Vector4<Complex64> {
    two_mode_unitary(z1, z2) * fiducial.vector()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermiFlow {
    /// `U(t) U(z₁, z₂)|fiducial⟩`.
    pub evolved: Vector4<Complex64>,
    /// Flowed parameters read off the evolved state.
    pub predicted: (Complex64, Complex64),
    /// `evolved ≈ global_phase · state(predicted)` when the family is preserved.
    pub global_phase: Complex64,
    /// Certified lower bound on the distance (deficit) to the family.
    pub deficit_lower_bound: f64,
    /// `1 − max_w |⟨w|evolved⟩|²` from a simplex search seeded at `predicted`.
    pub best_deficit: f64,
    pub best_parameters: (Complex64, Complex64),
    pub in_family: bool,
}

fn deficit(w: &[f64], fiducial: FermiFiducial, target: &Vector4<Complex64>) -> f64 {
    let s = fermi_two_mode_state(Complex64::new(w[0], w[1]), Complex64::new(w[2], w[3]), fiducial);
    1.0 - s.dotc(target).norm_sqr()
}

/// Flow of the two-mode family under `U(t) = e^{iH¹²t}`.
///
/// Vacuum fiducial: `z_k(t) = z_k e^{−iB_k t}` with global phase `e^{iω₄t}`.
/// Entangled fiducial: `z_k(t) = z_k e^{−iB̄t}`, `B̄ = (B₁ + B₂)/2`, global phase
/// `e^{i(A₁+A₂)t/2}`, exact only for `B₁ = B₂`.
pub fn fermi_two_mode_flow(
    z1: Complex64,
    z2: Complex64,
    fiducial: FermiFiducial,
    params: TwoModeParams,
    t: f64,
) -> FermiFlow {
    let start = fermi_two_mode_state(z1, z2, fiducial);
    let evolved = params.evolution(t).component_mul(&start);
    let (b1, b2) = (params.mode1.b, params.mode2.b);
    let (predicted, global_phase, bound) = match fiducial {
        FermiFiducial::Vacuum => {
            let w = params.frequencies()[3];
            (
                (z1 * Complex64::from_polar(1.0, -b1 * t), z2 * Complex64::from_polar(1.0, -b2 * t)),
                Complex64::from_polar(1.0, w * t),
                0.0,
            )
        }
        FermiFiducial::Entangled => {
            let rot = Complex64::from_polar(1.0, -(b1 + b2) / 2.0 * t);
            let phase = Complex64::from_polar(1.0, (params.mode1.a + params.mode2.a) / 2.0 * t);
            // Family members have equal |10⟩, |01⟩ amplitudes.
            ((z1 * rot, z2 * rot), phase, (evolved[1] - evolved[2]).norm_sqr() / 2.0)
        }
    };
    let seed = [predicted.0.re, predicted.0.im, predicted.1.re, predicted.1.im];
    let mut best = (seed.to_vec(), deficit(&seed, fiducial, &evolved));
    if best.1 > FAMILY_TOLERANCE {
        for start in [seed, [z1.re, z1.im, z2.re, z2.im]] {
            let m = nelder_mead(|w| deficit(w, fiducial, &evolved), &start, 0.1, 1e-15, 20_000);
            if m.value < best.1 {
                best = (m.point, m.value);
            }
        }
    }
    let best_deficit = best.1.max(0.0);
    FermiFlow {
        evolved,
        predicted,
        global_phase,
        deficit_lower_bound: bound,
        best_deficit,
        best_parameters: (Complex64::new(best.0[0], best.0[1]), Complex64::new(best.0[2], best.0[3])),
        in_family: bound <= FAMILY_TOLERANCE && best_deficit <= FAMILY_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_diagonal_is_frequency_set() {
        let p = TwoModeParams::new(0.7, -0.4, 1.1, 0.9).unwrap();
        let h = p.hamiltonian();
        let w = p.frequencies();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { w[i] } else { 0.0 };
                assert!((h[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn unitary_at_origin_is_identity() {
        assert_eq!(two_mode_unitary(ZERO, ZERO), Matrix4::identity());
    }
}
