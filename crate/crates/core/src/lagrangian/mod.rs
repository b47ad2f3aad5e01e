//! Variational reduction along an immersion `x ↦ ψ(x)`.
//!
//! With `N = ⟨ψ,ψ⟩` the pulled-back quantities are
//! `θ_j = -Im⟨ψ, ∂_jψ⟩/N`, `ω = dθ` stored as `W_jk = ∂_jθ_k - ∂_kθ_j`,
//! and `E = ⟨ψ, Hψ⟩/N`. The reduced field solves `i_Γ ω = -dE`, i.e. `W Γ = dE`.

mod engine;
mod immersions;

pub use engine::{
    cartan_one_form, energy_differential, exterior_derivative, integrate_reduced, lagrangian_two_form,
    lagrangian_two_form_nested, reduced_energy, reduced_field, EngineOptions, Integrator, ReducedField,
    ReducedGeometry, ReducedTrajectory, TwoForm,
};
pub use immersions::{FnImmersion, GaussianCoordinates, GaussianImmersion, RadcliffeImmersion};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::state::StateVector;

/// Smooth map from parameter tuples into nonzero Hilbert-space vectors.
pub trait Immersion: Sync {
    fn param_dim(&self) -> usize;
    fn evaluate(&self, point: &[f64]) -> Result<StateVector>;
    fn label(&self) -> &str {
        "immersion"
    }
}

/// Hermitian operator acting on [`StateVector`]s.
pub trait HamiltonianAction: Sync {
    fn apply(&self, psi: &StateVector) -> Result<StateVector>;
    fn label(&self) -> &str {
        "hamiltonian"
    }
}

/// Dense Hermitian matrix on a finite-dimensional space.
#[derive(Debug, Clone)]
pub struct MatrixHamiltonian {
    matrix: DMatrix<Complex64>,
    label: String,
}

impl MatrixHamiltonian {
    pub fn new(matrix: DMatrix<Complex64>, label: impl Into<String>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(invalid("Hamiltonian matrix must be square and non-empty"));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let defect = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > 1e-12 * scale {
            return Err(invalid(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(Self { matrix, label: label.into() })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

impl HamiltonianAction for MatrixHamiltonian {
    fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.len() != self.matrix.ncols() {
            return Err(invalid(format!("state of length {} for a {}-dim Hamiltonian", psi.len(), self.matrix.ncols())));
        }
        let v = nalgebra::DVector::from_column_slice(&psi.amplitudes);
        let out = &self.matrix * v;
        Ok(StateVector { amplitudes: out.iter().copied().collect(), measure: psi.measure })
    }

    fn label(&self) -> &str {
        &self.label
    }
}
