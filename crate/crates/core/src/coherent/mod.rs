//! Finite-dimensional coherent-state families and the flows they inherit:
//! spin-½ (Radcliffe), bosonic and f-deformed oscillators in a truncated Fock
//! space, one- and two-mode Fermi oscillators, cat states, a Grassmann
//! super-reduction, and a non-Markovian qubit channel.

pub mod fermi;
pub mod fock;
pub mod gkls;
pub mod grassmann;
pub mod spin;

pub use fermi::{FermiFiducial, FermiFlow, TwoModeParams};
pub use fock::{FamilyFit, FockState, OscillatorParams, Parity};
pub use gkls::BlochState;
pub use grassmann::GrassmannElement;
pub use spin::{DensityMatrix, ProbabilityVector, SpinCoherentPoint};
