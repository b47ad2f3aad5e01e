//! Reduction of linear Schrödinger evolution to flows on immersed parameter
//! manifolds, with an exact grid solver to score the reductions.
//!
//! Units are `ħ = m = 1`. Scalar-generic code is instantiated for `f32` and
//! `f64`; the aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherent;
pub mod error;
pub mod gaussian;
pub mod grid;
pub mod lagrangian;
pub mod numerics;
pub mod scalar;
pub mod state;

pub use error::{Error, Result};
pub use scalar::Real;
pub use state::StateVector;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type GaussianParams = gaussian::GaussianParams<f64>;
pub type ModelParams = gaussian::ModelParams<f64>;
pub type DarbouxCoords = gaussian::DarbouxCoords<f64>;
pub type LinearizingVars = gaussian::LinearizingVars<f64>;
pub type SquareMatrix = numerics::linalg::SquareMatrix<f64>;
pub type Trajectory = numerics::ode::Trajectory<f64>;
