//! Integrators, quadrature, dense linear algebra and a small simplex optimizer.

pub mod linalg;
pub mod ode;
pub mod optimize;
pub mod quadrature;
