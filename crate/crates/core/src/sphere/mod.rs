//! Quadrature, real spherical harmonics and differential operators on the
//! unit 2-sphere.

mod calculus;
mod frame;
mod grid;
mod harmonics;
pub mod legendre;

pub use calculus::{
    ambient_gradient, double_divergence, grad_hess, grad_hess_harmonic, GradHess,
    SymmetricTensorField,
};
pub use frame::Frame;
pub use grid::SphereGrid;
pub use harmonics::{
    analyze, analyze_to, apply_operator, integrate, synthesize, GridField, HarmonicField,
    SphereOperator,
};
pub use legendre::{c_theta, c_theta_over_sin, gauss_legendre, legendre_p, legendre_p_dd, legendre_p_dtheta};
