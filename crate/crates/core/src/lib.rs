//! Perturbative quasi-local energy of unit spheres pushed toward null
//! infinity of perturbed Schwarzschild spacetimes.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`sphere`]: quadrature, real spherical harmonics and covariant
//!   derivatives on the unit sphere.
//! * [`radial`]: tortoise coordinate, Regge-Wheeler and Zerilli potentials,
//!   the radial wave integrator and the `A(r)` profile.
//! * [`embedding`]: sources and spectral solve of the linearized optimal
//!   embedding equations for `τ` and `N`.
//! * [`energy`]: energy coefficients, assembly, mass-density bracket, loop
//!   integrals and falloff fits.
//! * [`geometry`]: induced metric, Gauss and mean curvature of the surfaces,
//!   and the Hawking mass-aspect line.
//!
//! Geometrized units are used throughout (`G = c = 1`).

pub mod embedding;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod radial;
pub mod sphere;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/sphere.md")]
    pub struct Sphere;
    #[doc = include_str!("../../../book/src/radial.md")]
    pub struct Radial;
    #[doc = include_str!("../../../book/src/energy.md")]
    pub struct Energy;
    #[doc = include_str!("../../../book/src/geometry.md")]
    pub struct Geometry;
}
