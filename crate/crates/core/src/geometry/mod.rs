//! Direct geometry of the surfaces in the perturbed slice: induced metric,
//! Gauss curvature, mean curvature norm and the Hawking mass-aspect line.
//!
//! The slice metric is evaluated in Cartesian components
//! `y = (r sinθ sinφ, r sinθ cosφ, r cosθ)` and pulled back to the surface
//! `y = D + n̂` through local gnomonic charts of the parameter sphere.

mod metric;
mod surface;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use metric::{from_cartesian, spatial_metric, to_cartesian, SliceMetric};
pub use surface::{
    geometry_sweep, linearized_hawking_line, surface_geometry, surface_geometry_in, GeometryPoint, GeometryReport,
    GeometryResolution, GeometrySweep, GeometrySweepRow, LinearizedLine,
};

use crate::error::{Error, Result};
use crate::radial::{AxialMode, BackgroundParams, ModeKind, RadialSolution};
use crate::sphere::c_theta_over_sin;

/// Profile function `(r, θ) ↦ value`.
pub type ProfileFn = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

/// Largest `|ε|` accepted without an `epsilon-above-default` flag.
pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Flag raised when `q₂` was not supplied.
pub const INCOMPLETE_FLAG: &str = "incomplete-perturbation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationKind {
    None,
    Axial,
    Polar,
}

/// Metric perturbation with time factor `ε sin(σt)`.
///
/// Axial: `q₂`, `q₃` enter `(dφ − q₂dr − q₃dθ)²`. Polar: relative changes
/// `(h_rr, h_θθ, h_φφ)` of the diagonal components, user supplied.
#[derive(Clone)]
pub struct PerturbationProfiles {
    kind: PerturbationKind,
    q2: Option<ProfileFn>,
    q3: Option<ProfileFn>,
    polar: Option<[ProfileFn; 3]>,
    sigma: f64,
    epsilon: f64,
    flags: Vec<String>,
}

impl fmt::Debug for PerturbationProfiles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerturbationProfiles")
            .field("kind", &self.kind)
            .field("has_q2", &self.q2.is_some())
            .field("sigma", &self.sigma)
            .field("epsilon", &self.epsilon)
            .field("flags", &self.flags)
            .finish()
    }
}

impl PerturbationProfiles {
    pub fn none() -> Self {
        Self {
            kind: PerturbationKind::None,
            q2: None,
            q3: None,
            polar: None,
            sigma: 0.0,
            epsilon: 0.0,
            flags: Vec::new(),
        }
    }

    /// Axial perturbation from spatial profiles. A missing `q₂` is taken as
    /// zero and flagged.
    pub fn axial(q2: Option<ProfileFn>, q3: ProfileFn, sigma: f64, epsilon: f64) -> Self {
        let mut p = Self {
            kind: PerturbationKind::Axial,
            q2,
            q3: Some(q3),
            polar: None,
            sigma,
            epsilon,
            flags: Vec::new(),
        };
        p.refresh_flags();
        p
    }

    pub fn polar(h: [ProfileFn; 3], sigma: f64, epsilon: f64) -> Self {
        let mut p = Self {
            kind: PerturbationKind::Polar,
            q2: None,
            q3: None,
            polar: Some(h),
            sigma,
            epsilon,
            flags: Vec::new(),
        };
        p.refresh_flags();
        p
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self.refresh_flags();
        self
    }

    fn refresh_flags(&mut self) {
        self.flags.clear();
        if self.kind == PerturbationKind::Axial && self.q2.is_none() {
            self.flags.push(INCOMPLETE_FLAG.into());
        }
        if self.epsilon.abs() > DEFAULT_EPSILON {
            self.flags.push("epsilon-above-default".into());
        }
    }

    pub fn kind(&self) -> PerturbationKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn flags(&self) -> &[String] {
        &self.flags
    }

    /// `(ε sin σt, ε σ cos σt)`.
    pub fn time_factors(&self, t: f64) -> (f64, f64) {
        if self.kind == PerturbationKind::None {
            return (0.0, 0.0);
        }
        let (s, c) = (self.sigma * t).sin_cos();
        (self.epsilon * s, self.epsilon * self.sigma * c)
    }

    /// Spatial parts of `(q₂, q₃)` per unit time factor.
    pub fn axial_spatial(&self, r: f64, theta: f64) -> Result<(f64, f64)> {
        let q2 = match &self.q2 {
            Some(f) => f(r, theta)?,
            None => 0.0,
        };
        let q3 = match &self.q3 {
            Some(f) => f(r, theta)?,
            None => 0.0,
        };
        Ok((q2, q3))
    }

    /// Spatial parts of `(h_rr, h_θθ, h_φφ)` per unit time factor.
    pub fn polar_spatial(&self, r: f64, theta: f64) -> Result<[f64; 3]> {
        match &self.polar {
            Some(h) => Ok([h[0](r, theta)?, h[1](r, theta)?, h[2](r, theta)?]),
            None => Ok([0.0; 3]),
        }
    }

    /// Full axial `q₃(t, r, θ)`, time factor included.
    pub fn q3(&self, t: f64, r: f64, theta: f64) -> Result<f64> {
        Ok(self.time_factors(t).0 * self.axial_spatial(r, theta)?.1)
    }
}

/// Spatial part of `q₃`:
/// `(C_ℓ(θ)/sinθ)·(r² − 2mr)/(σ²r⁴)·d(rZ)/dr` with `d(rZ)/dr = Z + r dZ/dr`.
pub fn q3_spatial(ell: usize, sigma: f64, m: f64, r: f64, theta: f64, z: f64, dz_dr: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma = {sigma} must be positive")));
    }
    let radial = r * r - 2.0 * m * r;
    if radial == 0.0 {
        return Ok(0.0);
    }
    Ok(c_theta_over_sin(ell, theta)? * radial / (sigma * sigma * r.powi(4)) * (z + r * dz_dr))
}

/// Axial perturbation with `q₃` assembled from a Regge-Wheeler solution.
/// `q₂` is not computed; without an override it is zero and every report
/// carries the `incomplete-perturbation` flag.
pub fn axial_preset(
    bg: &BackgroundParams,
    mode: &AxialMode,
    sol: &RadialSolution,
    q2_override: Option<ProfileFn>,
    epsilon: f64,
) -> Result<PerturbationProfiles> {
    if sol.kind() != ModeKind::Axial {
        return Err(Error::InvalidArgument("axial preset needs an axial solution".into()));
    }
    if sol.background() != bg {
        return Err(Error::InvalidArgument("background differs from the solution's".into()));
    }
    let sol = Arc::new(sol.clone());
    let (ell, sigma, m, amp) = (mode.ell(), mode.sigma(), bg.m(), mode.amplitude());
    let q3: ProfileFn = Arc::new(move |r, theta| {
        let (z, dz_star) = sol.eval_r(r)?;
        let f = 1.0 - 2.0 * m / r;
        Ok(amp * q3_spatial(ell, sigma, m, r, theta, z, dz_star / f)?)
    });
    Ok(PerturbationProfiles::axial(q2_override, q3, sigma, epsilon))
}
