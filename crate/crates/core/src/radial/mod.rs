//! Radial problem: tortoise coordinate, Regge-Wheeler and Zerilli potentials,
//! wave integration and the `A(r)` profile.

mod integrate;
mod potential;
mod profile;
mod tortoise;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use integrate::{integrate_wave, Boundary, IntegrationOptions, RadialSolution, StepControl};
pub use potential::{potential_axial, potential_polar};
pub use profile::{a_profile, AProfile, ConstantProfile, ProfileValues, RadialProfile};
pub use tortoise::{inverse_tortoise, tortoise};

/// Schwarzschild background. `m = 0` is flat space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackgroundParams {
    m: f64,
}

impl BackgroundParams {
    pub fn new(m: f64) -> Result<Self> {
        if !(m >= 0.0) || !m.is_finite() {
            return Err(Error::InvalidArgument(format!("mass {m} must be finite and >= 0")));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn horizon(&self) -> f64 {
        2.0 * self.m
    }
}

/// Odd-parity mode of frequency `σ` with separation constant `μ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxialMode {
    ell: usize,
    mu_sq: f64,
    sigma: f64,
    amplitude: f64,
}

impl AxialMode {
    /// Mode with `μ² = (ℓ − 1)(ℓ + 2)`, so that `μ² + 2 = ℓ(ℓ + 1)`, and unit amplitude.
    pub fn new(ell: usize, sigma: f64) -> Result<Self> {
        if ell < 2 {
            return Err(Error::InvalidArgument(format!("multipole {ell} must be >= 2")));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("frequency {sigma} must be > 0")));
        }
        Ok(Self {
            ell,
            mu_sq: ((ell - 1) * (ell + 2)) as f64,
            sigma,
            amplitude: 1.0,
        })
    }

    pub fn with_mu_sq(mut self, mu_sq: f64) -> Result<Self> {
        if !(mu_sq > 0.0) {
            return Err(Error::InvalidArgument(format!("mu^2 = {mu_sq} must be > 0")));
        }
        self.mu_sq = mu_sq;
        Ok(self)
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn mu_sq(&self) -> f64 {
        self.mu_sq
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
}

/// Even-parity mode of frequency `σ` with separation constant `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarMode {
    n: f64,
    sigma: f64,
}

impl PolarMode {
    pub fn new(n: f64, sigma: f64) -> Result<Self> {
        if !(n > 0.0) {
            return Err(Error::InvalidArgument(format!("separation constant {n} must be > 0")));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("frequency {sigma} must be > 0")));
        }
        Ok(Self { n, sigma })
    }

    /// `n = (ℓ − 1)(ℓ + 2)/2`.
    pub fn from_ell(ell: usize, sigma: f64) -> Result<Self> {
        if ell < 2 {
            return Err(Error::InvalidArgument(format!("multipole {ell} must be >= 2")));
        }
        Self::new(((ell - 1) * (ell + 2)) as f64 / 2.0, sigma)
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Axial,
    Polar,
}

/// Either perturbation parity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Axial(AxialMode),
    Polar(PolarMode),
}

impl Mode {
    pub fn kind(&self) -> ModeKind {
        match self {
            Mode::Axial(_) => ModeKind::Axial,
            Mode::Polar(_) => ModeKind::Polar,
        }
    }

    pub fn sigma(&self) -> f64 {
        match self {
            Mode::Axial(a) => a.sigma(),
            Mode::Polar(p) => p.sigma(),
        }
    }

    /// Potential at `r`.
    pub fn potential(&self, r: f64, bg: &BackgroundParams) -> Result<f64> {
        match self {
            Mode::Axial(a) => potential_axial(r, bg, a),
            Mode::Polar(p) => potential_polar(r, bg, p),
        }
    }

    /// `(V, dV/dr)` given `r` and `r − 2m` separately.
    pub(crate) fn potential_split(&self, r: f64, r_minus_2m: f64, m: f64) -> (f64, f64) {
        match self {
            Mode::Axial(a) => potential::axial_split(r, r_minus_2m, m, a.mu_sq()),
            Mode::Polar(p) => potential::polar_split(r, r_minus_2m, m, p.n()),
        }
    }
}

impl From<AxialMode> for Mode {
    fn from(m: AxialMode) -> Self {
        Mode::Axial(m)
    }
}

impl From<PolarMode> for Mode {
    fn from(m: PolarMode) -> Self {
        Mode::Polar(m)
    }
}
