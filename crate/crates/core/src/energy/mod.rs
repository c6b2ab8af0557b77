//! Energy of the surfaces: the sphere integrals `E₁`, `E₂`, the assembled
//! `E(t, d)` and `∂ₜE`, the `1/d²` block of the mass density, loop integrals
//! and falloff fits across distance sweeps.

mod coefficients;
mod density;
mod fit;
mod loops;
mod sweep;

pub use coefficients::{
    assemble_energy, c_factor, energy_coefficients, EnergyCoefficients, EnergyPoint, ProfileEvaluation,
};
pub use density::{rho_bracket, rho_terms, RhoTerms};
pub use fit::{fit_decay, fit_powers, DecayFit, PowerFit};
pub use loops::{loop_integral, loop_integral_harmonic, LoopIntegral, LoopSample, LoopSpec};
pub use sweep::{axial_profile_for, energy_sweep, DistanceRow, EnergyReport, SweepSpec, TimeFit};
