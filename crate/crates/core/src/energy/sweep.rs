use rayon::prelude::*;
use serde::Serialize;

use super::coefficients::{assemble_energy, energy_coefficients, EnergyPoint, ProfileEvaluation};
use super::fit::{fit_decay, DecayFit};
use crate::embedding::{embed, Substitution, SurfaceSpec};
use crate::error::{Error, Result};
use crate::radial::{
    a_profile, integrate_wave, AProfile, AxialMode, BackgroundParams, Boundary, IntegrationOptions, Mode,
    RadialProfile,
};
use crate::sphere::Frame;

/// Grid of surfaces to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub ds: Vec<f64>,
    pub ts: Vec<f64>,
    pub theta_d: f64,
    pub phi_d: f64,
    pub substitution: Substitution,
    pub evaluation: ProfileEvaluation,
    pub l_max: usize,
    pub frame: Frame,
}

impl SweepSpec {
    pub fn new(ds: Vec<f64>, ts: Vec<f64>, l_max: usize) -> Self {
        Self {
            ds,
            ts,
            theta_d: std::f64::consts::FRAC_PI_2,
            phi_d: 0.0,
            substitution: Substitution::Exact,
            evaluation: ProfileEvaluation::Substituted,
            l_max,
            frame: Frame::default(),
        }
    }

    fn surface(&self, d: f64) -> SurfaceSpec {
        SurfaceSpec::new(d)
            .with_direction(self.theta_d, self.phi_d)
            .with_substitution(self.substitution)
    }
}

/// Energy coefficients and solve diagnostics at one distance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DistanceRow {
    pub d: f64,
    pub e1: f64,
    pub e2: f64,
    pub relative_kernel_residual: f64,
    pub equation_residual: f64,
}

/// Falloff fit of `E(t, ·)` at one time.
#[derive(Debug, Clone, Serialize)]
pub struct TimeFit {
    pub t: f64,
    pub fit: Option<DecayFit>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub sigma: f64,
    pub c_factor: f64,
    pub l_max: usize,
    pub distances: Vec<DistanceRow>,
    /// Row-major in `(d, t)`, in the order of the sweep inputs.
    pub table: Vec<EnergyPoint>,
    pub fits: Vec<TimeFit>,
    pub warnings: Vec<String>,
}

/// Runs embed, energy coefficients and assembly for every `(d, t)`.
/// Distances are processed in parallel on the current rayon pool; results
/// are collected in input order.
pub fn energy_sweep(
    profile: &dyn RadialProfile,
    sigma: f64,
    c_factor: f64,
    spec: &SweepSpec,
    bg: &BackgroundParams,
) -> Result<EnergyReport> {
    if spec.ds.is_empty() || spec.ts.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one d and one t".into()));
    }
    let per_d: Vec<(DistanceRow, Vec<String>)> = spec
        .ds
        .par_iter()
        .map(|&d| {
            let surface = spec.surface(d);
            surface.validate(bg)?;
            let emb = embed(profile, &surface, spec.l_max, &spec.frame)?;
            let c = energy_coefficients(profile, &surface, &emb, &spec.frame, spec.evaluation)?;
            let warnings = emb.warnings.iter().map(|w| format!("d = {d}: {w}")).collect();
            Ok((
                DistanceRow {
                    d,
                    e1: c.e1,
                    e2: c.e2,
                    relative_kernel_residual: emb.relative_kernel_residual(),
                    equation_residual: emb.equation_residual,
                },
                warnings,
            ))
        })
        .collect::<Result<_>>()?;
    let mut table = Vec::with_capacity(spec.ds.len() * spec.ts.len());
    let mut warnings = Vec::new();
    let mut distances = Vec::with_capacity(per_d.len());
    for (row, w) in per_d {
        let coeffs = super::EnergyCoefficients {
            e1: row.e1,
            e2: row.e2,
            l_max: spec.l_max,
            evaluation: spec.evaluation,
            amplitude_convention: "",
        };
        for &t in &spec.ts {
            table.push(assemble_energy(&coeffs, sigma, t, row.d, c_factor));
        }
        distances.push(row);
        warnings.extend(w);
    }
    let nt = spec.ts.len();
    let fits = spec
        .ts
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let samples: Vec<(f64, f64)> = (0..spec.ds.len()).map(|i| (spec.ds[i], table[i * nt + k].energy)).collect();
            match fit_decay(&samples) {
                Ok(f) => TimeFit { t, fit: Some(f), note: None },
                Err(e) => TimeFit {
                    t,
                    fit: None,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(EnergyReport {
        sigma,
        c_factor,
        l_max: spec.l_max,
        distances,
        table,
        fits,
        warnings,
    })
}

/// Integrates an axial mode from free-wave data far out and returns the
/// `A(r)` profile covering every surface with centre distance in `[d_lo, d_hi]`.
pub fn axial_profile_for(
    bg: &BackgroundParams,
    mode: &AxialMode,
    phase: f64,
    d_range: (f64, f64),
    opts: &IntegrationOptions,
) -> Result<AProfile> {
    let (lo, hi) = d_range;
    let r_min = (lo - 1.5).max(bg.horizon() + 1e-6);
    let r_max = hi + 1.5;
    let sol = integrate_wave(
        bg,
        &Mode::Axial(*mode),
        Boundary::Asymptotic {
            amplitude: 1.0,
            phase,
            r_star_start: None,
        },
        (r_min, r_max),
        opts,
    )?;
    a_profile(&sol, bg, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::ConstantProfile;
    use std::f64::consts::PI;

    #[test]
    fn constant_profile_sweep_is_exact_inverse_square() {
        let bg = BackgroundParams::new(1.0).unwrap();
        let spec = SweepSpec::new(vec![50.0, 100.0, 200.0, 400.0], vec![0.0, 0.7], 8);
        let c = 0.3;
        let r = energy_sweep(&ConstantProfile(c), 0.5, 9.0, &spec, &bg).unwrap();
        assert_eq!(r.table.len(), 8);
        assert_eq!(r.table[2].d, 100.0);
        assert_eq!(r.table[3].t, 0.7);
        for row in &r.distances {
            assert!((row.e1 - 32.0 * PI / 15.0 * c * c).abs() < 1e-12);
        }
        for f in &r.fits {
            let f = f.fit.unwrap();
            assert!(f.c1.abs() < 1e-10 * f.c2.abs());
        }
    }

    #[test]
    fn order_is_independent_of_pool_size() {
        let bg = BackgroundParams::new(1.0).unwrap();
        let spec = SweepSpec::new(vec![30.0, 60.0, 120.0, 240.0, 480.0], vec![0.2], 6);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| energy_sweep(&ConstantProfile(1.0), 0.5, 1.0, &spec, &bg).unwrap())
        };
        let a = run(1);
        let b = run(4);
        let ea: Vec<f64> = a.table.iter().map(|p| p.energy).collect();
        let eb: Vec<f64> = b.table.iter().map(|p| p.energy).collect();
        assert_eq!(ea, eb);
    }

    #[test]
    fn surfaces_inside_horizon_are_rejected() {
        let bg = BackgroundParams::new(1.0).unwrap();
        let spec = SweepSpec::new(vec![2.5], vec![0.0], 4);
        assert!(energy_sweep(&ConstantProfile(1.0), 0.5, 1.0, &spec, &bg).is_err());
    }
}
