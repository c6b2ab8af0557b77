//! The radial profile `A(r) = (r² − 2mr)/(σ² r³) · d(rZ)/dr` of the axial
//! perturbation and its first two `r`-derivatives.
//!
//! Write `f = 1 − 2m/r`, `λ = μ² + 2`, `Z_* = dZ/dr*`. Using
//! `dr*/dr = 1/f` and the Regge-Wheeler equation
//! `dZ_*/dr = W Z` with `W = λ/r² − 6m/r³ − σ²/f`:
//!
//! ```text
//! σ² A   = f Z / r + Z_*
//! σ² A'  = α Z + Z_* / r,                 α  = (λ − 1)/r² − 2m/r³ − σ²/f
//! σ² A'' = (α' + W/r) Z + (α/f − 1/r²) Z_*, α' = −2(λ − 1)/r³ + 6m/r⁴ + 2mσ²/(r² f²)
//! ```

use std::sync::Arc;

use serde::Serialize;

use super::{tortoise, AxialMode, BackgroundParams, ModeKind, RadialSolution};
use crate::error::{Error, Result};

/// `A`, `A′`, `A″` at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileValues {
    pub a: f64,
    pub da: f64,
    pub dda: f64,
}

/// A radial profile usable as the `A(r)` input of the embedding sources.
pub trait RadialProfile: Send + Sync {
    fn eval(&self, r: f64) -> Result<ProfileValues>;

    /// Radii at which [`RadialProfile::eval`] succeeds.
    fn r_range(&self) -> (f64, f64);
}

/// Constant `A = a`, `A′ = A″ = 0`, useful for closed-form checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantProfile(pub f64);

impl RadialProfile for ConstantProfile {
    fn eval(&self, _r: f64) -> Result<ProfileValues> {
        Ok(ProfileValues {
            a: self.0,
            da: 0.0,
            dda: 0.0,
        })
    }

    fn r_range(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// `A(r)` evaluated from the dense output of an axial solution.
#[derive(Debug, Clone)]
pub struct AProfile {
    sol: Arc<RadialSolution>,
    m: f64,
    lambda: f64,
    sigma_sq: f64,
}

/// Builds the `A(r)` evaluator for an axial solution.
pub fn a_profile(sol: &RadialSolution, bg: &BackgroundParams, mode: &AxialMode) -> Result<AProfile> {
    if sol.kind() != ModeKind::Axial {
        return Err(Error::InvalidArgument("A(r) is defined for axial solutions only".into()));
    }
    if sol.background() != bg {
        return Err(Error::InvalidArgument("background differs from the solution's".into()));
    }
    if sol.mode().sigma() != mode.sigma() {
        return Err(Error::InvalidArgument("mode frequency differs from the solution's".into()));
    }
    if let super::Mode::Axial(a) = sol.mode() {
        if a.mu_sq() != mode.mu_sq() {
            return Err(Error::InvalidArgument("mode mu^2 differs from the solution's".into()));
        }
    }
    Ok(AProfile {
        sol: Arc::new(sol.clone()),
        m: bg.m(),
        lambda: mode.mu_sq() + 2.0,
        sigma_sq: mode.sigma() * mode.sigma(),
    })
}

impl AProfile {
    pub fn solution(&self) -> &RadialSolution {
        &self.sol
    }
}

impl RadialProfile for AProfile {
    fn eval(&self, r: f64) -> Result<ProfileValues> {
        let (lo, hi) = self.r_range();
        let slack = 1e-12 * hi;
        if !(r >= lo - slack && r <= hi + slack) {
            return Err(Error::Coverage {
                what: "A(r) profile",
                value: r,
                lo,
                hi,
            });
        }
        let bg = self.sol.background();
        let (z, zs) = self.sol.eval_r_star(tortoise(r.clamp(lo, hi), bg)?)?;
        let m = self.m;
        let (l, s2) = (self.lambda, self.sigma_sq);
        let f = (r - 2.0 * m) / r;
        let (r2, r3) = (r * r, r * r * r);
        let w = l / r2 - 6.0 * m / r3 - s2 / f;
        let alpha = (l - 1.0) / r2 - 2.0 * m / r3 - s2 / f;
        let dalpha = -2.0 * (l - 1.0) / r3 + 6.0 * m / (r3 * r) + 2.0 * m * s2 / (r2 * f * f);
        Ok(ProfileValues {
            a: (f * z / r + zs) / s2,
            da: (alpha * z + zs / r) / s2,
            dda: ((dalpha + w / r) * z + (alpha / f - 1.0 / r2) * zs) / s2,
        })
    }

    fn r_range(&self) -> (f64, f64) {
        self.sol.r_range()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{integrate_wave, Boundary, IntegrationOptions, Mode};

    fn axial_solution(m: f64, sigma: f64, range: (f64, f64), boundary: Boundary) -> (RadialSolution, AxialMode) {
        let bg = BackgroundParams::new(m).unwrap();
        let mode = AxialMode::new(2, sigma).unwrap();
        let opts = IntegrationOptions {
            rtol: 1e-12,
            atol: 1e-14,
            ..Default::default()
        };
        (integrate_wave(&bg, &Mode::Axial(mode), boundary, range, &opts).unwrap(), mode)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let (sol, mode) = axial_solution(
            1.0,
            0.5,
            (10.0, 100.0),
            Boundary::Asymptotic {
                amplitude: 1.0,
                phase: 0.3,
                r_star_start: None,
            },
        );
        let bg = BackgroundParams::new(1.0).unwrap();
        let a = a_profile(&sol, &bg, &mode).unwrap();
        let h = 1e-4;
        let r = 50.0;
        let p = a.eval(r).unwrap();
        let (pp, pm) = (a.eval(r + h).unwrap(), a.eval(r - h).unwrap());
        let fd1 = (pp.a - pm.a) / (2.0 * h);
        let fd2 = (pp.da - pm.da) / (2.0 * h);
        assert!((p.da - fd1).abs() <= 1e-6 * p.da.abs(), "{} vs {fd1}", p.da);
        assert!((p.dda - fd2).abs() <= 1e-6 * p.dda.abs(), "{} vs {fd2}", p.dda);
    }

    #[test]
    fn finite_difference_error_is_second_order() {
        let (sol, mode) = axial_solution(
            1.0,
            0.5,
            (10.0, 100.0),
            Boundary::Asymptotic {
                amplitude: 1.0,
                phase: 0.0,
                r_star_start: None,
            },
        );
        let a = a_profile(&sol, &BackgroundParams::new(1.0).unwrap(), &mode).unwrap();
        let r = 37.0;
        let exact = a.eval(r).unwrap().da;
        let err = |h: f64| ((a.eval(r + h).unwrap().a - a.eval(r - h).unwrap().a) / (2.0 * h) - exact).abs();
        let ratio = err(0.2) / err(0.1);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn flat_space_closed_form() {
        // Z = x j₂(x) with σ = 1, so A = Z/r + Z′.
        let z = |x: f64| {
            let (s, c) = x.sin_cos();
            (3.0 / (x * x) - 1.0) * s - 3.0 * c / x
        };
        let dz = |x: f64| {
            let (s, c) = x.sin_cos();
            -6.0 / x.powi(3) * s + (3.0 / (x * x) - 1.0) * c + 3.0 * c / (x * x) + 3.0 * s / x
        };
        let (sol, mode) = axial_solution(
            0.0,
            1.0,
            (1.0, 60.0),
            Boundary::Initial {
                r_star: 1.0,
                z: z(1.0),
                dz: dz(1.0),
            },
        );
        let a = a_profile(&sol, &BackgroundParams::new(0.0).unwrap(), &mode).unwrap();
        for &r in &[1.5, 4.0, 17.3, 55.0] {
            let zz = z(r);
            let z1 = dz(r);
            let z2 = (6.0 / (r * r) - 1.0) * zz;
            let z3 = -12.0 / r.powi(3) * zz + (6.0 / (r * r) - 1.0) * z1;
            let ea = zz / r + z1;
            let eda = z1 / r - zz / (r * r) + z2;
            let edda = z2 / r - 2.0 * z1 / (r * r) + 2.0 * zz / r.powi(3) + z3;
            let p = a.eval(r).unwrap();
            assert!((p.a - ea).abs() < 1e-8, "A at {r}");
            assert!((p.da - eda).abs() < 1e-8, "A' at {r}");
            assert!((p.dda - edda).abs() < 1e-8, "A'' at {r}");
        }
    }

    #[test]
    fn horizon_limit() {
        let bg = BackgroundParams::new(1.0).unwrap();
        let r_min = 2.0 + 1e-9;
        let (sol, mode) = axial_solution(
            1.0,
            0.5,
            (r_min, 30.0),
            Boundary::Initial {
                r_star: 10.0,
                z: 1.0,
                dz: 0.2,
            },
        );
        let a = a_profile(&sol, &bg, &mode).unwrap();
        let (_, zs) = sol.eval_r(r_min).unwrap();
        let p = a.eval(r_min).unwrap();
        assert!((p.a - zs / 0.25).abs() < 1e-7);
    }

    #[test]
    fn rejects_polar_and_out_of_range() {
        let bg = BackgroundParams::new(1.0).unwrap();
        let polar = crate::radial::PolarMode::from_ell(2, 0.5).unwrap();
        let sol = integrate_wave(
            &bg,
            &Mode::Polar(polar),
            Boundary::Initial {
                r_star: 10.0,
                z: 1.0,
                dz: 0.0,
            },
            (5.0, 20.0),
            &IntegrationOptions::default(),
        )
        .unwrap();
        let ax = AxialMode::new(2, 0.5).unwrap();
        assert!(a_profile(&sol, &bg, &ax).is_err());
        let (sol, mode) = axial_solution(
            1.0,
            0.5,
            (5.0, 20.0),
            Boundary::Initial {
                r_star: 10.0,
                z: 1.0,
                dz: 0.0,
            },
        );
        let a = a_profile(&sol, &bg, &mode).unwrap();
        assert!(matches!(a.eval(25.0), Err(Error::Coverage { .. })));
        assert_eq!(ConstantProfile(2.0).eval(1e9).unwrap().a, 2.0);
    }
}
