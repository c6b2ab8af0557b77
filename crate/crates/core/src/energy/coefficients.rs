use std::sync::Arc;

use serde::Serialize;

use crate::embedding::{EmbeddingSolution, SurfaceSpec};
use crate::error::{Error, Result};
use crate::radial::RadialProfile;
use crate::sphere::{c_theta, Frame, SphereGrid, SphereOperator};

/// Where `A` and `A′` are evaluated inside the energy integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileEvaluation {
    /// At the areal radius of each surface point, with the same substitution
    /// rule as the embedding sources.
    #[default]
    Substituted,
    /// At `r = d` for every point (leading order in `1/d`).
    FrozenAtCentre,
}

/// The two sphere integrals multiplying `sin²(σt)` and `σ² cos²(σt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyCoefficients {
    pub e1: f64,
    pub e2: f64,
    pub l_max: usize,
    pub evaluation: ProfileEvaluation,
    /// Which overall constants are left out and must come in through the
    /// `c_factor` of [`assemble_energy`].
    pub amplitude_convention: &'static str,
}

const CONVENTION: &str = "excludes C_l(theta_d)^2 and the mode amplitude^2";

/// ```text
/// E₁ = ∫ ½ [A² Z₂² (7Z₃² + 1) + 2AA′ Z₁ Z₃² (3Z₂² − 1) − N (Δ + 2) N]
/// E₂ = ∫ [A² Z₂² Z₃² − τ Δ(Δ + 2) τ]
/// ```
///
/// The operator terms are exact quadratic forms in the coefficients; the
/// profile terms are integrated on a grid of band limit `2 l_max`.
pub fn energy_coefficients(
    a: &dyn RadialProfile,
    spec: &SurfaceSpec,
    emb: &EmbeddingSolution,
    frame: &Frame,
    evaluation: ProfileEvaluation,
) -> Result<EnergyCoefficients> {
    let l_max = emb.l_max();
    if emb.n_field.l_max() != l_max {
        return Err(Error::BandLimit("tau and N have different band limits".into()));
    }
    let grid = Arc::new(SphereGrid::new((2 * l_max).max(8)));
    let mut i1 = 0.0;
    let mut i2 = 0.0;
    let frozen = match evaluation {
        ProfileEvaluation::FrozenAtCentre => Some(a.eval(spec.d)?),
        ProfileEvaluation::Substituted => None,
    };
    let n_phi = grid.n_phi();
    for i in 0..grid.n_theta() {
        let w = grid.area_weight(i);
        let mut r1 = 0.0;
        let mut r2 = 0.0;
        for j in 0..n_phi {
            let [z1, z2, z3] = frame.coordinates(grid.unit_vector(grid.index(i, j)));
            let p = match frozen {
                Some(p) => p,
                None => a.eval(spec.radius(z1))?,
            };
            let (z2s, z3s) = (z2 * z2, z3 * z3);
            r1 += p.a * p.a * z2s * (7.0 * z3s + 1.0) + 2.0 * p.a * p.da * z1 * z3s * (3.0 * z2s - 1.0);
            r2 += p.a * p.a * z2s * z3s;
        }
        i1 += w * r1;
        i2 += w * r2;
    }
    let nn = emb.n_field.dot(&emb.n_field.apply(SphereOperator::LaplacianPlusTwo));
    let tt = emb.tau.dot(&emb.tau.apply(SphereOperator::LaplacianTimesShifted));
    Ok(EnergyCoefficients {
        e1: 0.5 * (i1 - nn),
        e2: i2 - tt,
        l_max,
        evaluation,
        amplitude_convention: CONVENTION,
    })
}

/// `C_l(θ_d)² · amplitude²`, the overall constant of the assembled energy.
pub fn c_factor(ell: usize, theta_d: f64, amplitude: f64) -> Result<f64> {
    let c = c_theta(ell, theta_d)?;
    Ok(c * c * amplitude * amplitude)
}

/// Energy and its time derivative at one `(t, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyPoint {
    pub t: f64,
    pub d: f64,
    pub energy: f64,
    pub de_dt: f64,
}

/// ```text
/// E    = c_factor/d² · [sin²(σt) E₁ + σ² cos²(σt) E₂]
/// ∂ₜE  = c_factor · σ sin(2σt)/d² · [E₁ − σ² E₂]
/// ```
///
/// The time-derivative formula carries an explicit `1/d²`; the energy is given
/// the same factor so that the two are consistent.
pub fn assemble_energy(coeffs: &EnergyCoefficients, sigma: f64, t: f64, d: f64, c_factor: f64) -> EnergyPoint {
    let (s, c) = (sigma * t).sin_cos();
    let s2 = sigma * sigma;
    let k = c_factor / (d * d);
    EnergyPoint {
        t,
        d,
        energy: k * (s * s * coeffs.e1 + s2 * c * c * coeffs.e2),
        de_dt: k * sigma * (2.0 * sigma * t).sin() * (coeffs.e1 - s2 * coeffs.e2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::embed;
    use crate::radial::ConstantProfile;
    use std::f64::consts::PI;

    fn constant_case(c: f64) -> EnergyCoefficients {
        let spec = SurfaceSpec::new(80.0);
        let emb = embed(&ConstantProfile(c), &spec, 8, &Frame::default()).unwrap();
        energy_coefficients(&ConstantProfile(c), &spec, &emb, &Frame::default(), ProfileEvaluation::Substituted)
            .unwrap()
    }

    #[test]
    fn constant_profile_closed_form() {
        let c = 0.8;
        let e = constant_case(c);
        assert!((e.e1 - 32.0 * PI / 15.0 * c * c).abs() < 1e-12);
        assert!((e.e2 + 4.0 * PI / 3.0 * c * c).abs() < 1e-12);
    }

    #[test]
    fn quadratic_scaling_and_zero() {
        let a = constant_case(0.5);
        let b = constant_case(1.5);
        assert!((b.e1 - 9.0 * a.e1).abs() < 1e-12 * b.e1.abs());
        assert!((b.e2 - 9.0 * a.e2).abs() < 1e-12 * b.e2.abs());
        let z = constant_case(0.0);
        assert_eq!((z.e1, z.e2), (0.0, 0.0));
    }

    #[test]
    fn assembly_limits() {
        let e = EnergyCoefficients {
            e1: 2.0,
            e2: -3.0,
            l_max: 4,
            evaluation: ProfileEvaluation::Substituted,
            amplitude_convention: CONVENTION,
        };
        let sigma = 0.5;
        let p = assemble_energy(&e, sigma, 0.0, 10.0, 9.0);
        assert_eq!(p.energy, 9.0 / 100.0 * sigma * sigma * -3.0);
        assert_eq!(p.de_dt, 0.0);
        let q = assemble_energy(&e, sigma, PI / 2.0 / sigma, 10.0, 9.0);
        assert!(q.de_dt.abs() < 1e-16);
        // Period π/σ.
        for &t in &[0.1, 1.7, 4.0] {
            let a = assemble_energy(&e, sigma, t, 10.0, 9.0).energy;
            let b = assemble_energy(&e, sigma, t + PI / sigma, 10.0, 9.0).energy;
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn time_derivative_matches_finite_difference() {
        let e = EnergyCoefficients {
            e1: 1.7,
            e2: -0.4,
            l_max: 4,
            evaluation: ProfileEvaluation::Substituted,
            amplitude_convention: CONVENTION,
        };
        let (sigma, t, d) = (0.5, 0.3, 100.0);
        let h = 1e-4;
        let f = |t: f64| assemble_energy(&e, sigma, t, d, 9.0).energy;
        let fd = (f(t + h) - f(t - h)) / (2.0 * h);
        let exact = assemble_energy(&e, sigma, t, d, 9.0).de_dt;
        assert!((fd - exact).abs() < 1e-8 * exact.abs());
    }

    #[test]
    fn c_factor_for_quadrupole_on_equator() {
        assert!((c_factor(2, PI / 2.0, 2.0).unwrap() - 36.0).abs() < 1e-13);
        assert!(c_factor(1, 0.3, 1.0).is_err());
    }
}
