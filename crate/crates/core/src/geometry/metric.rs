use serde::Serialize;

use super::{PerturbationKind, PerturbationProfiles};
use crate::error::{Error, Result};
use crate::radial::BackgroundParams;

pub(crate) type Mat3 = [[f64; 3]; 3];

/// Constant-`t` slice metric and its time derivative in `(r, θ, φ)`
/// components, to first order in the perturbation amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceMetric {
    pub g: Mat3,
    pub dg_dt: Mat3,
}

/// `(1 − 2m/r)⁻¹dr² + r²dθ² + r²sin²θ(dφ − q₂dr − q₃dθ)²` to first order in
/// `ε`, with `q_i = ε sin(σt) q̂_i(r, θ)`, and its `t`-derivative.
pub fn spatial_metric(
    bg: &BackgroundParams,
    pert: &PerturbationProfiles,
    t: f64,
    r: f64,
    theta: f64,
    _phi: f64,
) -> Result<SliceMetric> {
    let m = bg.m();
    if !(r > 2.0 * m) {
        return Err(Error::Domain(format!("radius {r} is not outside the horizon")));
    }
    let f = 1.0 - 2.0 * m / r;
    let s2 = theta.sin().powi(2);
    let (amp, damp) = pert.time_factors(t);
    let mut g = [[0.0; 3]; 3];
    let mut dg = [[0.0; 3]; 3];
    g[0][0] = 1.0 / f;
    g[1][1] = r * r;
    g[2][2] = r * r * s2;
    match pert.kind() {
        PerturbationKind::None => {}
        PerturbationKind::Axial => {
            let (q2, q3) = pert.axial_spatial(r, theta)?;
            let w = -r * r * s2;
            for (i, q) in [(0usize, q2), (1, q3)] {
                g[i][2] = w * amp * q;
                g[2][i] = g[i][2];
                dg[i][2] = w * damp * q;
                dg[2][i] = dg[i][2];
            }
        }
        PerturbationKind::Polar => {
            let h = pert.polar_spatial(r, theta)?;
            let base = [1.0 / f, r * r, r * r * s2];
            for i in 0..3 {
                g[i][i] = base[i] * (1.0 + amp * h[i]);
                dg[i][i] = base[i] * damp * h[i];
            }
        }
    }
    Ok(SliceMetric { g, dg_dt: dg })
}

/// Cartesian convention: `y₁ = r sinθ sinφ`, `y₂ = r sinθ cosφ`, `y₃ = r cosθ`.
pub fn to_cartesian(r: f64, theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [r * st * sp, r * st * cp, r * ct]
}

/// Inverse of [`to_cartesian`], `φ ∈ (−π, π]`.
pub fn from_cartesian(y: [f64; 3]) -> (f64, f64, f64) {
    let rho = y[0].hypot(y[1]);
    let r = rho.hypot(y[2]);
    (r, rho.atan2(y[2]), y[0].atan2(y[1]))
}

/// Slice metric and its time derivative in the Cartesian `y` components,
/// with the perturbation kept to all orders in `ε` (the quadratic terms of
/// `(dφ − q₂dr − q₃dθ)²` included).
pub(crate) fn cartesian_metric(
    bg: &BackgroundParams,
    pert: &PerturbationProfiles,
    t: f64,
    y: [f64; 3],
) -> Result<(Mat3, Mat3)> {
    let m = bg.m();
    let rho2 = y[0] * y[0] + y[1] * y[1];
    let rho = rho2.sqrt();
    let r = (rho2 + y[2] * y[2]).sqrt();
    if !(r > 2.0 * m) {
        return Err(Error::Domain(format!("radius {r} is not outside the horizon")));
    }
    let rhat = [y[0] / r, y[1] / r, y[2] / r];
    let k = 2.0 * m / (r - 2.0 * m);
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = if i == j { 1.0 } else { 0.0 } + k * rhat[i] * rhat[j];
        }
    }
    let mut dg = [[0.0; 3]; 3];
    if pert.kind() == PerturbationKind::None {
        return Ok((g, dg));
    }
    let theta = rho.atan2(y[2]);
    let (amp, damp) = pert.time_factors(t);
    let (st, ct) = (rho / r, y[2] / r);
    // Unit vectors θ̂ and φ̂; φ̂ = ρ∇φ for φ = atan2(y₁, y₂).
    let that = if rho > 0.0 {
        [ct * y[0] / rho, ct * y[1] / rho, -st]
    } else {
        [1.0, 0.0, 0.0]
    };
    match pert.kind() {
        PerturbationKind::None => unreachable!(),
        PerturbationKind::Axial => {
            let (q2, q3) = pert.axial_spatial(r, theta)?;
            // ω = q₂ dr + q₃ dθ per unit amplitude, β = r² sin²θ dφ.
            let om: [f64; 3] = [0, 1, 2].map(|i| q2 * rhat[i] + q3 * that[i] / r);
            let beta = [y[1], -y[0], 0.0];
            for i in 0..3 {
                for j in 0..3 {
                    let cross = beta[i] * om[j] + om[i] * beta[j];
                    g[i][j] += -amp * cross + rho2 * amp * amp * om[i] * om[j];
                    dg[i][j] = -damp * cross + rho2 * 2.0 * amp * damp * om[i] * om[j];
                }
            }
        }
        PerturbationKind::Polar => {
            let h = pert.polar_spatial(r, theta)?;
            let phat = if rho > 0.0 { [y[1] / rho, -y[0] / rho, 0.0] } else { [0.0, 1.0, 0.0] };
            let dirs = [(rhat, (1.0 + k) * h[0]), (that, h[1]), (phat, h[2])];
            for (e, w) in dirs {
                for i in 0..3 {
                    for j in 0..3 {
                        g[i][j] += amp * w * e[i] * e[j];
                        dg[i][j] += damp * w * e[i] * e[j];
                    }
                }
            }
        }
    }
    Ok((g, dg))
}

pub(crate) fn det3(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub(crate) fn inv3(a: &Mat3) -> Result<Mat3> {
    let det = det3(a);
    if !(det.abs() > 0.0) || !det.is_finite() {
        return Err(Error::Degenerate("singular slice metric".into()));
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (i1, i2) = ((j + 1) % 3, (j + 2) % 3);
            let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
            out[i][j] = (a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]) / det;
        }
    }
    Ok(out)
}
