use crate::error::{Error, Result};

use super::{AxialMode, BackgroundParams, PolarMode};

fn check_radius(r: f64, m: f64) -> Result<()> {
    if r < 2.0 * m || r <= 0.0 || !r.is_finite() {
        return Err(Error::Domain(format!(
            "radius {r} is inside the horizon at 2m = {}",
            2.0 * m
        )));
    }
    Ok(())
}

/// Regge-Wheeler potential `V⁽⁻⁾ = (r² − 2mr)/r⁵ · [(μ² + 2) r − 6m]`.
pub fn potential_axial(r: f64, bg: &BackgroundParams, mode: &AxialMode) -> Result<f64> {
    check_radius(r, bg.m())?;
    Ok(axial_split(r, r - 2.0 * bg.m(), bg.m(), mode.mu_sq()).0)
}

/// Zerilli potential
/// `V⁽⁺⁾ = 2(r² − 2mr)/(r⁵ (nr + 3m)²) · [n²(n+1) r³ + 3mn² r² + 9m²n r + 9m³]`.
pub fn potential_polar(r: f64, bg: &BackgroundParams, mode: &PolarMode) -> Result<f64> {
    check_radius(r, bg.m())?;
    Ok(polar_split(r, r - 2.0 * bg.m(), bg.m(), mode.n()).0)
}

/// `(V, dV/dr)` for the axial potential with `r − 2m` passed separately.
pub(crate) fn axial_split(r: f64, rm: f64, m: f64, mu_sq: f64) -> (f64, f64) {
    let lambda = mu_sq + 2.0;
    let r2 = r * r;
    let r4 = r2 * r2;
    // V = (r − 2m)(λ r − 6m) / r⁴
    let num = rm * (lambda * r - 6.0 * m);
    let dnum = (lambda * r - 6.0 * m) + lambda * rm;
    let v = num / r4;
    (v, dnum / r4 - 4.0 * v / r)
}

pub(crate) fn polar_split(r: f64, rm: f64, m: f64, n: f64) -> (f64, f64) {
    let r2 = r * r;
    let r4 = r2 * r2;
    let q = n * n * (n + 1.0) * r2 * r + 3.0 * m * n * n * r2 + 9.0 * m * m * n * r + 9.0 * m.powi(3);
    let dq = 3.0 * n * n * (n + 1.0) * r2 + 6.0 * m * n * n * r + 9.0 * m * m * n;
    let den = n * r + 3.0 * m;
    let v = 2.0 * rm * q / (r4 * den * den);
    let dv = 2.0 * (q + rm * dq) / (r4 * den * den) + v * (-4.0 / r - 2.0 * n / den);
    (v, dv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        let bg = BackgroundParams::new(1.0).unwrap();
        let ax = AxialMode::new(2, 1.0).unwrap().with_mu_sq(4.0).unwrap();
        assert!((potential_axial(3.0, &bg, &ax).unwrap() - 4.0 / 27.0).abs() < 1e-15);
        let po = PolarMode::new(2.0, 1.0).unwrap();
        assert!((potential_polar(3.0, &bg, &po).unwrap() - 2970.0 / 19683.0).abs() < 1e-15);
        assert_eq!(potential_axial(2.0, &bg, &ax).unwrap(), 0.0);
        assert_eq!(potential_polar(2.0, &bg, &po).unwrap(), 0.0);
        assert!(potential_axial(1.9, &bg, &ax).is_err());
        assert!(potential_polar(1.0, &bg, &po).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for &r in &[2.5, 3.0, 7.0, 40.0] {
            let (v, dv) = axial_split(r, r - 2.0, 1.0, 4.0);
            let fd = (axial_split(r + h, r + h - 2.0, 1.0, 4.0).0
                - axial_split(r - h, r - h - 2.0, 1.0, 4.0).0)
                / (2.0 * h);
            assert!((dv - fd).abs() < 1e-8 * v.abs().max(1e-3));
            let (v, dv) = polar_split(r, r - 2.0, 1.0, 2.0);
            let fd = (polar_split(r + h, r + h - 2.0, 1.0, 2.0).0
                - polar_split(r - h, r - h - 2.0, 1.0, 2.0).0)
                / (2.0 * h);
            assert!((dv - fd).abs() < 1e-8 * v.abs().max(1e-3));
        }
    }

    #[test]
    fn axial_and_polar_share_the_far_field() {
        // Both potentials approach ℓ(ℓ+1)/r² with ℓ = 2; the difference is
        // O(m/r³), i.e. a relative O(m/r) gap.
        let bg = BackgroundParams::new(1.0).unwrap();
        let ax = AxialMode::new(2, 0.5).unwrap();
        let po = PolarMode::from_ell(2, 0.5).unwrap();
        let rel = |r: f64| {
            let a = potential_axial(r, &bg, &ax).unwrap();
            let p = potential_polar(r, &bg, &po).unwrap();
            ((a - p) / a).abs()
        };
        assert!(rel(1e6) < 1e-6);
        // r³ (V⁻ − V⁺) → 6m.
        let r: f64 = 1e4;
        let a = potential_axial(r, &bg, &ax).unwrap();
        let p = potential_polar(r, &bg, &po).unwrap();
        assert!(((a - p) * r.powi(3) - 6.0).abs() < 1e-2);
        assert!(rel(2e4) < 0.6 * rel(1e4));
    }
}
