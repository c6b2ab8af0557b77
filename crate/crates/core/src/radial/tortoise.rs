use crate::error::{Error, Result};

use super::BackgroundParams;

/// `r* = r + 2m ln(r/2m − 1)`.
pub fn tortoise(r: f64, bg: &BackgroundParams) -> Result<f64> {
    let m = bg.m();
    if m == 0.0 {
        if r <= 0.0 {
            return Err(Error::Domain(format!("radius {r} must be positive")));
        }
        return Ok(r);
    }
    if r <= 2.0 * m || !r.is_finite() {
        return Err(Error::Domain(format!(
            "radius {r} is not outside the horizon at 2m = {}",
            2.0 * m
        )));
    }
    Ok(r + 2.0 * m * ((r - 2.0 * m) / (2.0 * m)).ln())
}

/// Inverse of [`tortoise`].
pub fn inverse_tortoise(r_star: f64, bg: &BackgroundParams) -> Result<f64> {
    Ok(InverseTortoise::solve(r_star, bg.m(), None)?.r)
}

/// Solution of the inverse map with the horizon distance kept separately.
#[derive(Debug, Clone, Copy)]
pub(crate) struct InverseTortoise {
    pub r: f64,
    /// `r − 2m`, accurate even when it underflows relative to `r`.
    pub r_minus_2m: f64,
    /// `ln(r/2m − 1)`, reusable as a Newton seed.
    pub u: f64,
}

impl InverseTortoise {
    /// Newton iteration in `u = ln(r/2m − 1)`, where
    /// `g(u) = 2m(1 + eᵘ) + 2m u − r*` is increasing and convex, so the
    /// iteration converges from any seed.
    pub fn solve(r_star: f64, m: f64, seed: Option<f64>) -> Result<Self> {
        if !r_star.is_finite() {
            return Err(Error::Domain(format!("tortoise coordinate {r_star} is not finite")));
        }
        if m == 0.0 {
            return Ok(Self {
                r: r_star,
                r_minus_2m: r_star,
                u: f64::NAN,
            });
        }
        let two_m = 2.0 * m;
        let mut u = seed.filter(|s| s.is_finite()).unwrap_or_else(|| {
            if r_star > 2.0 * two_m {
                (r_star / two_m - 1.0).ln()
            } else {
                (r_star - two_m) / two_m
            }
        });
        for _ in 0..50 {
            let e = u.exp();
            let g = two_m * (1.0 + e) + two_m * u - r_star;
            let dg = two_m * (e + 1.0);
            let du = g / dg;
            u -= du;
            if du.abs() <= 1e-15 * u.abs().max(1.0) {
                let e = u.exp();
                return Ok(Self {
                    r: two_m * (1.0 + e),
                    r_minus_2m: two_m * e,
                    u,
                });
            }
        }
        Err(Error::Convergence(format!(
            "inverse tortoise map did not converge for r* = {r_star}, m = {m}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bg(m: f64) -> BackgroundParams {
        BackgroundParams::new(m).unwrap()
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(tortoise(4.0, &bg(1.0)).unwrap(), 4.0);
        assert_eq!(tortoise(7.0, &bg(0.0)).unwrap(), 7.0);
        assert!(tortoise(2.0, &bg(1.0)).is_err());
        assert!(tortoise(1.5, &bg(1.0)).is_err());
    }

    #[test]
    fn diverges_toward_horizon_monotonically() {
        let b = bg(1.0);
        let mut prev = f64::NEG_INFINITY;
        for k in (1..40).rev() {
            let r = 2.0 + 10f64.powf(-(k as f64) / 3.0);
            let rs = tortoise(r, &b).unwrap();
            assert!(rs > prev);
            prev = rs;
        }
        assert!(tortoise(2.0 + 1e-12, &b).unwrap() < -50.0);
    }

    #[test]
    fn inverse_of_known_values() {
        assert!((inverse_tortoise(4.0, &bg(1.0)).unwrap() - 4.0).abs() < 1e-13);
        for rs in [-1e3, -3.0, 0.0, 5.5, 1e4] {
            assert_eq!(inverse_tortoise(rs, &bg(0.0)).unwrap(), rs);
        }
    }

    #[test]
    fn inverse_against_bisection() {
        let b = bg(1.0);
        // Bisection on the monotone map.
        let (mut lo, mut hi) = (2.0 + 1e-12, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if tortoise(mid, &b).unwrap() < 10.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = inverse_tortoise(10.0, &b).unwrap();
        assert!((r - 0.5 * (lo + hi)).abs() < 1e-12 * r);
        assert!((tortoise(r, &b).unwrap() - 10.0).abs() <= 1e-12);
    }

    #[test]
    fn round_trip_over_many_scales() {
        for m in [0.5, 1.0, 3.0] {
            let b = bg(m);
            for rs in [-400.0, -30.0, -1.0, 0.0, 2.0, 17.0, 1e3, 1e6] {
                let inv = InverseTortoise::solve(rs, m, None).unwrap();
                // Forward map written with the separately kept horizon offset.
                let back = inv.r + 2.0 * m * (inv.r_minus_2m / (2.0 * m)).ln();
                assert!((back - rs).abs() <= 1e-12 * rs.abs().max(1.0), "{rs} -> {back}");
                if inv.r_minus_2m > 1e-3 * inv.r {
                    let back = tortoise(inv.r, &b).unwrap();
                    assert!((back - rs).abs() <= 1e-12 * rs.abs().max(1.0), "{rs} -> {back}");
                }
            }
        }
    }

    #[test]
    fn deep_horizon_keeps_offset() {
        let s = InverseTortoise::solve(-200.0, 1.0, None).unwrap();
        assert!(s.r_minus_2m > 0.0 && s.r_minus_2m < 1e-40);
    }
}
