use serde::Serialize;

use crate::error::{Error, Result};
use crate::sphere::{analyze, GridField, HarmonicField};

/// Closed curve on the unit sphere sampled at `s_k = k/n`, `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct LoopSpec {
    params: Vec<f64>,
    points: Vec<(f64, f64)>,
}

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Great-circle distance between two unit vectors.
fn geodesic(a: [f64; 3], b: [f64; 3]) -> f64 {
    let c = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    s.atan2(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
}

impl LoopSpec {
    /// Samples `curve(s) = (θ, φ)` at `n + 1` equally spaced parameters.
    /// Fails unless the curve closes to `1e−12`.
    pub fn from_fn(curve: impl Fn(f64) -> (f64, f64), n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("loop needs at least 3 segments, got {n}")));
        }
        let params: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let points: Vec<(f64, f64)> = params.iter().map(|&s| curve(s)).collect();
        let (t0, p0) = points[0];
        let (t1, p1) = points[n];
        let a = unit(t0, p0);
        let b = unit(t1, p1);
        let gap = geodesic(a, b);
        let wrap = ((p1 - p0) / (2.0 * std::f64::consts::PI)).round();
        let dphi = p1 - p0 - wrap * 2.0 * std::f64::consts::PI;
        if gap > 1e-12 || (t1 - t0).abs() > 1e-12 || dphi.abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("loop does not close (gap {gap:e})")));
        }
        Ok(Self { params, points })
    }

    /// Equator `θ = π/2`.
    pub fn equator(n: usize) -> Result<Self> {
        Self::small_circle(std::f64::consts::FRAC_PI_2, n)
    }

    /// Circle of constant colatitude.
    pub fn small_circle(theta: f64, n: usize) -> Result<Self> {
        Self::from_fn(|s| (theta, 2.0 * std::f64::consts::PI * s), n)
    }

    pub fn segments(&self) -> usize {
        self.points.len() - 1
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Cumulative geodesic arc length at each sample.
    pub fn arc_length(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.points.len());
        let mut acc = 0.0;
        out.push(0.0);
        for w in self.points.windows(2) {
            acc += geodesic(unit(w[0].0, w[0].1), unit(w[1].0, w[1].1));
            out.push(acc);
        }
        out
    }
}

/// One row of a loop evaluation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LoopSample {
    pub s: f64,
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopIntegral {
    pub total: f64,
    pub length: f64,
    pub samples: Vec<LoopSample>,
}

/// `∮ f ds` of a grid field along `lp`, with the field synthesized off-grid
/// from its harmonic coefficients.
pub fn loop_integral(field: &GridField, lp: &LoopSpec) -> Result<LoopIntegral> {
    loop_integral_harmonic(&analyze(field), lp)
}

/// Trapezoidal rule over geodesic segments between consecutive samples.
/// Second order in the sample spacing in general, exact for constant fields
/// on great circles.
pub fn loop_integral_harmonic(h: &HarmonicField, lp: &LoopSpec) -> Result<LoopIntegral> {
    let samples: Vec<LoopSample> = lp
        .params
        .iter()
        .zip(&lp.points)
        .map(|(&s, &(theta, phi))| LoopSample {
            s,
            theta,
            phi,
            value: h.evaluate(theta, phi),
        })
        .collect();
    let mut total = 0.0;
    let mut length = 0.0;
    for w in samples.windows(2) {
        let ds = geodesic(unit(w[0].theta, w[0].phi), unit(w[1].theta, w[1].phi));
        total += 0.5 * (w[0].value + w[1].value) * ds;
        length += ds;
    }
    if !total.is_finite() {
        return Err(Error::Degenerate("loop integral is not finite".into()));
    }
    Ok(LoopIntegral { total, length, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{synthesize, SphereGrid};
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn constant_on_equator() {
        let grid = Arc::new(SphereGrid::new(4));
        let one = GridField::from_fn(grid, |_, _| 1.0);
        let r = loop_integral(&one, &LoopSpec::equator(64).unwrap()).unwrap();
        assert!((r.total - 2.0 * PI).abs() < 1e-12);
        assert!((r.length - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn field_vanishing_on_the_loop() {
        // z·x vanishes on the equator.
        let grid = Arc::new(SphereGrid::new(6));
        let f = GridField::from_unit_fn(grid, |n| n[2] * n[0]);
        let r = loop_integral(&f, &LoopSpec::equator(50).unwrap()).unwrap();
        assert!(r.total.abs() < 1e-14);
    }

    #[test]
    fn open_curve_is_rejected() {
        assert!(LoopSpec::from_fn(|s| (1.0, PI * s), 20).is_err());
        assert!(LoopSpec::from_fn(|s| (1.0 + 0.1 * s, 2.0 * PI * s), 20).is_err());
        assert!(LoopSpec::from_fn(|s| (1.0, 4.0 * PI * s), 20).is_ok());
    }

    #[test]
    fn second_order_self_convergence() {
        let grid = Arc::new(SphereGrid::new(8));
        let mut h = HarmonicField::zeros(8);
        h.set(3, 1, 0.7);
        h.set(2, -2, 0.4);
        h.set(0, 0, 1.0);
        let f = synthesize(&h, &grid).unwrap();
        let tilted = |s: f64| {
            let a = 2.0 * PI * s;
            (0.9 + 0.3 * a.sin(), a + 0.2 * (2.0 * a).sin())
        };
        let val = |n| loop_integral(&f, &LoopSpec::from_fn(tilted, n).unwrap()).unwrap().total;
        let (a, b, c) = (val(40), val(80), val(160));
        let p = ((a - b) / (b - c)).abs().log2();
        assert!((p - 2.0).abs() < 0.1, "observed order {p}");
    }

    #[test]
    fn small_circle_length() {
        let lp = LoopSpec::small_circle(0.5, 400).unwrap();
        let l = *lp.arc_length().last().unwrap();
        let exact = 2.0 * PI * 0.5f64.sin();
        assert!((l - exact).abs() < 1e-4 * exact);
    }
}
