use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::metric::{cartesian_metric, det3, inv3, Mat3};
use super::PerturbationProfiles;
use crate::embedding::SurfaceSpec;
use crate::energy::{fit_powers, PowerFit};
use crate::error::{Error, Result};
use crate::radial::BackgroundParams;
use crate::sphere::{Frame, GridField, SphereGrid};

/// Default Gauss-Bonnet self-check tolerance.
pub const GAUSS_BONNET_TOL: f64 = 1e-6;

const D1: [f64; 7] = [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
const D2: [f64; 7] = [1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryResolution {
    /// Band limit of the parameter-sphere grid.
    pub l_max: usize,
    /// Step of the order-6 differences in the surface charts.
    pub chart_step: f64,
    /// Step of the order-6 differences for the slice mean curvature.
    pub slice_step: f64,
    /// Allowed `|∫K dμ − 4π|` before the report is rejected as under-resolved.
    pub gauss_bonnet_tol: f64,
}

impl Default for GeometryResolution {
    fn default() -> Self {
        Self {
            l_max: 24,
            chart_step: 6e-3,
            slice_step: 5e-3,
            gauss_bonnet_tol: GAUSS_BONNET_TOL,
        }
    }
}

/// Pointwise geometry at one grid node. `e`, `f`, `g` are the induced
/// metric components in the orthonormal chart of the parameter sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryPoint {
    pub theta: f64,
    pub phi: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub area_element: f64,
    pub gauss_curvature: f64,
    pub slice_mean_curvature: f64,
    pub trace_k: f64,
    pub h_norm: f64,
    pub hawking_line: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryReport {
    pub t: f64,
    pub d: f64,
    pub theta_d: f64,
    pub phi_d: f64,
    pub m: f64,
    pub epsilon: f64,
    pub resolution: GeometryResolution,
    pub points: Vec<GeometryPoint>,
    pub area: f64,
    pub integral_gauss: f64,
    pub gauss_bonnet_error: f64,
    pub integral_hawking_line: f64,
    pub flags: Vec<String>,
    #[serde(skip)]
    grid: Arc<SphereGrid>,
}

impl GeometryReport {
    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    fn field(&self, f: impl Fn(&GeometryPoint) -> f64) -> GridField {
        GridField::new(self.grid.clone(), self.points.iter().map(f).collect()).expect("one value per node")
    }

    pub fn gauss_curvature(&self) -> GridField {
        self.field(|p| p.gauss_curvature)
    }

    pub fn h_norm(&self) -> GridField {
        self.field(|p| p.h_norm)
    }

    pub fn hawking_line(&self) -> GridField {
        self.field(|p| p.hawking_line)
    }

    /// `∫ f dμ` over the surface for a pointwise quantity.
    pub fn integrate(&self, f: impl Fn(&GeometryPoint) -> f64) -> f64 {
        self.points
            .iter()
            .enumerate()
            .map(|(k, p)| self.grid.area_weight(k / self.grid.n_phi()) * p.area_element * f(p))
            .sum()
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn quad(a: [f64; 3], g: &Mat3, b: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += a[i] * g[i][j] * b[j];
        }
    }
    s
}

fn apply(g: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| g[i][0] * v[0] + g[i][1] * v[1] + g[i][2] * v[2])
}

/// Maps parameter-sphere vectors into the `y` coordinates: the frame's
/// `(Z₁, Z₂, Z₃)` go to `(d̂, ê_φ, ê_θ)` at the centre direction.
struct Placement {
    centre: [f64; 3],
    axes: [[f64; 3]; 3],
    basis: [[f64; 3]; 3],
}

impl Placement {
    fn new(spec: &SurfaceSpec, frame: &Frame) -> Self {
        let (st, ct) = spec.theta_d.sin_cos();
        let (sp, cp) = spec.phi_d.sin_cos();
        let dhat = [st * sp, st * cp, ct];
        let ephi = [cp, -sp, 0.0];
        let etheta = cross(dhat, ephi);
        Self {
            centre: dhat.map(|x| spec.d * x),
            axes: frame.axes(),
            basis: [dhat, ephi, etheta],
        }
    }

    fn map(&self, v: [f64; 3]) -> [f64; 3] {
        let z = [dot(self.axes[0], v), dot(self.axes[1], v), dot(self.axes[2], v)];
        [0, 1, 2].map(|i| z[0] * self.basis[0][i] + z[1] * self.basis[1][i] + z[2] * self.basis[2][i])
    }
}

struct Ctx<'a> {
    bg: &'a BackgroundParams,
    pert: &'a PerturbationProfiles,
    t: f64,
    centre: [f64; 3],
}

impl Ctx<'_> {
    fn metric(&self, y: [f64; 3]) -> Result<(Mat3, Mat3)> {
        cartesian_metric(self.bg, self.pert, self.t, y)
    }

    /// Induced metric at chart point `(u, v)` of the chart centred on `p`.
    fn efg(&self, p: [f64; 3], e1: [f64; 3], e2: [f64; 3], u: f64, v: f64) -> Result<[f64; 3]> {
        let w = [0, 1, 2].map(|i| p[i] + u * e1[i] + v * e2[i]);
        let len = dot(w, w).sqrt();
        let n = w.map(|x| x / len);
        let xu = [0, 1, 2].map(|i| (e1[i] - n[i] * dot(n, e1)) / len);
        let xv = [0, 1, 2].map(|i| (e2[i] - n[i] * dot(n, e2)) / len);
        let y = [0, 1, 2].map(|i| self.centre[i] + n[i]);
        let (g, _) = self.metric(y)?;
        Ok([quad(xu, &g, xu), quad(xu, &g, xv), quad(xv, &g, xv)])
    }

    /// Brioschi curvature at the chart centre and the induced metric there.
    fn gauss(&self, p: [f64; 3], e1: [f64; 3], e2: [f64; 3], h: f64) -> Result<([f64; 3], f64)> {
        let c = self.efg(p, e1, e2, 0.0, 0.0)?;
        let mut du = [0.0; 3];
        let mut dv = [0.0; 3];
        let mut duu = [0.0; 3];
        let mut dvv = [0.0; 3];
        for k in 0..7 {
            if k == 3 {
                for i in 0..3 {
                    duu[i] += D2[3] * c[i];
                    dvv[i] += D2[3] * c[i];
                }
                continue;
            }
            let s = (k as f64 - 3.0) * h;
            let a = self.efg(p, e1, e2, s, 0.0)?;
            let b = self.efg(p, e1, e2, 0.0, s)?;
            for i in 0..3 {
                du[i] += D1[k] * a[i];
                duu[i] += D2[k] * a[i];
                dv[i] += D1[k] * b[i];
                dvv[i] += D2[k] * b[i];
            }
        }
        let mut f_uv = 0.0;
        for a in 0..7 {
            if a == 3 {
                continue;
            }
            for b in 0..7 {
                if b == 3 {
                    continue;
                }
                let val = self.efg(p, e1, e2, (a as f64 - 3.0) * h, (b as f64 - 3.0) * h)?;
                f_uv += D1[a] * D1[b] * val[1];
            }
        }
        let (h1, h2) = (h, h * h);
        let [e, f, g] = c;
        let (e_u, f_u, g_u) = (du[0] / h1, du[1] / h1, du[2] / h1);
        let (e_v, f_v, g_v) = (dv[0] / h1, dv[1] / h1, dv[2] / h1);
        let e_vv = dvv[0] / h2;
        let g_uu = duu[2] / h2;
        let f_uv = f_uv / h2;
        let m1 = [
            [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
            [f_v - 0.5 * g_u, e, f],
            [0.5 * g_v, f, g],
        ];
        let m2 = [[0.0, 0.5 * e_v, 0.5 * g_u], [0.5 * e_v, e, f], [0.5 * g_u, f, g]];
        let det = e * g - f * f;
        Ok((c, (det3(&m1) - det3(&m2)) / (det * det)))
    }

    /// `√g ν` for the outward unit normal of the level sets of `|y − D|²`.
    fn weighted_normal(&self, y: [f64; 3]) -> Result<([f64; 3], f64)> {
        let (g, _) = self.metric(y)?;
        let gi = inv3(&g)?;
        let grad = [0, 1, 2].map(|i| 2.0 * (y[i] - self.centre[i]));
        let up = apply(&gi, grad);
        let norm = dot(up, grad).sqrt();
        let sq = det3(&g).sqrt();
        Ok((up.map(|x| sq * x / norm), sq))
    }

    /// Mean curvature of the surface inside the slice and `tr_Σ k`.
    fn slice_terms(&self, y: [f64; 3], h: f64) -> Result<(f64, f64)> {
        let mut div = 0.0;
        for i in 0..3 {
            for k in 0..7 {
                if k == 3 {
                    continue;
                }
                let mut q = y;
                q[i] += (k as f64 - 3.0) * h;
                div += D1[k] * self.weighted_normal(q)?.0[i];
            }
        }
        let (g, dg) = self.metric(y)?;
        let (wn, sq) = self.weighted_normal(y)?;
        let nu = wn.map(|x| x / sq);
        let gi = inv3(&g)?;
        let r = dot(y, y).sqrt();
        let lapse = (1.0 - 2.0 * self.bg.m() / r).sqrt();
        let mut tr = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                tr += (gi[i][j] - nu[i] * nu[j]) * dg[i][j] / (2.0 * lapse);
            }
        }
        Ok((div / (h * sq), tr))
    }
}

/// Geometry of `Σ_{t,d}` in the default frame.
pub fn surface_geometry(
    spec: &SurfaceSpec,
    bg: &BackgroundParams,
    pert: &PerturbationProfiles,
    resolution: &GeometryResolution,
) -> Result<GeometryReport> {
    surface_geometry_in(spec, bg, pert, resolution, &Frame::default())
}

/// Geometry of `Σ_{t,d}` with the parameter sphere oriented by `frame`.
/// Pointwise quantities are computed in parallel and gathered in grid order.
pub fn surface_geometry_in(
    spec: &SurfaceSpec,
    bg: &BackgroundParams,
    pert: &PerturbationProfiles,
    resolution: &GeometryResolution,
    frame: &Frame,
) -> Result<GeometryReport> {
    spec.validate(bg)?;
    if spec.d - 1.0 <= bg.horizon() {
        return Err(Error::Domain("surface reaches the horizon".into()));
    }
    let res = *resolution;
    if res.l_max < 2 || !(res.chart_step > 0.0 && res.chart_step <= 0.25) || !(res.slice_step > 0.0 && res.slice_step <= 0.25) {
        return Err(Error::InvalidArgument(format!("invalid geometry resolution {res:?}")));
    }
    let grid = Arc::new(SphereGrid::new(res.l_max));
    let place = Placement::new(spec, frame);
    let ctx = Ctx {
        bg,
        pert,
        t: spec.t,
        centre: place.centre,
    };
    let points: Vec<GeometryPoint> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (theta, phi) = grid.point(k);
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            let n = place.map([st * cp, st * sp, ct]);
            let e1 = place.map([ct * cp, ct * sp, -st]);
            let e2 = place.map([-sp, cp, 0.0]);
            let ([e, f, g], kg) = ctx.gauss(n, e1, e2, res.chart_step)?;
            let y = [0, 1, 2].map(|i| place.centre[i] + n[i]);
            let (hs, tr) = ctx.slice_terms(y, res.slice_step)?;
            let h_sq = hs * hs - tr * tr;
            let h_norm = h_sq.max(0.0).sqrt();
            Ok(GeometryPoint {
                theta,
                phi,
                e,
                f,
                g,
                area_element: (e * g - f * f).sqrt(),
                gauss_curvature: kg,
                slice_mean_curvature: hs,
                trace_k: tr,
                h_norm,
                hawking_line: (kg - 0.25 * h_sq) - 0.25 * (h_norm - 2.0).powi(2),
            })
        })
        .collect::<Result<_>>()?;
    let mut flags: Vec<String> = pert.flags().to_vec();
    if points.iter().any(|p| p.slice_mean_curvature.powi(2) < p.trace_k.powi(2)) {
        flags.push("timelike-mean-curvature".into());
    }
    let mut report = GeometryReport {
        t: spec.t,
        d: spec.d,
        theta_d: spec.theta_d,
        phi_d: spec.phi_d,
        m: bg.m(),
        epsilon: pert.epsilon(),
        resolution: res,
        points,
        area: 0.0,
        integral_gauss: 0.0,
        gauss_bonnet_error: 0.0,
        integral_hawking_line: 0.0,
        flags,
        grid,
    };
    report.area = report.integrate(|_| 1.0);
    report.integral_gauss = report.integrate(|p| p.gauss_curvature);
    report.integral_hawking_line = report.integrate(|p| p.hawking_line);
    report.gauss_bonnet_error = report.integral_gauss - 4.0 * std::f64::consts::PI;
    if !(report.gauss_bonnet_error.abs() <= res.gauss_bonnet_tol) {
        return Err(Error::Convergence(format!(
            "Gauss-Bonnet check failed: |∫K dμ − 4π| = {:e} at l_max = {}, chart step {}",
            report.gauss_bonnet_error.abs(),
            res.l_max,
            res.chart_step
        )));
    }
    Ok(report)
}

/// `∂ε` of the Hawking line by `(report(ε) − report(−ε))/2ε`.
#[derive(Debug, Clone, Serialize)]
pub struct LinearizedLine {
    pub epsilon: f64,
    pub values: Vec<f64>,
    pub integral: f64,
}

pub fn linearized_hawking_line(
    spec: &SurfaceSpec,
    bg: &BackgroundParams,
    pert: &PerturbationProfiles,
    resolution: &GeometryResolution,
) -> Result<LinearizedLine> {
    let eps = pert.epsilon();
    if eps == 0.0 {
        return Err(Error::InvalidArgument("epsilon must be non-zero".into()));
    }
    let plus = surface_geometry(spec, bg, &pert.clone().with_epsilon(eps), resolution)?;
    let minus = surface_geometry(spec, bg, &pert.clone().with_epsilon(-eps), resolution)?;
    let values = plus
        .points
        .iter()
        .zip(&minus.points)
        .map(|(a, b)| (a.hawking_line - b.hawking_line) / (2.0 * eps))
        .collect();
    Ok(LinearizedLine {
        epsilon: eps,
        values,
        integral: (plus.integral_hawking_line - minus.integral_hawking_line) / (2.0 * eps),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GeometrySweepRow {
    pub d: f64,
    pub area: f64,
    pub integral_gauss: f64,
    pub integral_hawking_line: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometrySweep {
    pub rows: Vec<GeometrySweepRow>,
    /// `∫ hawking_line dμ ≈ c₀ + c₁/d + c₂/d²`.
    pub fit: Option<PowerFit>,
    pub note: Option<String>,
    pub flags: Vec<String>,
}

/// Surface geometry at each distance, with `template` giving `t` and the
/// direction. Fits the Hawking-line integral in the given inverse powers of `d`.
pub fn geometry_sweep(
    ds: &[f64],
    template: &SurfaceSpec,
    bg: &BackgroundParams,
    pert: &PerturbationProfiles,
    resolution: &GeometryResolution,
    powers: &[i32],
) -> Result<GeometrySweep> {
    if ds.is_empty() {
        return Err(Error::InvalidArgument("geometry sweep needs at least one distance".into()));
    }
    let reports: Vec<GeometryReport> = ds
        .iter()
        .map(|&d| {
            let mut s = template.clone();
            s.d = d;
            surface_geometry(&s, bg, pert, resolution)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<GeometrySweepRow> = reports
        .iter()
        .map(|r| GeometrySweepRow {
            d: r.d,
            area: r.area,
            integral_gauss: r.integral_gauss,
            integral_hawking_line: r.integral_hawking_line,
        })
        .collect();
    let mut flags: Vec<String> = Vec::new();
    for r in &reports {
        for f in &r.flags {
            if !flags.contains(f) {
                flags.push(f.clone());
            }
        }
    }
    let samples: Vec<(f64, f64)> = rows.iter().map(|r| (r.d, r.integral_hawking_line)).collect();
    let (fit, note) = match fit_powers(&samples, powers) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(GeometrySweep { rows, fit, note, flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ProfileFn;
    use std::f64::consts::PI;

    fn bg(m: f64) -> BackgroundParams {
        BackgroundParams::new(m).unwrap()
    }

    fn res(l_max: usize) -> GeometryResolution {
        GeometryResolution {
            l_max,
            ..Default::default()
        }
    }

    #[test]
    fn flat_round_sphere() {
        for (d, th, ph) in [(5.0, PI / 2.0, 0.0), (40.0, 0.7, 2.1)] {
            let spec = SurfaceSpec::new(d).with_direction(th, ph);
            let r = surface_geometry(&spec, &bg(0.0), &PerturbationProfiles::none(), &res(8)).unwrap();
            for p in &r.points {
                assert!((p.gauss_curvature - 1.0).abs() < 1e-10, "K = {}", p.gauss_curvature);
                assert!((p.h_norm - 2.0).abs() < 1e-10, "|H| = {}", p.h_norm);
                assert!(p.hawking_line.abs() < 1e-10);
                assert!((p.area_element - 1.0).abs() < 1e-13);
            }
            assert!((r.area - 4.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_bonnet_in_schwarzschild() {
        let spec = SurfaceSpec::new(100.0).with_t(0.3);
        let r = surface_geometry(&spec, &bg(1.0), &PerturbationProfiles::none(), &res(16)).unwrap();
        assert!(r.gauss_bonnet_error.abs() < 1e-8, "{:e}", r.gauss_bonnet_error);
        let r = surface_geometry(&SurfaceSpec::new(6.0), &bg(1.0), &PerturbationProfiles::none(), &res(24)).unwrap();
        assert!(r.gauss_bonnet_error.abs() < 1e-8, "{:e}", r.gauss_bonnet_error);
    }

    #[test]
    fn gauss_bonnet_with_perturbation() {
        let q2: ProfileFn = Arc::new(|r, th: f64| Ok(0.5 * th.cos() / r));
        let q3: ProfileFn = Arc::new(|r, th: f64| Ok(3.0 * th.sin() * (0.5 * r).sin() / r));
        let pert = PerturbationProfiles::axial(Some(q2), q3, 0.5, 1e-3);
        let spec = SurfaceSpec::new(30.0).with_t(1.0);
        let r = surface_geometry(&spec, &bg(1.0), &pert, &res(16)).unwrap();
        assert!(r.gauss_bonnet_error.abs() < 1e-8, "{:e}", r.gauss_bonnet_error);
        assert!(r.flags.is_empty());
    }

    #[test]
    fn coarse_resolution_is_rejected() {
        let spec = SurfaceSpec::new(5.0);
        let coarse = GeometryResolution {
            l_max: 3,
            ..Default::default()
        };
        assert!(matches!(
            surface_geometry(&spec, &bg(1.0), &PerturbationProfiles::none(), &coarse),
            Err(Error::Convergence(_))
        ));
        assert!(surface_geometry(&SurfaceSpec::new(2.5), &bg(1.0), &PerturbationProfiles::none(), &res(8)).is_err());
    }

    fn test_axial(eps: f64) -> PerturbationProfiles {
        let q2: ProfileFn = Arc::new(|r, th: f64| Ok(0.5 * th.cos() / r));
        let q3: ProfileFn = Arc::new(|r, th: f64| Ok(3.0 * th.sin() * (0.5 * r).sin() / r));
        PerturbationProfiles::axial(Some(q2), q3, 0.5, eps)
    }

    #[test]
    fn schwarzschild_fit_is_resolution_independent() {
        let ds = [25.0, 50.0, 100.0, 200.0];
        let c1 = |l| {
            let sw = geometry_sweep(&ds, &SurfaceSpec::new(25.0), &bg(1.0), &PerturbationProfiles::none(), &res(l), &[0, 1, 2])
                .unwrap();
            sw.fit.unwrap().coeff(1).unwrap()
        };
        let (a, b) = (c1(8), c1(12));
        assert!(a.is_finite() && (a - b).abs() < 1e-6 * a.abs(), "{a} vs {b}");
    }

    #[test]
    fn linearized_line_converges_in_step() {
        let spec = SurfaceSpec::new(30.0).with_t(1.0);
        let run = |h| {
            let r = GeometryResolution {
                l_max: 4,
                chart_step: h,
                slice_step: h,
                gauss_bonnet_tol: 1.0,
            };
            linearized_hawking_line(&spec, &bg(1.0), &test_axial(1e-3), &r).unwrap().values
        };
        let (a, b, c) = (run(0.08), run(0.04), run(0.02));
        let diff = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        let order = (diff(&a, &b) / diff(&b, &c)).log2();
        assert!(order > 2.0, "observed order {order}");
    }

    #[test]
    fn linearization_is_insensitive_to_epsilon() {
        let spec = SurfaceSpec::new(30.0).with_t(1.0);
        let a = linearized_hawking_line(&spec, &bg(1.0), &test_axial(1e-3), &res(4)).unwrap();
        let b = linearized_hawking_line(&spec, &bg(1.0), &test_axial(5e-4), &res(4)).unwrap();
        let scale = a.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(scale > 1e-6);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-4 * scale);
        }
        assert!(linearized_hawking_line(&spec, &bg(1.0), &PerturbationProfiles::none(), &res(4)).is_err());
    }

    #[test]
    fn polar_perturbation_keeps_gauss_bonnet() {
        let h: ProfileFn = Arc::new(|r, th: f64| Ok(th.cos().powi(2) * (0.5 * r).cos() / r));
        let z: ProfileFn = Arc::new(|_, _| Ok(0.0));
        let pert = PerturbationProfiles::polar([h.clone(), h, z], 0.5, 1e-3);
        let r = surface_geometry(&SurfaceSpec::new(20.0).with_t(0.8), &bg(1.0), &pert, &res(16)).unwrap();
        assert!(r.gauss_bonnet_error.abs() < 1e-8, "{:e}", r.gauss_bonnet_error);
    }

    #[test]
    fn frame_orientation_matches_embedding_convention() {
        // Z₁ toward the centre direction: the point of largest radius sits at Z₁ = 1.
        let spec = SurfaceSpec::new(10.0).with_direction(0.9, 0.4);
        let place = Placement::new(&spec, &Frame::default());
        let far = place.map(Frame::default().axes()[0]);
        let y = [0, 1, 2].map(|i| place.centre[i] + far[i]);
        assert!((dot(y, y).sqrt() - 11.0).abs() < 1e-12);
        let b = place.basis;
        assert!((dot(cross(b[0], b[1]), b[2]) - 1.0).abs() < 1e-14);
    }
}
