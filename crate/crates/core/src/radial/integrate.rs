//! Dormand-Prince 5(4) marching of the radial wave equation
//! `d²Z/dr*² + σ² Z = V(r) Z` as a first-order system in `(Z, dZ/dr*)`.
//!
//! Dense output between accepted steps is a quintic Hermite interpolant built
//! from the value and the first two `r*`-derivatives at both ends; the second
//! derivative comes from the equation itself, so the interpolant is `O(h⁶)`.

use serde::Serialize;

use super::tortoise::{tortoise, InverseTortoise};
use super::{BackgroundParams, Mode, ModeKind};
use crate::error::{Error, Result};

/// Boundary data for [`integrate_wave`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// `Z` and `dZ/dr*` at a point inside the requested range.
    Initial { r_star: f64, z: f64, dz: f64 },
    /// Free-wave data `Z = a sin(σ r* + φ₀)` imposed far out, where the
    /// potential is negligible. Without an explicit start, the start is the
    /// first radius beyond the requested range where `V ≤ boundary_tol · σ²`.
    Asymptotic {
        amplitude: f64,
        phase: f64,
        r_star_start: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    Adaptive,
    /// Uniform steps in `r*`; only the final step is shortened to land on the
    /// endpoint. Used where identical step sequences are needed.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub rtol: f64,
    /// Absolute tolerance, relative to the largest boundary value.
    pub atol: f64,
    /// Potential-to-`σ²` ratio at which asymptotic data is imposed.
    pub boundary_tol: f64,
    pub step: StepControl,
    pub max_steps: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            boundary_tol: 1e-6,
            step: StepControl::Adaptive,
            max_steps: 20_000_000,
        }
    }
}

/// Sampled solution of a Regge-Wheeler or Zerilli problem.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    background: BackgroundParams,
    mode: Mode,
    r_star: Vec<f64>,
    r: Vec<f64>,
    z: Vec<f64>,
    dz: Vec<f64>,
    // (V − σ²) and dV/dr* at each sample, for the Hermite interpolants.
    w: Vec<f64>,
    dv: Vec<f64>,
    boundary_truncation: Option<f64>,
    rtol: f64,
}

/// Sample row exported by [`RadialSolution::samples`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadialSample {
    pub r: f64,
    pub r_star: f64,
    pub z: f64,
    pub dz_dr_star: f64,
    pub potential: f64,
}

#[derive(Clone, Copy)]
struct State {
    t: f64,
    r: f64,
    u: f64,
    z: f64,
    p: f64,
    // (V − σ²) and dV/dr* at t
    w: f64,
    dv: f64,
}

struct Rhs<'a> {
    bg: &'a BackgroundParams,
    mode: &'a Mode,
    sigma_sq: f64,
}

impl Rhs<'_> {
    /// Potential data at `r*`, reusing `seed` for the inverse map.
    fn at(&self, t: f64, seed: f64) -> Result<(f64, f64, f64, f64, f64)> {
        let m = self.bg.m();
        let inv = InverseTortoise::solve(t, m, Some(seed))?;
        if inv.r <= 0.0 {
            return Err(Error::Domain(format!("r* = {t} maps to non-positive radius")));
        }
        let (v, dv_dr) = self.mode.potential_split(inv.r, inv.r_minus_2m, m);
        // dr/dr* = (r − 2m)/r
        let dv = dv_dr * inv.r_minus_2m / inv.r;
        Ok((inv.r, inv.r_minus_2m, inv.u, v - self.sigma_sq, dv))
    }

    fn state(&self, t: f64, seed: f64, z: f64, p: f64) -> Result<State> {
        let (r, _, u, w, dv) = self.at(t, seed)?;
        Ok(State {
            t,
            r,
            u,
            z,
            p,
            w,
            dv,
        })
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One DP5 step from `s` with signed step `h`. Returns the new state and the
/// embedded error estimate for `(Z, P)`.
fn dp_step(rhs: &Rhs<'_>, s: &State, h: f64) -> Result<(State, [f64; 2])> {
    let mut kz = [0.0; 7];
    let mut kp = [0.0; 7];
    kz[0] = s.p;
    kp[0] = s.w * s.z;
    let mut seed = s.u;
    for i in 1..6 {
        let mut z = s.z;
        let mut p = s.p;
        for j in 0..i {
            z += h * A[i][j] * kz[j];
            p += h * A[i][j] * kp[j];
        }
        let (_, _, u, w, _) = rhs.at(s.t + C[i] * h, seed)?;
        seed = u;
        kz[i] = p;
        kp[i] = w * z;
    }
    let mut z = s.z;
    let mut p = s.p;
    for j in 0..6 {
        z += h * A[6][j] * kz[j];
        p += h * A[6][j] * kp[j];
    }
    let next = rhs.state(s.t + h, seed, z, p)?;
    kz[6] = next.p;
    kp[6] = next.w * next.z;
    let mut ez = 0.0;
    let mut ep = 0.0;
    for i in 0..7 {
        ez += h * E[i] * kz[i];
        ep += h * E[i] * kp[i];
    }
    Ok((next, [ez, ep]))
}

/// Marches from `start` to `end` (either direction) and returns every
/// accepted state, starting with `start`.
fn march(rhs: &Rhs<'_>, start: State, end: f64, opts: &IntegrationOptions) -> Result<Vec<State>> {
    let span = end - start.t;
    let mut out = vec![start];
    if span == 0.0 {
        return Ok(out);
    }
    let dir = span.signum();
    let scale = start.z.abs().max(start.p.abs()).max(f64::MIN_POSITIVE);
    let atol = opts.atol * scale;
    let sigma = rhs.sigma_sq.sqrt();
    let mut s = start;
    let mut h = match opts.step {
        StepControl::Fixed(h) => {
            if !(h > 0.0) {
                return Err(Error::InvalidArgument(format!("fixed step {h} must be > 0")));
            }
            h
        }
        StepControl::Adaptive => (0.05 / sigma.max(1e-3)).min(span.abs() / 8.0),
    };
    let mut steps = 0usize;
    while (end - s.t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Convergence(format!(
                "exceeded {} steps integrating to r* = {end}",
                opts.max_steps
            )));
        }
        let remaining = (end - s.t).abs();
        let last = h >= remaining;
        let hs = if last { remaining } else { h };
        if hs < 1e-13 * s.t.abs().max(1.0) && !last {
            return Err(Error::StepUnderflow {
                r_star: s.t,
                step: hs,
            });
        }
        let (mut next, err) = dp_step(rhs, &s, dir * hs)?;
        if last {
            // Land exactly on the endpoint.
            next.t = end;
        }
        match opts.step {
            StepControl::Fixed(_) => {
                out.push(next);
                s = next;
            }
            StepControl::Adaptive => {
                let sz = atol + opts.rtol * s.z.abs().max(next.z.abs());
                let sp = atol + opts.rtol * s.p.abs().max(next.p.abs());
                let en = (0.5 * ((err[0] / sz).powi(2) + (err[1] / sp).powi(2))).sqrt();
                let factor = if en == 0.0 {
                    5.0
                } else {
                    (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
                };
                if en <= 1.0 {
                    out.push(next);
                    s = next;
                    h = hs * factor;
                } else {
                    h = hs * factor.min(1.0);
                    if h < 1e-13 * s.t.abs().max(1.0) {
                        return Err(Error::StepUnderflow {
                            r_star: s.t,
                            step: h,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Integrates the radial wave equation of `mode` over `r ∈ [r_min, r_max]`.
pub fn integrate_wave(
    bg: &BackgroundParams,
    mode: &Mode,
    boundary: Boundary,
    r_range: (f64, f64),
    opts: &IntegrationOptions,
) -> Result<RadialSolution> {
    let (r_min, r_max) = r_range;
    if !(r_min < r_max) || r_min <= bg.horizon() || r_min <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "radial range [{r_min}, {r_max}] must be increasing and outside r = {}",
            bg.horizon()
        )));
    }
    if !(opts.rtol > 0.0) {
        return Err(Error::InvalidArgument("rtol must be > 0".into()));
    }
    let sigma = mode.sigma();
    let rhs = Rhs {
        bg,
        mode,
        sigma_sq: sigma * sigma,
    };
    let ts_min = tortoise(r_min, bg)?;
    let ts_max = tortoise(r_max, bg)?;
    let seed_for = |t: f64| {
        if bg.m() > 0.0 {
            tortoise_seed(t, bg.m())
        } else {
            0.0
        }
    };

    let (states, truncation) = match boundary {
        Boundary::Initial { r_star, z, dz } => {
            if !(ts_min..=ts_max).contains(&r_star) {
                return Err(Error::Coverage {
                    what: "boundary point in tortoise range",
                    value: r_star,
                    lo: ts_min,
                    hi: ts_max,
                });
            }
            let start = rhs.state(r_star, seed_for(r_star), z, dz)?;
            let mut back = march(&rhs, start, ts_min, opts)?;
            let fwd = march(&rhs, start, ts_max, opts)?;
            back.reverse();
            back.extend_from_slice(&fwd[1..]);
            (back, None)
        }
        Boundary::Asymptotic {
            amplitude,
            phase,
            r_star_start,
        } => {
            let t0 = match r_star_start {
                Some(t) => {
                    if t < ts_max {
                        return Err(Error::Coverage {
                            what: "asymptotic start beyond the requested range",
                            value: t,
                            lo: ts_max,
                            hi: f64::INFINITY,
                        });
                    }
                    t
                }
                None => {
                    let r0 = asymptotic_radius(bg, mode, opts.boundary_tol * sigma * sigma, r_max)?;
                    tortoise(r0, bg)?
                }
            };
            let phi = sigma * t0 + phase;
            let start = rhs.state(
                t0,
                seed_for(t0),
                amplitude * phi.sin(),
                amplitude * sigma * phi.cos(),
            )?;
            let trunc = (start.w + rhs.sigma_sq) / rhs.sigma_sq;
            let mut back = march(&rhs, start, ts_min, opts)?;
            back.reverse();
            (back, Some(trunc))
        }
    };

    let n = states.len();
    let mut sol = RadialSolution {
        background: *bg,
        mode: *mode,
        r_star: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
        dz: Vec::with_capacity(n),
        w: Vec::with_capacity(n),
        dv: Vec::with_capacity(n),
        boundary_truncation: truncation,
        rtol: opts.rtol,
    };
    for s in states {
        if let Some(&last) = sol.r_star.last() {
            if s.t <= last {
                continue;
            }
        }
        sol.r_star.push(s.t);
        sol.r.push(s.r);
        sol.z.push(s.z);
        sol.dz.push(s.p);
        sol.w.push(s.w);
        sol.dv.push(s.dv);
    }
    Ok(sol)
}

fn tortoise_seed(t: f64, m: f64) -> f64 {
    let two_m = 2.0 * m;
    if t > 2.0 * two_m {
        (t / two_m - 1.0).ln()
    } else {
        (t - two_m) / two_m
    }
}

/// Smallest radius `≥ max(r_max, 4m)` where the potential has decayed to `target`.
fn asymptotic_radius(bg: &BackgroundParams, mode: &Mode, target: f64, r_max: f64) -> Result<f64> {
    if !(target > 0.0) {
        return Err(Error::InvalidArgument("boundary tolerance must be > 0".into()));
    }
    let lo0 = r_max.max(4.0 * bg.m());
    if mode.potential(lo0, bg)? <= target {
        return Ok(lo0);
    }
    let mut hi = lo0;
    let mut lo = lo0;
    while mode.potential(hi, bg)? > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e15 {
            return Err(Error::Convergence("potential never decays below tolerance".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mode.potential(mid, bg)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Polynomial coefficients in `s ∈ [0, 1]` of the quintic Hermite interpolant.
fn hermite(f0: f64, d0: f64, s0: f64, f1: f64, d1: f64, s1: f64) -> [f64; 6] {
    [
        f0,
        d0,
        0.5 * s0,
        -10.0 * f0 - 6.0 * d0 - 1.5 * s0 + 0.5 * s1 - 4.0 * d1 + 10.0 * f1,
        15.0 * f0 + 8.0 * d0 + 1.5 * s0 - s1 + 7.0 * d1 - 15.0 * f1,
        -6.0 * f0 - 3.0 * d0 - 0.5 * s0 + 0.5 * s1 - 3.0 * d1 + 6.0 * f1,
    ]
}

/// Value, first and second derivative in `s` of a quintic.
fn poly_eval(c: &[f64; 6], s: f64) -> (f64, f64, f64) {
    let v = c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * (c[4] + s * c[5]))));
    let d = c[1] + s * (2.0 * c[2] + s * (3.0 * c[3] + s * (4.0 * c[4] + s * 5.0 * c[5])));
    let dd = 2.0 * c[2] + s * (6.0 * c[3] + s * (12.0 * c[4] + s * 20.0 * c[5]));
    (v, d, dd)
}

impl RadialSolution {
    pub fn kind(&self) -> ModeKind {
        self.mode.kind()
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn background(&self) -> &BackgroundParams {
        &self.background
    }

    pub fn len(&self) -> usize {
        self.r_star.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_star.is_empty()
    }

    pub fn r_star_grid(&self) -> &[f64] {
        &self.r_star
    }

    pub fn r_grid(&self) -> &[f64] {
        &self.r
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn dz_dr_star(&self) -> &[f64] {
        &self.dz
    }

    /// `V(r_start)/σ²` for asymptotic boundary data, i.e. the size of the
    /// potential neglected when imposing free-wave data.
    pub fn boundary_truncation(&self) -> Option<f64> {
        self.boundary_truncation
    }

    pub fn r_star_range(&self) -> (f64, f64) {
        (self.r_star[0], *self.r_star.last().expect("non-empty"))
    }

    pub fn r_range(&self) -> (f64, f64) {
        (self.r[0], *self.r.last().expect("non-empty"))
    }

    pub fn samples(&self) -> impl Iterator<Item = RadialSample> + '_ {
        let s2 = self.mode.sigma().powi(2);
        (0..self.len()).map(move |i| RadialSample {
            r: self.r[i],
            r_star: self.r_star[i],
            z: self.z[i],
            dz_dr_star: self.dz[i],
            potential: self.w[i] + s2,
        })
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let (lo, hi) = self.r_star_range();
        let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::Coverage {
                what: "radial solution (r*)",
                value: t,
                lo,
                hi,
            });
        }
        let t = t.clamp(lo, hi);
        let k = self.r_star.partition_point(|&x| x <= t);
        let i = k.saturating_sub(1).min(self.len().saturating_sub(2));
        let h = self.r_star[i + 1] - self.r_star[i];
        Ok((i, (t - self.r_star[i]) / h))
    }

    fn interval_polys(&self, i: usize) -> ([f64; 6], [f64; 6], f64) {
        let h = self.r_star[i + 1] - self.r_star[i];
        let zpp = |k: usize| self.w[k] * self.z[k];
        let ppp = |k: usize| self.dv[k] * self.z[k] + self.w[k] * self.dz[k];
        let cz = hermite(
            self.z[i],
            h * self.dz[i],
            h * h * zpp(i),
            self.z[i + 1],
            h * self.dz[i + 1],
            h * h * zpp(i + 1),
        );
        let cp = hermite(
            self.dz[i],
            h * zpp(i),
            h * h * ppp(i),
            self.dz[i + 1],
            h * zpp(i + 1),
            h * h * ppp(i + 1),
        );
        (cz, cp, h)
    }

    /// `(Z, dZ/dr*)` at tortoise coordinate `r_star`.
    pub fn eval_r_star(&self, r_star: f64) -> Result<(f64, f64)> {
        if self.len() == 1 {
            return if r_star == self.r_star[0] {
                Ok((self.z[0], self.dz[0]))
            } else {
                Err(Error::Coverage {
                    what: "radial solution (r*)",
                    value: r_star,
                    lo: self.r_star[0],
                    hi: self.r_star[0],
                })
            };
        }
        let (i, s) = self.locate(r_star)?;
        let (cz, cp, _) = self.interval_polys(i);
        Ok((poly_eval(&cz, s).0, poly_eval(&cp, s).0))
    }

    /// `(Z, dZ/dr*)` at areal radius `r`.
    pub fn eval_r(&self, r: f64) -> Result<(f64, f64)> {
        self.eval_r_star(tortoise(r, &self.background)?)
    }

    /// Largest residual `|Z'' + σ²Z − VZ|` of the dense output at interval
    /// midpoints, relative to the largest `|Z|` on the grid.
    pub fn max_midpoint_residual(&self) -> Result<f64> {
        let rhs = Rhs {
            bg: &self.background,
            mode: &self.mode,
            sigma_sq: self.mode.sigma().powi(2),
        };
        let zmax = self.z.iter().fold(0.0f64, |m, z| m.max(z.abs())).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..self.len().saturating_sub(1) {
            let (cz, _, h) = self.interval_polys(i);
            let (z, _, zss) = poly_eval(&cz, 0.5);
            let t = self.r_star[i] + 0.5 * h;
            let (_, _, _, w, _) = rhs.at(t, InverseTortoise::solve(self.r_star[i], self.background.m(), None)?.u)?;
            worst = worst.max((zss / (h * h) - w * z).abs());
        }
        Ok(worst / zmax)
    }

    pub fn rtol(&self) -> f64 {
        self.rtol
    }
}
