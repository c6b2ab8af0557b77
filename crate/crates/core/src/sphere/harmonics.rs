//! Real spherical-harmonic fields and the grid ↔ coefficient transforms.
//!
//! Convention: orthonormal real harmonics without the Condon-Shortley phase,
//!
//! ```text
//! Y_l0  = P̄_l^0(cos θ)
//! Y_lm  = √2 P̄_l^m(cos θ) cos(mφ)      m > 0
//! Y_l-m = √2 P̄_l^m(cos θ) sin(mφ)      m > 0
//! ```
//!
//! so that the three degree-one harmonics are `√(3/4π)·(x, y, z)` with
//! `(l, m) = (1, 1), (1, -1), (1, 0)` respectively. The Laplacian is negative
//! semidefinite: `Δ Y_lm = -l(l+1) Y_lm`.

use std::f64::consts::SQRT_2;
use std::io::{self, Write};
use std::sync::Arc;

use super::grid::SphereGrid;
use super::legendre::{normalized_table, tri, tri_len};
use crate::error::{Error, Result};

/// Coefficients of a band-limited real field on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicField {
    l_max: usize,
    coeffs: Vec<f64>,
}

impl HarmonicField {
    pub fn zeros(l_max: usize) -> Self {
        Self {
            l_max,
            coeffs: vec![0.0; (l_max + 1) * (l_max + 1)],
        }
    }

    /// Builds a field from coefficients ordered by `(l, m)` with `m` running
    /// from `-l` to `l`.
    pub fn from_coeffs(l_max: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != (l_max + 1) * (l_max + 1) {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients for l_max = {l_max}, got {}",
                (l_max + 1) * (l_max + 1),
                coeffs.len()
            )));
        }
        Ok(Self { l_max, coeffs })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    pub fn index(l: usize, m: i64) -> usize {
        debug_assert!(m.unsigned_abs() as usize <= l);
        (l * l + l).wrapping_add_signed(m as isize)
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        if l > self.l_max || m.unsigned_abs() as usize > l {
            return 0.0;
        }
        self.coeffs[Self::index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, value: f64) {
        assert!(l <= self.l_max && m.unsigned_abs() as usize <= l);
        self.coeffs[Self::index(l, m)] = value;
    }

    /// Iterates `(l, m, coefficient)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        (0..=self.l_max).flat_map(move |l| {
            (-(l as i64)..=l as i64).map(move |m| (l, m, self.coeffs[Self::index(l, m)]))
        })
    }

    /// Zero-pads or truncates to a new band limit.
    pub fn resized(&self, l_max: usize) -> Self {
        let mut out = Self::zeros(l_max);
        let n = (l_max.min(self.l_max) + 1).pow(2);
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// L² norm over the sphere (Parseval).
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Norm of the degree-`l` block.
    pub fn degree_norm(&self, l: usize) -> f64 {
        if l > self.l_max {
            return 0.0;
        }
        let lo = l * l;
        self.coeffs[lo..lo + 2 * l + 1]
            .iter()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// `∫ f g dΩ` for two coefficient sets.
    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            l_max: self.l_max,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Multiplies every degree-`l` block by `factor(l)`.
    pub fn map_degrees(&self, factor: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for l in 0..=self.l_max {
            let f = factor(l);
            for c in &mut out.coeffs[l * l..(l + 1) * (l + 1)] {
                *c *= f;
            }
        }
        out
    }

    pub fn apply(&self, op: SphereOperator) -> Self {
        self.map_degrees(|l| op.eigenvalue(l))
    }

    /// Value at an arbitrary point `(θ, φ)`.
    pub fn evaluate(&self, theta: f64, phi: f64) -> f64 {
        let mut table = vec![0.0; tri_len(self.l_max)];
        normalized_table(self.l_max, theta.cos(), &mut table);
        let mut v = 0.0;
        for l in 0..=self.l_max {
            v += self.get(l, 0) * table[tri(l, 0)];
            for m in 1..=l {
                let p = SQRT_2 * table[tri(l, m)];
                let mf = m as f64 * phi;
                v += p * (self.get(l, m as i64) * mf.cos() + self.get(l, -(m as i64)) * mf.sin());
            }
        }
        v
    }

    /// CSV with columns `l,m,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "l,m,value")?;
        for (l, m, c) in self.iter() {
            writeln!(w, "{l},{m},{c}")?;
        }
        Ok(())
    }
}

/// Diagonal operators on the sphere, applied by their eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereOperator {
    /// `Δ`, eigenvalue `-l(l+1)`.
    Laplacian,
    /// `Δ + 2`, eigenvalue `2 - l(l+1)`; kernel is `l = 1`.
    LaplacianPlusTwo,
    /// `Δ(Δ + 2)`, eigenvalue `l(l+1)(l(l+1) - 2)`; kernel is `l ∈ {0, 1}`.
    LaplacianTimesShifted,
}

impl SphereOperator {
    pub fn eigenvalue(self, l: usize) -> f64 {
        let ll = (l * (l + 1)) as f64;
        match self {
            SphereOperator::Laplacian => -ll,
            SphereOperator::LaplacianPlusTwo => 2.0 - ll,
            SphereOperator::LaplacianTimesShifted => ll * (ll - 2.0),
        }
    }
}

/// Multiplies each coefficient by the operator eigenvalue.
pub fn apply_operator(h: &HarmonicField, op: SphereOperator) -> HarmonicField {
    h.apply(op)
}

/// Point values of a field on a [`SphereGrid`], row-major in `(θ_i, φ_j)`.
#[derive(Debug, Clone)]
pub struct GridField {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "grid has {} points, got {} values",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SphereGrid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    /// Samples `f(θ, φ)`.
    pub fn from_fn(grid: Arc<SphereGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let (t, p) = grid.point(k);
                f(t, p)
            })
            .collect();
        Self { grid, values }
    }

    /// Samples `f(n)` where `n` is the unit vector in grid axes.
    pub fn from_unit_fn(grid: Arc<SphereGrid>, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = grid.unit_vectors().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Product-quadrature integral over the sphere.
    pub fn integrate(&self) -> f64 {
        let g = &self.grid;
        let mut total = 0.0;
        for i in 0..g.n_theta() {
            let row: f64 = self.values[i * g.n_phi()..(i + 1) * g.n_phi()].iter().sum();
            total += g.area_weight(i) * row;
        }
        total
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid)
            || (self.grid.n_theta() == other.grid.n_theta()
                && self.grid.n_phi() == other.grid.n_phi())
        {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "grid mismatch: {}x{} vs {}x{}",
                self.grid.n_theta(),
                self.grid.n_phi(),
                other.grid.n_theta(),
                other.grid.n_phi()
            )))
        }
    }

    /// CSV with columns `theta,phi,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "theta,phi,value")?;
        for (k, v) in self.values.iter().enumerate() {
            let (t, p) = self.grid.point(k);
            writeln!(w, "{t},{p},{v}")?;
        }
        Ok(())
    }
}

/// Integral of a grid field over the unit sphere.
pub fn integrate(field: &GridField) -> f64 {
    field.integrate()
}

/// Grid values to coefficients up to the grid band limit.
pub fn analyze(field: &GridField) -> HarmonicField {
    analyze_to(field, field.grid.l_max()).expect("grid band limit is always admissible")
}

/// Grid values to coefficients up to `l_max <= grid.l_max()`.
pub fn analyze_to(field: &GridField, l_max: usize) -> Result<HarmonicField> {
    let g = &*field.grid;
    if l_max > g.l_max() {
        return Err(Error::BandLimit(format!(
            "cannot analyze to l_max = {l_max} on a grid with band limit {}",
            g.l_max()
        )));
    }
    let n_phi = g.n_phi();
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut out = HarmonicField::zeros(l_max);
    let mut fc = vec![0.0; l_max + 1];
    let mut fs = vec![0.0; l_max + 1];
    for i in 0..g.n_theta() {
        let row = &field.values[i * n_phi..(i + 1) * n_phi];
        for m in 0..=l_max {
            let c = g.cos_row(m);
            let s = g.sin_row(m);
            let mut a = 0.0;
            let mut b = 0.0;
            for j in 0..n_phi {
                a += row[j] * c[j];
                b += row[j] * s[j];
            }
            fc[m] = a * dphi;
            fs[m] = b * dphi;
        }
        let w = g.weights()[i];
        let p = g.plm_row(i);
        for l in 0..=l_max {
            let base = l * l + l;
            out.coeffs[base] += w * p[tri(l, 0)] * fc[0];
            for m in 1..=l {
                let pw = SQRT_2 * w * p[tri(l, m)];
                out.coeffs[base + m] += pw * fc[m];
                out.coeffs[base - m] += pw * fs[m];
            }
        }
    }
    Ok(out)
}

/// Coefficients to grid values.
pub fn synthesize(h: &HarmonicField, grid: &Arc<SphereGrid>) -> Result<GridField> {
    let d = synthesize_derivatives(h, grid, false)?;
    Ok(d.value)
}

/// Pointwise partial derivatives of a synthesized field in coordinates.
pub(crate) struct Partials {
    pub value: GridField,
    pub d_theta: GridField,
    pub d_phi: GridField,
    pub d_theta_theta: GridField,
    pub d_theta_phi: GridField,
    pub d_phi_phi: GridField,
}

pub(crate) fn synthesize_derivatives(
    h: &HarmonicField,
    grid: &Arc<SphereGrid>,
    derivatives: bool,
) -> Result<Partials> {
    if h.l_max > grid.l_max() {
        return Err(Error::BandLimit(format!(
            "field band limit {} exceeds grid band limit {}",
            h.l_max,
            grid.l_max()
        )));
    }
    let g = &**grid;
    let lm = h.l_max;
    let n_phi = g.n_phi();
    let n = g.len();
    let mut v = vec![0.0; n];
    let (mut vt, mut vp, mut vtt, mut vtp, mut vpp) = if derivatives {
        (
            vec![0.0; n],
            vec![0.0; n],
            vec![0.0; n],
            vec![0.0; n],
            vec![0.0; n],
        )
    } else {
        (vec![], vec![], vec![], vec![], vec![])
    };
    // Per-row Legendre sums for value, θ-derivative and second θ-derivative,
    // for the cosine (c) and sine (s) families.
    let mut c0 = vec![0.0; lm + 1];
    let mut s0 = vec![0.0; lm + 1];
    let mut c1 = vec![0.0; lm + 1];
    let mut s1 = vec![0.0; lm + 1];
    let mut c2 = vec![0.0; lm + 1];
    let mut s2 = vec![0.0; lm + 1];
    for i in 0..g.n_theta() {
        let p = g.plm_row(i);
        let dp = g.dplm_row(i);
        let theta = g.thetas()[i];
        let (st, ct) = theta.sin_cos();
        let cot = ct / st;
        for m in 0..=lm {
            let (mut a0, mut b0, mut a1, mut b1, mut a2, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            let scale = if m == 0 { 1.0 } else { SQRT_2 };
            let mf = m as f64;
            for l in m..=lm {
                let ca = h.coeffs[l * l + l + m];
                let sa = if m == 0 { 0.0 } else { h.coeffs[l * l + l - m] };
                let pv = p[tri(l, m)];
                a0 += ca * pv;
                b0 += sa * pv;
                if derivatives {
                    let dv = dp[tri(l, m)];
                    // Associated Legendre equation solved for the second derivative.
                    let lf = l as f64;
                    let d2 = -cot * dv - (lf * (lf + 1.0) - mf * mf / (st * st)) * pv;
                    a1 += ca * dv;
                    b1 += sa * dv;
                    a2 += ca * d2;
                    b2 += sa * d2;
                }
            }
            c0[m] = scale * a0;
            s0[m] = scale * b0;
            c1[m] = scale * a1;
            s1[m] = scale * b1;
            c2[m] = scale * a2;
            s2[m] = scale * b2;
        }
        for j in 0..n_phi {
            let k = i * n_phi + j;
            let mut val = c0[0];
            let (mut t, mut pphi, mut tt, mut tp, mut pp) = (c1[0], 0.0, c2[0], 0.0, 0.0);
            for m in 1..=lm {
                let cm = g.cos_row(m)[j];
                let sm = g.sin_row(m)[j];
                let mf = m as f64;
                val += c0[m] * cm + s0[m] * sm;
                if derivatives {
                    t += c1[m] * cm + s1[m] * sm;
                    tt += c2[m] * cm + s2[m] * sm;
                    pphi += mf * (-c0[m] * sm + s0[m] * cm);
                    tp += mf * (-c1[m] * sm + s1[m] * cm);
                    pp += -mf * mf * (c0[m] * cm + s0[m] * sm);
                }
            }
            v[k] = val;
            if derivatives {
                vt[k] = t;
                vp[k] = pphi;
                vtt[k] = tt;
                vtp[k] = tp;
                vpp[k] = pp;
            }
        }
    }
    let mk = |values: Vec<f64>| GridField {
        grid: grid.clone(),
        values,
    };
    Ok(Partials {
        value: mk(v),
        d_theta: mk(vt),
        d_phi: mk(vp),
        d_theta_theta: mk(vtt),
        d_theta_phi: mk(vtp),
        d_phi_phi: mk(vpp),
    })
}
