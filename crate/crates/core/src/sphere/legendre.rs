//! Legendre polynomials, associated Legendre functions and Gauss-Legendre
//! quadrature.
//!
//! All recurrences here are the standard upward three-term recurrences in
//! the degree, which are stable for `|x| <= 1`. Associated functions are
//! computed without the Condon-Shortley phase.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are returned in ascending order. The rule integrates polynomials of
/// degree `2n - 1` exactly.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Gauss-Legendre rule needs at least one node".into(),
        ));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi's initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// `(P_n(x), P_n'(x))` by upward recurrence; valid for `|x| < 1`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomial `P_ell(x)`.
pub fn legendre_p(ell: usize, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("Legendre argument {x} outside [-1, 1]")));
    }
    Ok(assoc_legendre(ell, 0, x))
}

/// `d/dθ P_ell(cos θ)`, equal to `-P_ell^1(cos θ)`.
pub fn legendre_p_dtheta(ell: usize, theta: f64) -> f64 {
    if ell == 0 {
        return 0.0;
    }
    -assoc_legendre(ell, 1, theta.cos())
}

/// Unnormalized associated Legendre function `P_ell^m(x)`, no Condon-Shortley
/// phase: `P_ell^m = (1 - x^2)^{m/2} d^m P_ell / dx^m`. Returns zero for `m > ell`.
pub fn assoc_legendre(ell: usize, m: usize, x: f64) -> f64 {
    assoc_legendre_sc(ell, m, x, ((1.0 - x) * (1.0 + x)).max(0.0).sqrt())
}

/// As [`assoc_legendre`] with `s = sin θ` supplied, which keeps full relative
/// precision near the poles.
fn assoc_legendre_sc(ell: usize, m: usize, x: f64, s: f64) -> f64 {
    if m > ell {
        return 0.0;
    }
    // P_m^m = (2m-1)!! s^m
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64 * s;
    }
    if ell == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p = x * (2 * m + 1) as f64 * pmm;
    for l in (m + 2)..=ell {
        let lf = l as f64;
        let mf = m as f64;
        let next = ((2.0 * lf - 1.0) * x * p - (lf - 1.0 + mf) * p_prev) / (lf - mf);
        p_prev = p;
        p = next;
    }
    p
}

/// Angular factor `C(θ) = sin θ d/dθ[(1/sin θ) dP_ell(cos θ)/dθ]`.
///
/// The bracket reduces to `sin²θ P_ell''(cos θ) = P_ell^2(cos θ)`, so the
/// value comes straight from the `m = 2` associated recurrence and vanishes at
/// both poles.
pub fn c_theta(ell: usize, theta: f64) -> Result<f64> {
    if ell < 2 {
        return Err(Error::InvalidArgument(format!(
            "angular factor needs ell >= 2, got {ell}"
        )));
    }
    let (s, x) = theta.sin_cos();
    Ok(assoc_legendre_sc(ell, 2, x, s))
}

/// `C(θ) / sin θ = sin θ · P_ell''(cos θ)`, finite at the poles.
pub fn c_theta_over_sin(ell: usize, theta: f64) -> Result<f64> {
    if ell < 2 {
        return Err(Error::InvalidArgument(format!(
            "angular factor needs ell >= 2, got {ell}"
        )));
    }
    let (s, x) = theta.sin_cos();
    // The m = 2 recurrence seeded with s = 1 yields P_ell''(x) itself.
    Ok(s * assoc_legendre_sc(ell, 2, x, 1.0))
}

/// `d²P_ell/dx²`.
pub fn legendre_p_dd(ell: usize, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("Legendre argument {x} outside [-1, 1]")));
    }
    Ok(assoc_legendre_sc(ell, 2, x, 1.0))
}

/// Fully normalized associated Legendre values `P̄_ell^m(x)` for
/// `0 <= m <= ell <= l_max`, packed as `ell*(ell+1)/2 + m`.
///
/// Normalization: `∫_{S²} (P̄_ell^m(cos θ))² · trig² dΩ = 1` once combined with
/// `√2 cos mφ` / `√2 sin mφ` for `m > 0`.
pub(crate) fn normalized_table(l_max: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() >= tri_len(l_max));
    let s = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    out[0] = 0.5 / PI.sqrt();
    for m in 0..=l_max {
        if m > 0 {
            let prev = out[tri(m - 1, m - 1)];
            let mf = m as f64;
            out[tri(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * prev;
        }
        if m < l_max {
            out[tri(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * out[tri(m, m)];
        }
        for l in (m + 2)..=l_max {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            out[tri(l, m)] = a * (x * out[tri(l - 1, m)] - b * out[tri(l - 2, m)]);
        }
    }
}

/// θ-derivatives of the normalized table, given the table itself and `θ`.
/// Uses `sin θ dP̄_ell^m/dθ = ell x P̄_ell^m − sqrt((2ell+1)(ell²−m²)/(2ell−1)) P̄_{ell−1}^m`.
pub(crate) fn normalized_dtheta(l_max: usize, theta: f64, table: &[f64], out: &mut [f64]) {
    let x = theta.cos();
    let s = theta.sin();
    for l in 0..=l_max {
        for m in 0..=l {
            let lf = l as f64;
            let mf = m as f64;
            let lower = if l > m {
                ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt()
                    * table[tri(l - 1, m)]
            } else {
                0.0
            };
            out[tri(l, m)] = (lf * x * table[tri(l, m)] - lower) / s;
        }
    }
}

#[inline]
pub(crate) fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

#[inline]
pub(crate) fn tri_len(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 2) / 2
}
