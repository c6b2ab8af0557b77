//! Covariant derivatives on the round unit sphere.
//!
//! Derivatives are taken analytically on the harmonic expansion and then
//! sampled, so they are exact at grid points for band-limited input. Vector
//! and tensor components are reported in the orthonormal frame
//! `(e_θ, e_φ)`:
//!
//! ```text
//! ∇_θ̂ f   = f_θ                      ∇_φ̂ f   = f_φ / sin θ
//! H_θ̂θ̂    = f_θθ
//! H_θ̂φ̂    = (f_θφ − cot θ f_φ) / sin θ
//! H_φ̂φ̂    = f_φφ / sin²θ + cot θ f_θ
//! ```

use std::sync::Arc;

use super::grid::SphereGrid;
use super::harmonics::{analyze, synthesize_derivatives, GridField, HarmonicField};
use crate::error::Result;

/// First and second covariant derivatives of a scalar field.
#[derive(Debug, Clone)]
pub struct GradHess {
    pub grad_theta: GridField,
    pub grad_phi: GridField,
    pub hess_theta_theta: GridField,
    pub hess_theta_phi: GridField,
    pub hess_phi_phi: GridField,
    /// `|∇f|²`
    pub grad_norm_sq: GridField,
    /// `|∇²f|²`
    pub hess_norm_sq: GridField,
    /// `Δf`
    pub laplacian: GridField,
}

/// Derivatives of a grid field, analysed at the grid band limit.
pub fn grad_hess(field: &GridField) -> Result<GradHess> {
    let h = analyze(field);
    grad_hess_harmonic(&h, field.grid())
}

/// Derivatives of a coefficient field sampled on `grid`.
pub fn grad_hess_harmonic(h: &HarmonicField, grid: &Arc<SphereGrid>) -> Result<GradHess> {
    let p = synthesize_derivatives(h, grid, true)?;
    let n = grid.len();
    let mut gt = vec![0.0; n];
    let mut gp = vec![0.0; n];
    let mut htt = vec![0.0; n];
    let mut htp = vec![0.0; n];
    let mut hpp = vec![0.0; n];
    let mut g2 = vec![0.0; n];
    let mut h2 = vec![0.0; n];
    let mut lap = vec![0.0; n];
    for k in 0..n {
        let (theta, _) = grid.point(k);
        let (s, c) = theta.sin_cos();
        let cot = c / s;
        let ft = p.d_theta.values()[k];
        let fp = p.d_phi.values()[k];
        gt[k] = ft;
        gp[k] = fp / s;
        htt[k] = p.d_theta_theta.values()[k];
        htp[k] = (p.d_theta_phi.values()[k] - cot * fp) / s;
        hpp[k] = p.d_phi_phi.values()[k] / (s * s) + cot * ft;
        g2[k] = gt[k] * gt[k] + gp[k] * gp[k];
        h2[k] = htt[k] * htt[k] + 2.0 * htp[k] * htp[k] + hpp[k] * hpp[k];
        lap[k] = htt[k] + hpp[k];
    }
    let mk = |v| GridField::new(grid.clone(), v).expect("sizes match grid");
    Ok(GradHess {
        grad_theta: mk(gt),
        grad_phi: mk(gp),
        hess_theta_theta: mk(htt),
        hess_theta_phi: mk(htp),
        hess_phi_phi: mk(hpp),
        grad_norm_sq: mk(g2),
        hess_norm_sq: mk(h2),
        laplacian: mk(lap),
    })
}

/// Gradient of a grid field as ambient Cartesian components (grid axes).
pub fn ambient_gradient(field: &GridField) -> Result<[GridField; 3]> {
    let h = analyze(field);
    let p = synthesize_derivatives(&h, field.grid(), true)?;
    let grid = field.grid();
    let n = grid.len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for k in 0..n {
        let (theta, phi) = grid.point(k);
        let (e_t, e_p) = frame_vectors(theta, phi);
        let gt = p.d_theta.values()[k];
        let gp = p.d_phi.values()[k] / theta.sin();
        for a in 0..3 {
            out[a][k] = gt * e_t[a] + gp * e_p[a];
        }
    }
    let [x, y, z] = out;
    let mk = |v| GridField::new(grid.clone(), v).expect("sizes match grid");
    Ok([mk(x), mk(y), mk(z)])
}

/// `(e_θ, e_φ)` in grid Cartesian axes.
pub(crate) fn frame_vectors(theta: f64, phi: f64) -> ([f64; 3], [f64; 3]) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    ([ct * cp, ct * sp, -st], [-sp, cp, 0.0])
}

/// Symmetric tangent 2-tensor in orthonormal-frame components.
#[derive(Debug, Clone)]
pub struct SymmetricTensorField {
    pub theta_theta: GridField,
    pub theta_phi: GridField,
    pub phi_phi: GridField,
}

impl SymmetricTensorField {
    /// `∇f ⊗ ∇f` from a [`GradHess`].
    pub fn gradient_square(d: &GradHess) -> Result<Self> {
        Ok(Self {
            theta_theta: d.grad_theta.mul(&d.grad_theta)?,
            theta_phi: d.grad_theta.mul(&d.grad_phi)?,
            phi_phi: d.grad_phi.mul(&d.grad_phi)?,
        })
    }
}

/// Double divergence `∇^a ∇^b T_ab` of a symmetric tangent tensor.
///
/// The tensor is lifted to ambient Cartesian components, which are smooth
/// scalar functions on the sphere. For a tangent vector field `V`,
/// `div V = Σ_i (∇V_i)_i`, and the divergence of a tangent tensor is
/// `(div T)_i = P_ik Σ_j (∇T_kj)_j` with `P = I − n nᵀ`. Every intermediate
/// is analysed on the tensor's grid, so the grid band limit must cover the
/// degree of the ambient components plus five (two for the projector, one
/// per differentiation and lift).
pub fn double_divergence(t: &SymmetricTensorField) -> Result<GridField> {
    t.theta_theta.check_same_grid(&t.theta_phi)?;
    t.theta_theta.check_same_grid(&t.phi_phi)?;
    let grid = t.theta_theta.grid().clone();
    let n = grid.len();
    // Ambient components T_ij.
    let mut amb = vec![vec![0.0; n]; 9];
    for k in 0..n {
        let (theta, phi) = grid.point(k);
        let (et, ep) = frame_vectors(theta, phi);
        let tt = t.theta_theta.values()[k];
        let tp = t.theta_phi.values()[k];
        let pp = t.phi_phi.values()[k];
        for i in 0..3 {
            for j in 0..3 {
                amb[3 * i + j][k] = tt * et[i] * et[j]
                    + tp * (et[i] * ep[j] + ep[i] * et[j])
                    + pp * ep[i] * ep[j];
            }
        }
    }
    let mk = |v: Vec<f64>| GridField::new(grid.clone(), v).expect("sizes match grid");
    // w_k = Σ_j (∇T_kj)_j
    let mut w = vec![vec![0.0; n]; 3];
    for kk in 0..3 {
        for j in 0..3 {
            let g = ambient_gradient(&mk(amb[3 * kk + j].clone()))?;
            for (p, v) in g[j].values().iter().enumerate() {
                w[kk][p] += v;
            }
        }
    }
    // V = P w
    let mut v = vec![vec![0.0; n]; 3];
    for (p, nv) in grid.unit_vectors().enumerate() {
        let dot = nv[0] * w[0][p] + nv[1] * w[1][p] + nv[2] * w[2][p];
        for i in 0..3 {
            v[i][p] = w[i][p] - nv[i] * dot;
        }
    }
    let mut out = vec![0.0; n];
    for (i, vi) in v.into_iter().enumerate() {
        let g = ambient_gradient(&mk(vi))?;
        for (p, val) in g[i].values().iter().enumerate() {
            out[p] += val;
        }
    }
    Ok(mk(out))
}
