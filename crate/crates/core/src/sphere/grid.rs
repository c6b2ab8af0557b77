use std::f64::consts::PI;

use super::legendre::{gauss_legendre, normalized_dtheta, normalized_table, tri_len};
use crate::error::{Error, Result};

/// Product grid on the unit sphere: Gauss-Legendre nodes in `cos θ` times a
/// uniform longitude grid.
///
/// A grid with band limit `l_max` reproduces the harmonic transform exactly
/// for fields of degree at most `l_max`, and integrates fields of degree at
/// most `2 l_max` exactly. Nodes are interior, so no grid point sits on a pole.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    n_theta: usize,
    n_phi: usize,
    l_max: usize,
    /// `cos θ_i`, ascending.
    cos_nodes: Vec<f64>,
    thetas: Vec<f64>,
    weights: Vec<f64>,
    phis: Vec<f64>,
    /// Normalized associated Legendre table per node, packed by `tri(l, m)`.
    plm: Vec<f64>,
    dplm: Vec<f64>,
    /// `cos(mφ_j)` and `sin(mφ_j)`, row per `m`.
    cos_mphi: Vec<f64>,
    sin_mphi: Vec<f64>,
}

impl SphereGrid {
    /// Smallest exact grid for band limit `l_max`: `l_max + 1` colatitudes and
    /// `2 l_max + 2` longitudes.
    pub fn new(l_max: usize) -> Self {
        Self::with_sizes(l_max + 1, 2 * l_max + 2, l_max).expect("minimal grid is always valid")
    }

    /// Grid with explicit node counts; fails if the counts cannot support
    /// exact transforms up to `l_max`.
    pub fn with_sizes(n_theta: usize, n_phi: usize, l_max: usize) -> Result<Self> {
        if n_theta < l_max + 1 || n_phi < 2 * l_max + 1 {
            return Err(Error::BandLimit(format!(
                "{n_theta}x{n_phi} grid cannot resolve l_max = {l_max} \
                 (needs n_theta >= {} and n_phi >= {})",
                l_max + 1,
                2 * l_max + 1
            )));
        }
        let (x, w) = gauss_legendre(n_theta)?;
        // Order colatitudes from the north pole: θ ascending ⇔ cos θ descending.
        let cos_nodes: Vec<f64> = x.into_iter().rev().collect();
        let weights: Vec<f64> = w.into_iter().rev().collect();
        let thetas: Vec<f64> = cos_nodes.iter().map(|c| c.acos()).collect();
        let phis: Vec<f64> = (0..n_phi)
            .map(|j| 2.0 * PI * j as f64 / n_phi as f64)
            .collect();

        let stride = tri_len(l_max);
        let mut plm = vec![0.0; n_theta * stride];
        let mut dplm = vec![0.0; n_theta * stride];
        for i in 0..n_theta {
            let (row, drow) = (
                &mut plm[i * stride..(i + 1) * stride],
                &mut dplm[i * stride..(i + 1) * stride],
            );
            normalized_table(l_max, cos_nodes[i], row);
            normalized_dtheta(l_max, thetas[i], row, drow);
        }
        let mut cos_mphi = vec![0.0; (l_max + 1) * n_phi];
        let mut sin_mphi = vec![0.0; (l_max + 1) * n_phi];
        for m in 0..=l_max {
            for (j, &p) in phis.iter().enumerate() {
                cos_mphi[m * n_phi + j] = (m as f64 * p).cos();
                sin_mphi[m * n_phi + j] = (m as f64 * p).sin();
            }
        }
        Ok(Self {
            n_theta,
            n_phi,
            l_max,
            cos_nodes,
            thetas,
            weights,
            phis,
            plm,
            dplm,
            cos_mphi,
            sin_mphi,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Colatitudes, ordered from the north pole.
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn cos_nodes(&self) -> &[f64] {
        &self.cos_nodes
    }

    /// Gauss-Legendre weights in `cos θ`; they sum to 2.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    /// Quadrature weight of grid point `(i, j)` for `dΩ`.
    #[inline]
    pub fn area_weight(&self, i: usize) -> f64 {
        self.weights[i] * 2.0 * PI / self.n_phi as f64
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_phi + j
    }

    /// `(θ, φ)` of flat index `k`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        (self.thetas[k / self.n_phi], self.phis[k % self.n_phi])
    }

    /// Unit vector of flat index `k` in the grid's own Cartesian axes.
    pub fn unit_vector(&self, k: usize) -> [f64; 3] {
        let (t, p) = self.point(k);
        let s = t.sin();
        [s * p.cos(), s * p.sin(), t.cos()]
    }

    /// Iterator over all unit vectors, row-major.
    pub fn unit_vectors(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        (0..self.len()).map(|k| self.unit_vector(k))
    }

    #[inline]
    pub(crate) fn plm_row(&self, i: usize) -> &[f64] {
        let stride = tri_len(self.l_max);
        &self.plm[i * stride..(i + 1) * stride]
    }

    #[inline]
    pub(crate) fn dplm_row(&self, i: usize) -> &[f64] {
        let stride = tri_len(self.l_max);
        &self.dplm[i * stride..(i + 1) * stride]
    }

    #[inline]
    pub(crate) fn cos_row(&self, m: usize) -> &[f64] {
        &self.cos_mphi[m * self.n_phi..(m + 1) * self.n_phi]
    }

    #[inline]
    pub(crate) fn sin_row(&self, m: usize) -> &[f64] {
        &self.sin_mphi[m * self.n_phi..(m + 1) * self.n_phi]
    }
}
