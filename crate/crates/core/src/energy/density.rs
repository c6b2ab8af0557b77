use std::sync::Arc;

use crate::embedding::EmbeddingSolution;
use crate::error::{Error, Result};
use crate::sphere::{analyze, grad_hess_harmonic, synthesize, GridField, HarmonicField, SphereGrid, SphereOperator};

/// Pointwise pieces of the `1/d²` bracket of the mass density.
#[derive(Debug, Clone)]
pub struct RhoTerms {
    /// `|∇²N|²`
    pub hess_n_sq: GridField,
    /// `(Δ + 2)N`
    pub shifted_n: GridField,
    /// `ΔN`
    pub lap_n: GridField,
    /// `Δτ`
    pub lap_tau: GridField,
    /// `|∇τ|²`
    pub grad_tau_sq: GridField,
    /// `Δ|∇τ|²`
    pub lap_grad_tau_sq: GridField,
    /// `∇ᵃ∇ᵇ(τ_a τ_b)`, through `½Δ|∇τ|² + (Δτ)² + ∇τ·∇Δτ`.
    pub double_div: GridField,
}

/// Derivative terms of `τ` and `N` sampled on `grid`. The grid band limit
/// must be at least `2 l_max` so that `|∇τ|²` is resolved.
pub fn rho_terms(tau: &HarmonicField, n: &HarmonicField, grid: &Arc<SphereGrid>) -> Result<RhoTerms> {
    let l = tau.l_max().max(n.l_max());
    if grid.l_max() < 2 * l {
        return Err(Error::BandLimit(format!(
            "density needs a grid band limit >= {} (got {})",
            2 * l,
            grid.l_max()
        )));
    }
    let dn = grad_hess_harmonic(n, grid)?;
    let dt = grad_hess_harmonic(tau, grid)?;
    let dlt = grad_hess_harmonic(&tau.apply(SphereOperator::Laplacian), grid)?;
    let shifted_n = synthesize(&n.apply(SphereOperator::LaplacianPlusTwo), grid)?;
    let lap_grad_tau_sq = synthesize(&analyze(&dt.grad_norm_sq).apply(SphereOperator::Laplacian), grid)?;
    let k = grid.len();
    let mut dd = Vec::with_capacity(k);
    for p in 0..k {
        let lt = dt.laplacian.values()[p];
        let cross = dt.grad_theta.values()[p] * dlt.grad_theta.values()[p]
            + dt.grad_phi.values()[p] * dlt.grad_phi.values()[p];
        dd.push(0.5 * lap_grad_tau_sq.values()[p] + lt * lt + cross);
    }
    Ok(RhoTerms {
        hess_n_sq: dn.hess_norm_sq,
        shifted_n,
        lap_n: dn.laplacian,
        lap_tau: dt.laplacian,
        grad_tau_sq: dt.grad_norm_sq,
        lap_grad_tau_sq,
        double_div: GridField::new(grid.clone(), dd)?,
    })
}

impl RhoTerms {
    /// ```text
    /// ½|∇²N|² + ((Δ+2)N)² − ¼(ΔN)² − ¼(Δτ)² + ½[∇ᵃ∇ᵇ(τ_aτ_b) − |∇τ|² − Δ|∇τ|²]
    /// ```
    pub fn bracket(&self) -> GridField {
        let n = self.hess_n_sq.values().len();
        let v: Vec<f64> = (0..n)
            .map(|p| {
                let sn = self.shifted_n.values()[p];
                let ln = self.lap_n.values()[p];
                let lt = self.lap_tau.values()[p];
                0.5 * self.hess_n_sq.values()[p] + sn * sn - 0.25 * ln * ln - 0.25 * lt * lt
                    + 0.5
                        * (self.double_div.values()[p]
                            - self.grad_tau_sq.values()[p]
                            - self.lap_grad_tau_sq.values()[p])
            })
            .collect();
        GridField::new(self.hess_n_sq.grid().clone(), v).expect("sizes match grid")
    }
}

/// The `1/d²` block of the mass density, `(1/d²)·bracket`, on `grid`.
pub fn rho_bracket(emb: &EmbeddingSolution, grid: &Arc<SphereGrid>, d: f64) -> Result<GridField> {
    let t = rho_terms(&emb.tau, &emb.n_field, grid)?;
    Ok(t.bracket().scaled(1.0 / (d * d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::solve_harmonic;
    use crate::sphere::{double_divergence, SymmetricTensorField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(l: usize, seed: u64) -> HarmonicField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        HarmonicField::from_coeffs(l, (0..(l + 1) * (l + 1)).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn zero_fields_give_zero() {
        let emb = solve_harmonic(&HarmonicField::zeros(4), &HarmonicField::zeros(4));
        let grid = Arc::new(SphereGrid::new(8));
        assert_eq!(rho_bracket(&emb, &grid, 50.0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let emb = solve_harmonic(&random(4, 1), &random(4, 2));
        assert!(rho_bracket(&emb, &Arc::new(SphereGrid::new(7)), 50.0).is_err());
    }

    #[test]
    fn divergence_terms_integrate_to_zero() {
        for seed in 0..10 {
            let tau = random(6, seed);
            let grid = Arc::new(SphereGrid::new(12));
            let t = rho_terms(&tau, &HarmonicField::zeros(6), &grid).unwrap();
            let i = t.double_div.integrate() - t.lap_grad_tau_sq.integrate();
            let scale = t.lap_tau.mul(&t.lap_tau).unwrap().integrate();
            assert!(i.abs() < 1e-12 * scale, "{i}");
            assert!(t.lap_grad_tau_sq.integrate().abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn identity_agrees_with_direct_double_divergence() {
        let tau = random(3, 9);
        let grid = Arc::new(SphereGrid::new(12));
        let t = rho_terms(&tau, &HarmonicField::zeros(3), &grid).unwrap();
        let d = crate::sphere::grad_hess_harmonic(&tau, &grid).unwrap();
        let direct = double_divergence(&SymmetricTensorField::gradient_square(&d).unwrap()).unwrap();
        for (a, b) in t.double_div.values().iter().zip(direct.values()) {
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn xy_oracle() {
        // τ = xy with N = 0. Reference polynomials in ambient (x, y) from a
        // symbolic computation in (θ, φ) with the round-metric Christoffel
        // symbols, the double divergence taken directly on τ_a τ_b:
        //   |∇τ|²          = x² + y² − 4x²y²
        //   Δτ             = −6xy
        //   Δ|∇τ|²         = 4 − 14(x² + y²) + 80x²y²
        //   ∇ᵃ∇ᵇ(τ_aτ_b)   = 2 − 13(x² + y²) + 100x²y²
        //   bracket        = 3x²y² − 1
        let mut h = HarmonicField::zeros(2);
        h.set(2, -2, (4.0 * std::f64::consts::PI / 15.0).sqrt());
        let grid = Arc::new(SphereGrid::new(8));
        let t = rho_terms(&h, &HarmonicField::zeros(2), &grid).unwrap();
        let b = t.bracket();
        for (k, n) in grid.unit_vectors().enumerate() {
            let (x2, y2, xy) = (n[0] * n[0], n[1] * n[1], n[0] * n[1]);
            let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
            assert!(close(t.grad_tau_sq.values()[k], x2 + y2 - 4.0 * x2 * y2));
            assert!(close(t.lap_tau.values()[k], -6.0 * xy));
            assert!(close(t.lap_grad_tau_sq.values()[k], 4.0 - 14.0 * (x2 + y2) + 80.0 * x2 * y2));
            assert!(close(t.double_div.values()[k], 2.0 - 13.0 * (x2 + y2) + 100.0 * x2 * y2));
            assert!(close(b.values()[k], 3.0 * x2 * y2 - 1.0));
        }
    }
}
