//! Linearized optimal embedding equations for the time component `τ` and
//! the radial component `N` of a unit sphere at distance `d`:
//!
//! ```text
//! Δ(Δ + 2) τ = [−A″(1 − Z₁²) + 6A′Z₁ + 12A] Z₂Z₃
//!   (Δ + 2) N = (A″ − 2A′Z₁ + 4A) Z₂Z₃
//! ```
//!
//! with `A`, `A′`, `A″` evaluated at the areal radius of each surface point.
//! Both operators are diagonal in spherical harmonics, so the solve is a
//! coefficientwise division. Their kernels (`l ≤ 1` for `Δ(Δ + 2)`, `l = 1`
//! for `Δ + 2`) are projected out of the sources and reported, never inverted.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{BackgroundParams, RadialProfile};
use crate::sphere::{analyze_to, Frame, GridField, HarmonicField, SphereGrid, SphereOperator};

/// Rule for the areal radius `r` of a point on the unit sphere with
/// `Z₁ = cos` of its angle from the centre direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Substitution {
    /// `r² = d² + 2dZ₁ + 1`, the distance from the origin of `d + n̂`.
    #[default]
    Exact,
    /// `r² = d² + 2Z₁ + 1`.
    /// It drops a factor `d` on the cross term, so it only agrees with
    /// [`Substitution::Exact`] to leading order in `1/d`.
    Unscaled,
}

/// The surface `Σ_{t,d}`: unit sphere centred at distance `d` in direction
/// `(θ_d, φ_d)` on the slice of constant Schwarzschild time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub t: f64,
    pub d: f64,
    pub theta_d: f64,
    pub phi_d: f64,
    #[serde(default)]
    pub substitution: Substitution,
}

impl SurfaceSpec {
    /// Surface at `t = 0` centred on the equatorial plane, `θ_d = π/2`, `φ_d = 0`.
    pub fn new(d: f64) -> Self {
        Self {
            t: 0.0,
            d,
            theta_d: std::f64::consts::FRAC_PI_2,
            phi_d: 0.0,
            substitution: Substitution::Exact,
        }
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn with_direction(mut self, theta_d: f64, phi_d: f64) -> Self {
        self.theta_d = theta_d;
        self.phi_d = phi_d;
        self
    }

    pub fn with_substitution(mut self, s: Substitution) -> Self {
        self.substitution = s;
        self
    }

    /// Checks that the whole surface lies outside the horizon.
    pub fn validate(&self, bg: &BackgroundParams) -> Result<()> {
        if !(self.d > bg.horizon() + 1.0) || !self.d.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "centre distance {} must exceed 2m + 1 = {}",
                self.d,
                bg.horizon() + 1.0
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.theta_d) {
            return Err(Error::InvalidArgument(format!(
                "theta_d = {} must lie in [0, pi]",
                self.theta_d
            )));
        }
        Ok(())
    }

    /// Areal radius at a surface point with first eigenfunction value `z1`.
    pub fn radius(&self, z1: f64) -> f64 {
        let d = self.d;
        match self.substitution {
            Substitution::Exact => (d * d + 2.0 * d * z1 + 1.0).sqrt(),
            Substitution::Unscaled => (d * d + 2.0 * z1 + 1.0).sqrt(),
        }
    }

    /// Smallest and largest radius met on the surface.
    pub fn radius_range(&self) -> (f64, f64) {
        (self.radius(-1.0), self.radius(1.0))
    }

    /// Unit vector toward the centre.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta_d.sin_cos();
        let (sp, cp) = self.phi_d.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Right-hand sides of the two equations on a grid.
#[derive(Debug, Clone)]
pub struct Sources {
    pub s_tau: GridField,
    pub s_n: GridField,
}

/// Evaluates both sources pointwise on `grid`, with `(Z₁, Z₂, Z₃)` bound by
/// `frame`.
pub fn build_sources(
    a: &dyn RadialProfile,
    spec: &SurfaceSpec,
    grid: &Arc<SphereGrid>,
    frame: &Frame,
) -> Result<Sources> {
    let (need_lo, need_hi) = spec.radius_range();
    let (lo, hi) = a.r_range();
    let slack = 1e-12 * need_hi;
    if need_lo < lo - slack || need_hi > hi + slack {
        return Err(Error::Coverage {
            what: "A(r) profile over the surface",
            value: if need_lo < lo - slack { need_lo } else { need_hi },
            lo,
            hi,
        });
    }
    let n = grid.len();
    let mut st = Vec::with_capacity(n);
    let mut sn = Vec::with_capacity(n);
    for k in 0..n {
        let [z1, z2, z3] = frame.coordinates(grid.unit_vector(k));
        let p = a.eval(spec.radius(z1).clamp(lo, hi))?;
        let ang = z2 * z3;
        st.push((-p.dda * (1.0 - z1 * z1) + 6.0 * p.da * z1 + 12.0 * p.a) * ang);
        sn.push((p.dda - 2.0 * p.da * z1 + 4.0 * p.a) * ang);
    }
    Ok(Sources {
        s_tau: GridField::new(grid.clone(), st)?,
        s_n: GridField::new(grid.clone(), sn)?,
    })
}

/// `(τ, N)` and the diagnostics of the spectral solve.
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingSolution {
    #[serde(serialize_with = "ser_coeffs")]
    pub tau: HarmonicField,
    #[serde(serialize_with = "ser_coeffs")]
    pub n_field: HarmonicField,
    /// `l = 0` and `l = 1` norms of the `τ` source.
    pub kernel_residual_tau: [f64; 2],
    /// `l = 1` norm of the `N` source.
    pub kernel_residual_n: f64,
    pub source_norm_tau: f64,
    pub source_norm_n: f64,
    /// Relative residual of the back-substituted equations on `l ≥ 2`.
    pub equation_residual: f64,
    pub warnings: Vec<String>,
}

fn ser_coeffs<S: serde::Serializer>(h: &HarmonicField, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(h.coeffs().len()))?;
    for (l, m, v) in h.iter() {
        seq.serialize_element(&(l, m, v))?;
    }
    seq.end()
}

/// Threshold on kernel residual / source norm above which a warning is raised.
pub const SOLVABILITY_TOL: f64 = 1e-8;

impl EmbeddingSolution {
    /// Largest kernel residual relative to its source norm.
    pub fn relative_kernel_residual(&self) -> f64 {
        let rel = |v: f64, n: f64| if n > 0.0 { v / n } else { v };
        rel(self.kernel_residual_tau[0], self.source_norm_tau)
            .max(rel(self.kernel_residual_tau[1], self.source_norm_tau))
            .max(rel(self.kernel_residual_n, self.source_norm_n))
    }

    pub fn l_max(&self) -> usize {
        self.tau.l_max()
    }
}

/// Solves both equations at the band limit of the source grid.
pub fn solve_embedding(s_tau: &GridField, s_n: &GridField) -> Result<EmbeddingSolution> {
    solve_embedding_to(s_tau, s_n, s_tau.grid().l_max())
}

/// Solves both equations keeping degrees up to `l_max`. Analysing on a finer
/// grid than `l_max` keeps aliasing of the non-band-limited sources out of
/// the retained degrees.
pub fn solve_embedding_to(s_tau: &GridField, s_n: &GridField, l_max: usize) -> Result<EmbeddingSolution> {
    s_tau.check_same_grid(s_n)?;
    let ht = analyze_to(s_tau, l_max)?;
    let hn = analyze_to(s_n, l_max)?;
    Ok(solve_harmonic(&ht, &hn))
}

/// Spectral solve from source coefficients.
pub fn solve_harmonic(s_tau: &HarmonicField, s_n: &HarmonicField) -> EmbeddingSolution {
    let op_t = SphereOperator::LaplacianTimesShifted;
    let op_n = SphereOperator::LaplacianPlusTwo;
    let tau = s_tau.map_degrees(|l| if l >= 2 { 1.0 / op_t.eigenvalue(l) } else { 0.0 });
    let n_field = s_n.map_degrees(|l| if l != 1 { 1.0 / op_n.eigenvalue(l) } else { 0.0 });

    let kt = [s_tau.degree_norm(0), s_tau.degree_norm(1)];
    let kn = s_n.degree_norm(1);
    let (nt, nn) = (s_tau.norm(), s_n.norm());

    let back_t = tau.apply(op_t);
    let back_n = n_field.apply(op_n);
    let mut res_t = 0.0;
    let mut res_n = 0.0;
    for ((l, _, b), (_, _, s)) in back_t.iter().zip(s_tau.iter()) {
        if l >= 2 {
            res_t += (b - s) * (b - s);
        }
    }
    for ((l, _, b), (_, _, s)) in back_n.iter().zip(s_n.iter()) {
        if l != 1 {
            res_n += (b - s) * (b - s);
        }
    }
    let rel = |r: f64, n: f64| if n > 0.0 { r.sqrt() / n } else { r.sqrt() };
    let equation_residual = rel(res_t, nt).max(rel(res_n, nn));

    let mut sol = EmbeddingSolution {
        tau,
        n_field,
        kernel_residual_tau: kt,
        kernel_residual_n: kn,
        source_norm_tau: nt,
        source_norm_n: nn,
        equation_residual,
        warnings: Vec::new(),
    };
    let worst = sol.relative_kernel_residual();
    if worst > SOLVABILITY_TOL {
        sol.warnings.push(format!(
            "source has kernel component {worst:e} relative to its norm; \
             the equations are not solvable as posed (check the frame binding)"
        ));
    }
    sol
}

/// Builds the sources on a grid of band limit `2 l_max` and solves, keeping
/// degrees up to `l_max`.
pub fn embed(
    a: &dyn RadialProfile,
    spec: &SurfaceSpec,
    l_max: usize,
    frame: &Frame,
) -> Result<EmbeddingSolution> {
    let fine = Arc::new(SphereGrid::new(2 * l_max));
    let src = build_sources(a, spec, &fine, frame)?;
    solve_embedding_to(&src.s_tau, &src.s_n, l_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{ConstantProfile, ProfileValues};
    use proptest::prelude::*;

    /// `A = r^-k`.
    struct PowerProfile(f64);

    impl RadialProfile for PowerProfile {
        fn eval(&self, r: f64) -> Result<ProfileValues> {
            let k = self.0;
            Ok(ProfileValues {
                a: r.powf(-k),
                da: -k * r.powf(-k - 1.0),
                dda: k * (k + 1.0) * r.powf(-k - 2.0),
            })
        }

        fn r_range(&self) -> (f64, f64) {
            (1.0, f64::INFINITY)
        }
    }

    fn z2z3(l_max: usize) -> HarmonicField {
        // xy = √(4π/15) Y_{2,-2}
        let mut h = HarmonicField::zeros(l_max);
        h.set(2, -2, (4.0 * std::f64::consts::PI / 15.0).sqrt());
        h
    }

    #[test]
    fn constant_profile_sources() {
        let grid = Arc::new(SphereGrid::new(8));
        let c = 0.7;
        let src = build_sources(&ConstantProfile(c), &SurfaceSpec::new(50.0), &grid, &Frame::default()).unwrap();
        let f = Frame::default();
        for k in 0..grid.len() {
            let [_, z2, z3] = f.coordinates(grid.unit_vector(k));
            assert!((src.s_tau.values()[k] - 12.0 * c * z2 * z3).abs() < 1e-15);
            assert!((src.s_n.values()[k] - 4.0 * c * z2 * z3).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_profile_solution() {
        let c = 1.3;
        let sol = embed(&ConstantProfile(c), &SurfaceSpec::new(60.0), 12, &Frame::default()).unwrap();
        let want_tau = z2z3(12).scaled(c / 2.0);
        let want_n = z2z3(12).scaled(-c);
        for ((_, _, a), (_, _, b)) in sol.tau.iter().zip(want_tau.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        for ((_, _, a), (_, _, b)) in sol.n_field.iter().zip(want_n.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(sol.relative_kernel_residual() < 1e-14);
        assert!(sol.warnings.is_empty());
    }

    #[test]
    fn sources_vanish_where_z2_does_and_are_odd() {
        let spec = SurfaceSpec::new(40.0);
        let a = PowerProfile(1.0);
        let f = Frame::default();
        let [e1, e2, e3] = f.axes();
        let src_at = |n: [f64; 3]| {
            let [z1, z2, z3] = f.coordinates(n);
            let p = a.eval(spec.radius(z1)).unwrap();
            let ang = z2 * z3;
            (
                (-p.dda * (1.0 - z1 * z1) + 6.0 * p.da * z1 + 12.0 * p.a) * ang,
                (p.dda - 2.0 * p.da * z1 + 4.0 * p.a) * ang,
            )
        };
        let n = |a: f64, b: f64, c: f64| {
            let l = (a * a + b * b + c * c).sqrt();
            [0, 1, 2].map(|i| (a * e1[i] + b * e2[i] + c * e3[i]) / l)
        };
        assert_eq!(src_at(n(0.3, 0.0, 0.8)), (0.0, 0.0));
        let p = src_at(n(0.3, 0.5, 0.8));
        let q = src_at(n(0.3, 0.5, -0.8));
        assert!((p.0 + q.0).abs() < 1e-15 && (p.1 + q.1).abs() < 1e-15);
        // The grid builder agrees with the pointwise formula.
        let grid = Arc::new(SphereGrid::new(6));
        let src = build_sources(&a, &spec, &grid, &f).unwrap();
        for k in 0..grid.len() {
            let (t, nn) = src_at(grid.unit_vector(k));
            assert!((src.s_tau.values()[k] - t).abs() < 1e-15);
            assert!((src.s_n.values()[k] - nn).abs() < 1e-15);
        }
    }

    #[test]
    fn coverage_is_checked() {
        struct Short;
        impl RadialProfile for Short {
            fn eval(&self, _: f64) -> Result<ProfileValues> {
                Ok(ProfileValues { a: 1.0, da: 0.0, dda: 0.0 })
            }
            fn r_range(&self) -> (f64, f64) {
                (10.0, 50.0)
            }
        }
        let grid = Arc::new(SphereGrid::new(4));
        let r = build_sources(&Short, &SurfaceSpec::new(49.5), &grid, &Frame::default());
        assert!(matches!(r, Err(Error::Coverage { .. })));
        assert!(build_sources(&Short, &SurfaceSpec::new(30.0), &grid, &Frame::default()).is_ok());
    }

    #[test]
    fn zero_sources_give_zero() {
        let sol = solve_harmonic(&HarmonicField::zeros(6), &HarmonicField::zeros(6));
        assert!(sol.tau.coeffs().iter().chain(sol.n_field.coeffs()).all(|&c| c == 0.0));
        assert_eq!(sol.relative_kernel_residual(), 0.0);
        assert_eq!(sol.equation_residual, 0.0);
    }

    #[test]
    fn kernel_components_are_reported_not_inverted() {
        let mut s = HarmonicField::zeros(4);
        s.set(0, 0, 1.0);
        s.set(1, 1, 2.0);
        s.set(3, 2, 1.0);
        let sol = solve_harmonic(&s, &s);
        assert_eq!(sol.tau.get(0, 0), 0.0);
        assert_eq!(sol.tau.get(1, 1), 0.0);
        assert_eq!(sol.n_field.get(1, 1), 0.0);
        // N keeps its l = 0 part: (Δ + 2) has eigenvalue 2 there.
        assert_eq!(sol.n_field.get(0, 0), 0.5);
        assert_eq!(sol.kernel_residual_tau, [1.0, 2.0]);
        assert_eq!(sol.kernel_residual_n, 2.0);
        assert_eq!(sol.warnings.len(), 1);
    }

    #[test]
    fn axial_kernel_residual_is_at_roundoff() {
        for &d in &[20.0, 40.0, 80.0] {
            let sol = embed(&PowerProfile(1.0), &SurfaceSpec::new(d), 16, &Frame::default()).unwrap();
            assert!(sol.relative_kernel_residual() < 1e-14, "d = {d}");
        }
    }

    #[test]
    fn substitutions_differ_at_order_one_over_d_for_slow_profiles() {
        let rel = |d: f64| {
            let e = embed(&PowerProfile(1.0), &SurfaceSpec::new(d), 12, &Frame::default()).unwrap();
            let p = embed(
                &PowerProfile(1.0),
                &SurfaceSpec::new(d).with_substitution(Substitution::Unscaled),
                12,
                &Frame::default(),
            )
            .unwrap();
            let diff: f64 = e
                .tau
                .coeffs()
                .iter()
                .zip(p.tau.coeffs())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            diff / e.tau.norm()
        };
        let ratio = rel(50.0) / rel(100.0);
        assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn back_substitution_and_linearity(seed in any::<u64>(), scale in -5.0f64..5.0) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let l_max = 10;
            let n = (l_max + 1) * (l_max + 1);
            let st = HarmonicField::from_coeffs(l_max, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let sn = HarmonicField::from_coeffs(l_max, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let sol = solve_harmonic(&st, &sn);
            prop_assert!(sol.equation_residual < 1e-14);
            for (l, m, v) in sol.tau.apply(SphereOperator::LaplacianTimesShifted).iter() {
                if l >= 2 {
                    prop_assert!((v - st.get(l, m)).abs() <= 1e-12 * st.norm());
                }
            }
            let scaled = solve_harmonic(&st.scaled(scale), &sn.scaled(scale));
            for (a, b) in scaled.tau.coeffs().iter().zip(sol.tau.coeffs()) {
                prop_assert!((a - scale * b).abs() <= 1e-15 * (1.0 + b.abs()));
            }
        }
    }
}
