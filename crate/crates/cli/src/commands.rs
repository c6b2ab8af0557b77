use serde_json::{json, Value};

use quasilocal::embedding::{embed, EmbeddingSolution, SurfaceSpec};
use quasilocal::energy::{
    assemble_energy, c_factor, energy_coefficients, energy_sweep, fit_powers, loop_integral, loop_integral_harmonic,
    LoopIntegral, LoopSpec, SweepSpec,
};
use quasilocal::geometry::{axial_preset, surface_geometry, GeometryReport, GeometryResolution, PerturbationProfiles};
use quasilocal::radial::{
    a_profile, integrate_wave, tortoise, AProfile, AxialMode, BackgroundParams, Boundary, IntegrationOptions, Mode,
    PolarMode, RadialProfile, RadialSolution, StepControl,
};
use quasilocal::sphere::{Frame, HarmonicField};

use crate::config::{BoundaryConfig, LoopField, ModeKindConfig, PerturbationConfig, ScenarioConfig};
use crate::svg::{Plot, Series};
use crate::{Artifacts, RunError};

/// Radial margin kept around the surfaces when integrating a profile.
const MARGIN: f64 = 1.5;

fn background(cfg: &ScenarioConfig) -> Result<BackgroundParams, RunError> {
    Ok(BackgroundParams::new(cfg.background.m)?)
}

fn axial_mode(cfg: &ScenarioConfig) -> Result<AxialMode, RunError> {
    if cfg.mode.kind != ModeKindConfig::Axial {
        return Err(RunError::Config("this subcommand needs an axial mode".into()));
    }
    let mut m = AxialMode::new(cfg.mode.ell, cfg.mode.sigma)?.with_amplitude(cfg.mode.amplitude);
    if let Some(mu) = cfg.mode.mu_sq {
        m = m.with_mu_sq(mu)?;
    }
    Ok(m)
}

fn mode(cfg: &ScenarioConfig) -> Result<Mode, RunError> {
    match cfg.mode.kind {
        ModeKindConfig::Axial => Ok(Mode::Axial(axial_mode(cfg)?)),
        ModeKindConfig::Polar => {
            let p = match cfg.mode.n {
                Some(n) => PolarMode::new(n, cfg.mode.sigma)?,
                None => PolarMode::from_ell(cfg.mode.ell, cfg.mode.sigma)?,
            };
            Ok(Mode::Polar(p))
        }
    }
}

fn options(cfg: &ScenarioConfig) -> IntegrationOptions {
    let n = &cfg.numerics;
    IntegrationOptions {
        rtol: n.rtol,
        atol: n.atol,
        boundary_tol: n.boundary_tol,
        step: n.fixed_step.map_or(StepControl::Adaptive, StepControl::Fixed),
        max_steps: n.max_steps,
    }
}

fn boundary(cfg: &ScenarioConfig) -> Boundary {
    match cfg.mode.boundary {
        BoundaryConfig::Asymptotic {
            amplitude,
            phase,
            r_star_start,
        } => Boundary::Asymptotic {
            amplitude,
            phase,
            r_star_start,
        },
        BoundaryConfig::Initial { r_star, z, dz } => Boundary::Initial { r_star, z, dz },
    }
}

fn solve(cfg: &ScenarioConfig, range: (f64, f64)) -> Result<RadialSolution, RunError> {
    Ok(integrate_wave(&background(cfg)?, &mode(cfg)?, boundary(cfg), range, &options(cfg))?)
}

/// Solution covering every surface in the scenario.
fn surface_solution(cfg: &ScenarioConfig) -> Result<RadialSolution, RunError> {
    let bg = background(cfg)?;
    let ds = &cfg.surface.d;
    let lo = ds.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    solve(cfg, ((lo - MARGIN).max(bg.horizon() + 1e-6), hi + MARGIN))
}

fn surface_profile(cfg: &ScenarioConfig) -> Result<AProfile, RunError> {
    let sol = surface_solution(cfg)?;
    Ok(a_profile(&sol, &background(cfg)?, &axial_mode(cfg)?)?)
}

fn surface(cfg: &ScenarioConfig, d: f64, t: f64) -> SurfaceSpec {
    SurfaceSpec::new(d)
        .with_t(t)
        .with_direction(cfg.surface.theta_d, cfg.surface.phi_d)
        .with_substitution(cfg.surface.substitution)
}

fn resolution(cfg: &ScenarioConfig) -> GeometryResolution {
    GeometryResolution {
        l_max: cfg.numerics.geometry_l_max,
        chart_step: cfg.numerics.chart_step,
        slice_step: cfg.numerics.slice_step,
        ..Default::default()
    }
}

fn perturbation(cfg: &ScenarioConfig) -> Result<PerturbationProfiles, RunError> {
    match cfg.geometry.perturbation {
        PerturbationConfig::None => Ok(PerturbationProfiles::none()),
        PerturbationConfig::Axial => {
            let sol = surface_solution(cfg)?;
            Ok(axial_preset(&background(cfg)?, &axial_mode(cfg)?, &sol, None, cfg.numerics.epsilon)?)
        }
    }
}

fn first(v: &[f64]) -> f64 {
    v[0]
}

pub fn radial(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), RunError> {
    let bg = background(cfg)?;
    let (r0, r1) = (cfg.radial.r_min, cfg.radial.r_max);
    let sol = solve(cfg, (r0, r1))?;
    let profile = match cfg.mode.kind {
        ModeKindConfig::Axial => Some(a_profile(&sol, &bg, &axial_mode(cfg)?)?),
        ModeKindConfig::Polar => None,
    };
    let md = mode(cfg)?;
    let n = cfg.radial.samples;
    let mut header = vec!["r", "r_star", "z", "dz_dr_star", "potential"];
    if profile.is_some() {
        header.extend(["a", "da_dr", "dda_dr2"]);
    }
    let mut rows = Vec::with_capacity(n);
    let mut curve = Vec::with_capacity(n);
    for i in 0..n {
        let r = if i + 1 == n { r1 } else { r0 + (r1 - r0) * i as f64 / (n - 1) as f64 };
        let (z, dz) = sol.eval_r(r)?;
        let mut row = vec![r, tortoise(r, &bg)?, z, dz, md.potential(r, &bg)?];
        if let Some(p) = &profile {
            let v = p.eval(r)?;
            row.extend([v.a, v.da, v.dda]);
        }
        curve.push((r, z));
        rows.push(row);
    }
    out.csv("", &header, &rows);
    out.json(json!({
        "kind": md.kind(),
        "sigma": md.sigma(),
        "r_range": sol.r_range(),
        "r_star_range": sol.r_star_range(),
        "steps": sol.len(),
        "boundary_truncation": sol.boundary_truncation(),
        "max_midpoint_residual": sol.max_midpoint_residual()?,
    }));
    out.svg(Plot {
        title: "Radial solution",
        x_label: "r",
        y_label: "Z",
        series: vec![Series { name: "Z(r)".into(), points: curve }],
        desc: "",
    });
    Ok(())
}

fn embed_all(cfg: &ScenarioConfig, profile: &AProfile) -> Result<Vec<(f64, EmbeddingSolution)>, RunError> {
    use rayon::prelude::*;
    let bg = background(cfg)?;
    let t = first(&cfg.surface.t);
    cfg.surface
        .d
        .par_iter()
        .map(|&d| {
            let s = surface(cfg, d, t);
            s.validate(&bg)?;
            Ok((d, embed(profile, &s, cfg.numerics.l_max, &Frame::default())?))
        })
        .collect()
}

pub fn embed_cmd(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), RunError> {
    let profile = surface_profile(cfg)?;
    let sols = embed_all(cfg, &profile)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut series = Vec::new();
    for (d, e) in &sols {
        for ((l, m, tau), (_, _, n)) in e.tau.iter().zip(e.n_field.iter()) {
            rows.push(vec![*d, l as f64, m as f64, tau, n]);
        }
        summary.push(json!({
            "d": d,
            "kernel_residual_tau": e.kernel_residual_tau,
            "kernel_residual_n": e.kernel_residual_n,
            "source_norm_tau": e.source_norm_tau,
            "source_norm_n": e.source_norm_n,
            "relative_kernel_residual": e.relative_kernel_residual(),
            "equation_residual": e.equation_residual,
            "tau_norm": e.tau.norm(),
            "n_norm": e.n_field.norm(),
            "warnings": e.warnings,
        }));
        series.push(Series {
            name: format!("d = {d}"),
            points: (0..=e.l_max())
                .filter_map(|l| {
                    let v = e.tau.degree_norm(l);
                    (v > 0.0).then(|| (l as f64, v.log10()))
                })
                .collect(),
        });
    }
    out.csv("", &["d", "l", "m", "tau", "n"], &rows);
    out.json(json!({ "l_max": cfg.numerics.l_max, "surfaces": summary }));
    out.svg(Plot {
        title: "Degree norms of tau",
        x_label: "l",
        y_label: "log10 |tau_l|",
        series,
        desc: "",
    });
    Ok(())
}

fn c_factor_for(cfg: &ScenarioConfig) -> Result<f64, RunError> {
    Ok(c_factor(cfg.mode.ell, cfg.surface.theta_d, cfg.mode.amplitude)?)
}

pub fn energy(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), RunError> {
    let profile = surface_profile(cfg)?;
    let sols = embed_all(cfg, &profile)?;
    let cf = c_factor_for(cfg)?;
    let sigma = cfg.mode.sigma;
    let mut rows = Vec::new();
    let mut coeffs = Vec::new();
    let mut series = Vec::new();
    for (d, e) in &sols {
        let s = surface(cfg, *d, first(&cfg.surface.t));
        let c = energy_coefficients(&profile, &s, e, &Frame::default(), cfg.surface.evaluation)?;
        let mut pts = Vec::new();
        for &t in &cfg.surface.t {
            let p = assemble_energy(&c, sigma, t, *d, cf);
            rows.push(vec![p.d, p.t, p.energy, p.de_dt]);
            pts.push((t, p.energy * d * d));
        }
        coeffs.push(json!({ "d": d, "coefficients": c }));
        series.push(Series {
            name: format!("d = {d}"),
            points: pts,
        });
    }
    out.csv("", &["d", "t", "energy", "de_dt"], &rows);
    out.json(json!({ "sigma": sigma, "c_factor": cf, "surfaces": coeffs }));
    out.svg(Plot {
        title: "Energy against time",
        x_label: "t",
        y_label: "E d^2",
        series,
        desc: "",
    });
    Ok(())
}

pub fn sweep(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), RunError> {
    let bg = background(cfg)?;
    let profile = surface_profile(cfg)?;
    let mut spec = SweepSpec::new(cfg.surface.d.clone(), cfg.surface.t.clone(), cfg.numerics.l_max);
    spec.theta_d = cfg.surface.theta_d;
    spec.phi_d = cfg.surface.phi_d;
    spec.substitution = cfg.surface.substitution;
    spec.evaluation = cfg.surface.evaluation;
    let report = energy_sweep(&profile, cfg.mode.sigma, c_factor_for(cfg)?, &spec, &bg)?;
    let rows: Vec<Vec<f64>> = report.table.iter().map(|p| vec![p.d, p.t, p.energy, p.de_dt]).collect();
    let nt = cfg.surface.t.len();
    let series = cfg
        .surface
        .t
        .iter()
        .enumerate()
        .map(|(k, t)| Series {
            name: format!("t = {t}"),
            points: (0..cfg.surface.d.len())
                .map(|i| {
                    let p = report.table[i * nt + k];
                    (p.d, p.energy * p.d * p.d)
                })
                .collect(),
        })
        .collect();
    out.csv("", &["d", "t", "energy", "de_dt"], &rows);
    out.json(serde_json::to_value(&report).map_err(|e| RunError::Numerical(e.to_string()))?);
    out.svg(Plot {
        title: "Energy falloff",
        x_label: "d",
        y_label: "E d^2",
        series,
        desc: "",
    });
    Ok(())
}

fn geometry_reports(cfg: &ScenarioConfig) -> Result<Vec<GeometryReport>, RunError> {
    let bg = background(cfg)?;
    let pert = perturbation(cfg)?;
    let res = resolution(cfg);
    let t = first(&cfg.surface.t);
    cfg.surface
        .d
        .iter()
        .map(|&d| Ok(surface_geometry(&surface(cfg, d, t), &bg, &pert, &res)?))
        .collect()
}

pub fn geometry(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), RunError> {
    let reports = geometry_reports(cfg)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut flags: Vec<String> = Vec::new();
    for r in &reports {
        for p in &r.points {
            rows.push(vec![r.d, p.theta, p.phi, p.gauss_curvature, p.h_norm, p.hawking_line]);
        }
        for f in &r.flags {
            if !flags.contains(f) {
                flags.push(f.clone());
            }
        }
        summary.push(json!({
            "d": r.d,
            "t": r.t,
            "area": r.area,
            "integral_gauss": r.integral_gauss,
            "gauss_bonnet_error": r.gauss_bonnet_error,
            "integral_hawking_line": r.integral_hawking_line,
        }));
    }
    let samples: Vec<(f64, f64)> = reports.iter().map(|r| (r.d, r.integral_hawking_line)).collect();
    let fit = match fit_powers(&samples, &cfg.geometry.fit_powers) {
        Ok(f) => json!({ "fit": f }),
        Err(e) => json!({ "fit": Value::Null, "note": e.to_string() }),
    };
    out.csv("points", &["d", "theta", "phi", "gauss_curvature", "h_norm", "hawking_line"], &rows);
    out.json(json!({
        "surfaces": summary,
        "hawking_line_fit": fit,
        "flags": flags,
        "resolution": resolution(cfg),
    }));
    let r0 = &reports[0];
    let n_phi = r0.grid().n_phi();
    out.svg(Plot {
        title: "Hawking line along the first meridian",
        x_label: "theta",
        y_label: "hawking_line",
        series: reports
            .iter()
            .map(|r| Series {
                name: format!("d = {}", r.d),
                points: r.points.iter().step_by(n_phi).map(|p| (p.theta, p.hawking_line)).collect(),
            })
            .collect(),
        desc: "",
    });
    Ok(())
}

pub fn loop_cmd(cfg: &ScenarioConfig, out: &mut Artifacts) -> Result<(), RunError> {
    let lp = LoopSpec::small_circle(cfg.loop_.theta, cfg.loop_.segments)?;
    let d = first(&cfg.surface.d);
    let result: LoopIntegral = match cfg.loop_.field {
        LoopField::Constant => {
            let mut h = HarmonicField::zeros(0);
            h.set(0, 0, (4.0 * std::f64::consts::PI).sqrt());
            loop_integral_harmonic(&h, &lp)?
        }
        LoopField::Tau | LoopField::N => {
            let profile = surface_profile(cfg)?;
            let s = surface(cfg, d, first(&cfg.surface.t));
            s.validate(&background(cfg)?)?;
            let e = embed(&profile, &s, cfg.numerics.l_max, &Frame::default())?;
            let h = if cfg.loop_.field == LoopField::Tau { &e.tau } else { &e.n_field };
            loop_integral_harmonic(h, &lp)?
        }
        LoopField::HawkingLine => {
            let bg = background(cfg)?;
            let r = surface_geometry(
                &surface(cfg, d, first(&cfg.surface.t)),
                &bg,
                &perturbation(cfg)?,
                &resolution(cfg),
            )?;
            loop_integral(&r.hawking_line(), &lp)?
        }
    };
    let rows: Vec<Vec<f64>> = result.samples.iter().map(|s| vec![s.s, s.theta, s.phi, s.value]).collect();
    out.csv("", &["s", "theta", "phi", "value"], &rows);
    out.json(json!({ "d": d, "total": result.total, "length": result.length, "segments": lp.segments() }));
    out.svg(Plot {
        title: "Loop samples",
        x_label: "s",
        y_label: "value",
        series: vec![Series {
            name: "field".into(),
            points: result.samples.iter().map(|s| (s.s, s.value)).collect(),
        }],
        desc: "",
    });
    Ok(())
}
