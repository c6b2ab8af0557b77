use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use quasilocal::embedding::Substitution;
use quasilocal::energy::ProfileEvaluation;

use crate::RunError;

pub const SCHEMA: &str = include_str!("../schema/scenario.schema.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub background: Background,
    pub mode: ModeConfig,
    pub radial: RadialRange,
    pub surface: SurfaceConfig,
    pub numerics: Numerics,
    pub geometry: GeometryConfig,
    #[serde(rename = "loop")]
    pub loop_: LoopConfig,
    pub outputs: Outputs,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            background: Background { m: 1.0 },
            mode: ModeConfig::default(),
            radial: RadialRange::default(),
            surface: SurfaceConfig::default(),
            numerics: Numerics::default(),
            geometry: GeometryConfig::default(),
            loop_: LoopConfig::default(),
            outputs: Outputs::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Background {
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKindConfig {
    Axial,
    Polar,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "type", rename_all = "lowercase")]
pub enum BoundaryConfig {
    Asymptotic {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        r_star_start: Option<f64>,
    },
    Initial {
        r_star: f64,
        z: f64,
        dz: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModeConfig {
    pub kind: ModeKindConfig,
    pub ell: usize,
    /// Overrides `(ℓ − 1)(ℓ + 2)` for axial modes.
    pub mu_sq: Option<f64>,
    /// Overrides `μ²/2` for polar modes.
    pub n: Option<f64>,
    pub sigma: f64,
    pub amplitude: f64,
    pub boundary: BoundaryConfig,
}

impl Default for ModeConfig {
    fn default() -> Self {
        Self {
            kind: ModeKindConfig::Axial,
            ell: 2,
            mu_sq: None,
            n: None,
            sigma: 0.5,
            amplitude: 1.0,
            boundary: BoundaryConfig::Asymptotic {
                amplitude: 1.0,
                phase: 0.0,
                r_star_start: None,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadialRange {
    pub r_min: f64,
    pub r_max: f64,
    /// Output rows, uniform in `r`.
    pub samples: usize,
}

impl Default for RadialRange {
    fn default() -> Self {
        Self {
            r_min: 4.0,
            r_max: 100.0,
            samples: 400,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceConfig {
    pub t: Vec<f64>,
    pub d: Vec<f64>,
    pub theta_d: f64,
    pub phi_d: f64,
    pub substitution: Substitution,
    pub evaluation: ProfileEvaluation,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        Self {
            t: vec![0.0, 0.3, 1.0],
            d: vec![50.0, 100.0, 200.0, 400.0],
            theta_d: std::f64::consts::FRAC_PI_2,
            phi_d: 0.0,
            substitution: Substitution::Exact,
            evaluation: ProfileEvaluation::Substituted,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub l_max: usize,
    pub rtol: f64,
    pub atol: f64,
    pub boundary_tol: f64,
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
    pub epsilon: f64,
    pub geometry_l_max: usize,
    pub chart_step: f64,
    pub slice_step: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        let i = quasilocal::radial::IntegrationOptions::default();
        let g = quasilocal::geometry::GeometryResolution::default();
        Self {
            l_max: 16,
            rtol: i.rtol,
            atol: i.atol,
            boundary_tol: i.boundary_tol,
            fixed_step: None,
            max_steps: i.max_steps,
            epsilon: 1e-3,
            geometry_l_max: g.l_max,
            chart_step: g.chart_step,
            slice_step: g.slice_step,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationConfig {
    None,
    Axial,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub perturbation: PerturbationConfig,
    /// Inverse powers of `d` in the Hawking-line fit.
    pub fit_powers: Vec<i32>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            perturbation: PerturbationConfig::None,
            fit_powers: vec![0, 1, 2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopField {
    Constant,
    Tau,
    N,
    HawkingLine,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoopConfig {
    pub field: LoopField,
    /// Colatitude of the loop on the parameter sphere.
    pub theta: f64,
    pub segments: usize,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self {
            field: LoopField::Constant,
            theta: std::f64::consts::FRAC_PI_2,
            segments: 256,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    /// File stem; defaults to the subcommand name.
    pub prefix: Option<String>,
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            prefix: None,
            csv: true,
            json: true,
            svg: true,
        }
    }
}

/// Reads, overrides, schema-validates and deserializes a scenario.
pub fn load(path: Option<&Path>, sets: &[String]) -> Result<ScenarioConfig, RunError> {
    let mut value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| RunError::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| RunError::Config(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Default::default()),
    };
    for s in sets {
        apply_set(&mut value, s)?;
    }
    validate_schema(&value)?;
    let cfg: ScenarioConfig = serde_json::from_value(value).map_err(|e| RunError::Config(e.to_string()))?;
    check(&cfg)?;
    Ok(cfg)
}

/// `a.b.c=value`, with `value` parsed as JSON and taken as a string otherwise.
pub fn apply_set(root: &mut Value, assignment: &str) -> Result<(), RunError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| RunError::Config(format!("--set expects key=value, got '{assignment}'")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(RunError::Config(format!("invalid key path '{path}'")));
    }
    let mut node = root;
    for k in &keys[..keys.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| RunError::Config(format!("'{path}' crosses a non-object value")))?;
        node = obj.entry(k.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    node.as_object_mut()
        .ok_or_else(|| RunError::Config(format!("'{path}' crosses a non-object value")))?
        .insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

pub fn validate_schema(value: &Value) -> Result<(), RunError> {
    let schema: Value = serde_json::from_str(SCHEMA).expect("bundled schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("bundled schema compiles");
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| {
            let at = e.instance_path().to_string();
            format!("{}: {e}", if at.is_empty() { "/".to_string() } else { at })
        })
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(RunError::Config(errors.join("; ")))
    }
}

/// Cross-field checks the schema cannot express.
fn check(cfg: &ScenarioConfig) -> Result<(), RunError> {
    let m = cfg.background.m;
    if cfg.radial.r_min <= 2.0 * m || cfg.radial.r_max <= cfg.radial.r_min {
        return Err(RunError::Config(format!(
            "radial range must satisfy 2m < r_min < r_max, got [{}, {}] with m = {m}",
            cfg.radial.r_min, cfg.radial.r_max
        )));
    }
    if let Some(d) = cfg.surface.d.iter().find(|&&d| d <= 2.0 * m + 1.0) {
        return Err(RunError::Config(format!("surface distance {d} must exceed 2m + 1")));
    }
    if cfg.mode.kind == ModeKindConfig::Axial && cfg.mode.n.is_some() {
        return Err(RunError::Config("mode.n applies to polar modes only".into()));
    }
    if cfg.mode.kind == ModeKindConfig::Polar && cfg.mode.mu_sq.is_some() {
        return Err(RunError::Config("mode.mu_sq applies to axial modes only".into()));
    }
    Ok(())
}
