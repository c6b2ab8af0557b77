use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quasilocal"))
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn scenario(name: &str) -> String {
    format!("{}/../../scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn default_sweep_reports_coefficients_and_fits() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sweep", "--config", &scenario("sweep_axial.json")], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("sweep.json"));
    let r = &v["result"];
    assert_eq!(r["distances"].as_array().unwrap().len(), 4);
    for row in r["distances"].as_array().unwrap() {
        assert!(row["e1"].as_f64().unwrap().is_finite());
        assert!(row["e2"].as_f64().unwrap().is_finite());
    }
    let fit = &r["fits"][0]["fit"];
    for k in ["c1", "c2", "c3"] {
        assert!(fit[k].as_f64().unwrap().is_finite());
    }
    assert_eq!(v["config"]["background"]["m"], 1.0);
    assert!(dir.path().join("sweep.csv").exists());
    assert!(std::fs::read_to_string(dir.path().join("sweep.svg")).unwrap().contains("<polyline"));
}

#[test]
fn config_echo_in_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["radial", "--set", "radial.samples=11", "--set", "background.m=0.5"], dir.path());
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("radial.csv")).unwrap();
    let first = csv.lines().next().unwrap();
    assert!(first.starts_with("# config: {") && first.contains("\"m\":0.5"));
    assert_eq!(csv.lines().count(), 2 + 11);
    let svg = std::fs::read_to_string(dir.path().join("radial.svg")).unwrap();
    assert!(svg.contains("<desc>{\"background\":{\"m\":0.5}"));
    assert_eq!(json(&dir.path().join("radial.json"))["config"]["radial"]["samples"], 11);
}

#[test]
fn non_positive_mass_is_a_config_error_without_artifacts() {
    for m in ["0", "-1"] {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let o = run(&["sweep", "--set", &format!("background.m={m}")], &out);
        assert_eq!(o.status.code(), Some(2));
        let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
        assert_eq!(err["error"]["kind"], "config");
        assert!(!out.exists());
    }
}

#[test]
fn unknown_keys_and_bad_files_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"numerics": {"lmax": 8}}"#).unwrap();
    assert_eq!(run(&["radial", "--config", bad.to_str().unwrap()], dir.path()).status.code(), Some(2));
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(run(&["radial", "--config", bad.to_str().unwrap()], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["radial", "--set", "mode.kind=polar", "--set", "mode.mu_sq=4"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["embed", "--set", "mode.kind=polar"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["radial", "--jobs", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["nonsense"], dir.path()).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["geometry", "--set", "numerics.geometry_l_max=2", "--set", "surface.d=[4]"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "numerical");
    let o = run(&["radial", "--set", "numerics.max_steps=3"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["energy", "--set", "surface.d=[30,60]", "--set", "numerics.l_max=8"];
    assert!(run(&args, a.path()).status.success());
    let mut with_jobs = args.to_vec();
    with_jobs.extend(["--jobs", "3"]);
    assert!(run(&with_jobs, b.path()).status.success());
    for f in ["energy.csv", "energy.json", "energy.svg"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn loop_of_constant_field_is_circumference() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["loop", "--config", &scenario("loop_equator.json")], dir.path()).status.success());
    let v = json(&dir.path().join("loop.json"));
    let total = v["result"]["total"].as_f64().unwrap();
    assert!((total - 2.0 * std::f64::consts::PI).abs() < 1e-10);
}

#[test]
fn geometry_emits_points_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["geometry", "--config", &scenario("geometry_schwarzschild.json"), "--set", "numerics.geometry_l_max=6"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("geometry_points.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "d,theta,phi,gauss_curvature,h_norm,hawking_line");
    let v = json(&dir.path().join("geometry.json"));
    for s in v["result"]["surfaces"].as_array().unwrap() {
        assert!(s["gauss_bonnet_error"].as_f64().unwrap().abs() < 1e-8);
    }
    assert!(v["result"]["hawking_line_fit"]["fit"]["coeffs"].is_array());
}

#[test]
fn axial_geometry_is_flagged_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "geometry",
            "--set",
            "geometry.perturbation=axial",
            "--set",
            "surface.d=[40]",
            "--set",
            "surface.t=[1.0]",
            "--set",
            "numerics.geometry_l_max=6",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("geometry.json"));
    assert_eq!(v["result"]["flags"][0], "incomplete-perturbation");
}

#[test]
fn every_shipped_scenario_runs() {
    // Scenario files are named `<subcommand>_<topic>.json`.
    let dir = format!("{}/../../scenarios", env!("CARGO_MANIFEST_DIR"));
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_none_or(|x| x != "json") {
            continue;
        }
        let stem = p.file_stem().unwrap().to_str().unwrap().to_string();
        let sub = stem.split('_').next().unwrap();
        let out = tempfile::tempdir().unwrap();
        let o = run(&[sub, "--config", p.to_str().unwrap()], out.path());
        assert!(o.status.success(), "{stem}: {}", String::from_utf8_lossy(&o.stderr));
        n += 1;
    }
    assert!(n >= 6);
}
