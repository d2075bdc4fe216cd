use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sta(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sta")).arg("--out-dir").arg(dir).args(args).output().expect("run sta")
}

fn ok_json(dir: &Path, args: &[&str]) -> Value {
    let out = sta(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn f(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn jump(dir: &Path, from: f64, to: f64) -> String {
    write(
        dir,
        "jump.json",
        &format!(
            r#"{{"segments":[{{"t0":-1,"t1":0,"kind":"constant","params":{{"value":{from}}}}},
                {{"t0":0,"t1":1,"kind":"constant","params":{{"value":{to}}}}}],
               "omega_in_sq":{from},"omega_out_sq":{to}}}"#
        ),
    )
}

fn soft_step(dir: &Path) -> String {
    write(
        dir,
        "step.json",
        r#"{"segments":[{"t0":-6,"t1":6,"kind":"tanh","params":{"from":1,"to":4,"center":0,"width":0.3}}],
            "omega_in_sq":1,"omega_out_sq":4}"#,
    )
}

fn bump(dir: &Path) -> String {
    write(
        dir,
        "bump.json",
        r#"{"segments":[{"t0":-20,"t1":20,"kind":"sech2","params":{"base":1,"amplitude":3,"kappa":1,"center":0}}],
            "omega_in_sq":1,"omega_out_sq":1}"#,
    )
}

#[test]
fn constant_profile_is_unexcited() {
    let d = TempDir::new().unwrap();
    let p = write(d.path(), "c.json", r#"{"segments":[],"omega_in_sq":2,"omega_out_sq":2}"#);
    let r = ok_json(d.path(), &["analyze", &p]);
    assert!(f(&r, "occupation") < 1e-20);
    assert_eq!(r["unexcited"], true);
    assert!(r["tolerances"]["ode"].as_f64().unwrap() > 0.0);
    assert!(d.path().join("mode.csv").exists() && d.path().join("ermakov.csv").exists());
}

#[test]
fn sudden_jump_occupation() {
    let d = TempDir::new().unwrap();
    let r = ok_json(d.path(), &["analyze", &jump(d.path(), 1.0, 16.0)]);
    assert!((f(&r, "occupation") - 0.5625).abs() < 1e-8);
    assert!((f(&r, "persistence") - 0.8).abs() < 1e-8);
}

#[test]
fn soft_step_reports_delta_and_extrema() {
    let d = TempDir::new().unwrap();
    let r = ok_json(d.path(), &["analyze", &soft_step(d.path())]);
    assert!(f(&r, "delta") > 1e-3);
    let ex = r["extrema"].as_array().unwrap();
    assert!(ex.len() >= 3);
    let header = std::fs::read_to_string(d.path().join("mode.csv")).unwrap();
    assert!(header.starts_with("t,re_q,im_q,re_qdot,im_qdot,wronskian_residual\n"));
}

#[test]
fn csv_format_prints_the_table() {
    let d = TempDir::new().unwrap();
    let out = sta(d.path(), &["--format", "csv", "analyze", &jump(d.path(), 1.0, 16.0)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,value\n"));
    let occ = text.lines().find(|l| l.starts_with("occupation,")).unwrap();
    assert!(occ.contains('e'), "full precision scientific: {occ}");
}

#[test]
fn input_errors_exit_with_2() {
    let d = TempDir::new().unwrap();
    let bad = write(d.path(), "bad.json", r#"{"segments": 3}"#);
    assert_eq!(sta(d.path(), &["analyze", &bad]).status.code(), Some(2));
    let missing = d.path().join("missing.json").display().to_string();
    assert_eq!(sta(d.path(), &["analyze", &missing]).status.code(), Some(2));
    let neg = write(d.path(), "neg.json", r#"{"segments":[],"omega_in_sq":-1,"omega_out_sq":-1}"#);
    assert_eq!(sta(d.path(), &["analyze", &neg]).status.code(), Some(2));
    let p = jump(d.path(), 1.0, 4.0);
    assert_eq!(sta(d.path(), &["--tol", "0", "analyze", &p]).status.code(), Some(2));
    assert_eq!(sta(d.path(), &["squeeze", "--r", "-1", "--omega", "1", "--tau", "1"]).status.code(), Some(2));
    assert_eq!(sta(d.path(), &["synth", "--kappas", "1,1"]).status.code(), Some(2));
    assert_eq!(sta(d.path(), &["verify-duality", &p]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_3() {
    let d = TempDir::new().unwrap();
    let out = sta(d.path(), &["--tol", "0.1", "analyze", &bump(d.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Wronskian"));
}

#[test]
fn design_writes_an_unexciting_profile() {
    let d = TempDir::new().unwrap();
    let r = ok_json(d.path(), &["design", "--omega-from", "1", "--omega-to", "2", "--tau", "1.5"]);
    assert_eq!(r["unexcited"], true);
    assert_eq!(r["smooth"], true);
    assert!((f(&r, "omega_out_sq") - 4.0).abs() < 1e-12);
    let back = ok_json(d.path(), &["analyze", &d.path().join("design.json").display().to_string()]);
    assert!(f(&back, "occupation") < 1e-6);
}

#[test]
fn design_with_constant_reference_is_constant() {
    let d = TempDir::new().unwrap();
    let r = ok_json(d.path(), &["design", "--rho-expr", "0.5", "--tau", "2", "--out", "flat.json"]);
    assert_eq!(f(&r, "omega_in_sq"), 16.0);
    assert_eq!(f(&r, "omega_out_sq"), 16.0);
    assert!(f(&r, "occupation") < 1e-20);
}

#[test]
fn design_warns_on_rough_junctions() {
    let d = TempDir::new().unwrap();
    let out = sta(d.path(), &["design", "--kind", "cosine", "--omega-from", "1", "--omega-to", "2", "--tau", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(d.path().join("design.json").exists());
}

#[test]
fn symmetric_completion_of_a_soft_step() {
    let d = TempDir::new().unwrap();
    let r = ok_json(d.path(), &["complete", &soft_step(d.path()), "--extremum", "1"]);
    assert_eq!(r["symmetric"], true);
    assert!(f(&r, "occupation") < 1e-6);
    let text = std::fs::read_to_string(d.path().join("completed.json")).unwrap();
    let spec: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(spec["completion"]["symmetric"], true);
    assert!(spec["completion"]["tn"].as_f64().is_some());
}

#[test]
fn general_completion_to_a_new_frequency() {
    let d = TempDir::new().unwrap();
    let r = ok_json(d.path(), &["complete", &soft_step(d.path()), "--target-omega", "1.5", "--tau2", "3"]);
    assert_eq!(r["symmetric"], false);
    assert!(f(&r, "occupation") < 1e-6, "{r}");
}

#[test]
fn completing_an_unexciting_profile_passes_through() {
    let d = TempDir::new().unwrap();
    let c = write(d.path(), "c.json", r#"{"segments":[],"omega_in_sq":2,"omega_out_sq":2}"#);
    let out = sta(d.path(), &["complete", &c, "--extremum", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("notice"));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["degenerate"], true);
}

#[test]
fn square_well_resonance_table() {
    let d = TempDir::new().unwrap();
    let h = PI / 2.0;
    let well = write(
        d.path(),
        "well.json",
        &format!(
            r#"{{"segments":[{{"t0":{},"t1":{h},"kind":"constant","params":{{"value":-3}}}}],"v_in":0,"v_out":0}}"#,
            -h
        ),
    );
    for e in ["1", "6", "13"] {
        let r = ok_json(d.path(), &["scatter", "--potential", &well, "--energy", e]);
        let row = &r["rows"][0];
        assert!(f(row, "transmission") >= 1.0 - 1e-8, "E = {e}: {row}");
    }
    let r = ok_json(d.path(), &["scatter", "--potential", &well, "--scan", "0.5:14:28", "--resonances"]);
    let res: Vec<f64> = r["resonances"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for want in [1.0, 6.0, 13.0] {
        assert!(res.iter().any(|e| (e - want).abs() < 1e-4), "{want} not in {res:?}");
    }
    let csv = std::fs::read_to_string(d.path().join("scatter.csv")).unwrap();
    assert!(csv.starts_with("E,R,T,r_re,r_im,t_re,t_im\n"));
    assert_eq!(csv.lines().count(), 29);
}

#[test]
fn scatter_rejects_a_bad_scan() {
    let d = TempDir::new().unwrap();
    let w = write(d.path(), "w.json", r#"{"segments":[],"v_in":0,"v_out":0}"#);
    assert_eq!(sta(d.path(), &["scatter", "--potential", &w, "--scan", "3:1:4"]).status.code(), Some(2));
    assert_eq!(sta(d.path(), &["scatter", "--potential", &w, "--energy", "-1"]).status.code(), Some(2));
}

#[test]
fn kay_moses_synthesis_and_verification() {
    let d = TempDir::new().unwrap();
    let r = ok_json(d.path(), &["synth", "--kappas", "2,1", "--omega0-sq", "1", "--verify", "0.5,1,3"]);
    assert!(f(&r, "occupation") < 1e-8);
    for c in r["verify"].as_array().unwrap() {
        assert!(f(c, "beta_sq") < 1e-8 && f(c, "reflection") < 1e-6, "{c}");
    }
    assert!((f(&r, "peak") - 7.0).abs() < 1e-3);
    let back = ok_json(d.path(), &["analyze", &d.path().join("synth.json").display().to_string()]);
    assert!(f(&back, "occupation") < 1e-8);
    let csv = std::fs::read_to_string(d.path().join("synth.csv")).unwrap();
    assert!(csv.starts_with("t,omega_sq\n"));
}

#[test]
fn squeeze_vacuum_return_table() {
    let d = TempDir::new().unwrap();
    let r = ok_json(d.path(), &["squeeze", "--r", "1", "--omega", "1.7", "--periods", "1,2,5", "--n-max", "4"]);
    for row in r["rows"].as_array().unwrap() {
        assert!(f(row, "residual_squeeze") < 1e-10);
        assert!((f(row, "det") - 0.25).abs() < 1e-12);
    }
    let r = ok_json(d.path(), &["squeeze", "--r", "1", "--omega", "1.7", "--tau", "0.5"]);
    assert!(f(&r["rows"][0], "residual_squeeze") > 1e-3);
    let amps = std::fs::read_to_string(d.path().join("amplitudes.csv")).unwrap();
    assert_eq!(amps.lines().count(), 1 + 3 * 5);
}

#[test]
fn duality_of_a_sech2_bump() {
    let d = TempDir::new().unwrap();
    let r = ok_json(d.path(), &["verify-duality", &bump(d.path())]);
    assert_eq!(r["pass"], true);
    assert!(f(&r, "beta_sq") > 1e-3);
    assert!(f(&r, "discrepancy") < 1e-6);
}

#[test]
fn outputs_are_deterministic() {
    let d = TempDir::new().unwrap();
    let a = d.path().join("a");
    let b = d.path().join("b");
    let p = soft_step(d.path());
    let ra = sta(&a, &["analyze", &p]);
    let rb = sta(&b, &["analyze", &p]);
    let strip =
        |o: &Output, dir: &Path| String::from_utf8(o.stdout.clone()).unwrap().replace(&dir.display().to_string(), "");
    assert_eq!(strip(&ra, &a), strip(&rb, &b));
    for f in ["mode.csv", "ermakov.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    sta(&a, &["synth", "--kappas", "3,2,1"]);
    sta(&b, &["synth", "--kappas", "3,2,1"]);
    assert_eq!(std::fs::read(a.join("synth.json")).unwrap(), std::fs::read(b.join("synth.json")).unwrap());
}
