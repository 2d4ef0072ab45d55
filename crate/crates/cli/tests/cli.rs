use std::collections::HashMap;
use std::path::PathBuf;
use std::process::{Command, Output};

const REFERENCE: &str = include_str!("../../../configs/reference.toml");

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn exec(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_aiphase"));
    cmd.args(args).env_remove("AIPHASE_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

struct Scenario {
    _dir: tempfile::TempDir,
    path: PathBuf,
}

impl Scenario {
    fn new(text: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.toml");
        std::fs::write(&path, text).unwrap();
        Self { _dir: dir, path }
    }

    fn edited(edits: &[(&str, &str)]) -> Self {
        let mut text = REFERENCE.to_string();
        for (from, to) in edits {
            assert!(text.contains(from), "{from}");
            text = text.replacen(from, to, 1);
        }
        Self::new(&text)
    }

    fn run(&self, cmd: &str, extra: &[&str]) -> Run {
        let mut args = vec![cmd, "--config", self.path.to_str().unwrap()];
        args.extend_from_slice(extra);
        exec(&args, &[])
    }
}

fn key_values(out: &str) -> HashMap<String, String> {
    out.lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn value(map: &HashMap<String, String>, key: &str) -> f64 {
    map[key].parse().unwrap()
}

fn csv(out: &str) -> Vec<[f64; 4]> {
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("scan_value,phi2,p21,contrast"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

const DARK: &[(&str, &str)] = &[
    ("alpha_rad_per_s2 = 0.0", "kg_minus_alpha_rad_per_s2 = 0.0"),
    ("gamma_per_s2 = 3e-6", "gamma_per_s2 = 0.0"),
];

#[test]
fn phase_reports_every_key_in_order() {
    let r = Scenario::new(REFERENCE).run("phase", &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let keys: Vec<&str> = r.stdout.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(" = ").next().unwrap()).collect();
    assert_eq!(
        keys,
        ["phi2_closed", "phi2_quadrature", "psi2", "delta_phi2", "eps2_x2", "total", "contrast", "p21"]
    );
    let kv = key_values(&r.stdout);
    assert!(kv.values().all(|v| v.parse::<f64>().unwrap().is_finite()));
    let (c, q) = (value(&kv, "phi2_closed"), value(&kv, "phi2_quadrature"));
    assert!((c - q).abs() <= 1e-6 * q.abs());
}

#[test]
fn locked_chirp_without_gradient_is_dark() {
    let r = Scenario::edited(DARK).run("phase", &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let kv = key_values(&r.stdout);
    assert!(value(&kv, "total").abs() < 1e-9);
    assert!(value(&kv, "p21") < 1e-15);
}

#[test]
fn config_errors_exit_one_with_diagnostics() {
    let both = Scenario::edited(&[("alpha_rad_per_s2 = 0.0", "alpha_rad_per_s2 = 0.0\nkg_minus_alpha_rad_per_s2 = 0.0")]);
    let r = both.run("phase", &[]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("mutually exclusive"), "{}", r.stderr);

    let typo = Scenario::edited(&[("gamma_per_s2", "gama_per_s2")]).run("phase", &[]);
    assert_eq!(typo.code, 1);
    assert!(typo.stderr.contains("gama_per_s2") && typo.stderr.contains("line"), "{}", typo.stderr);

    let missing = exec(&["phase", "--config", "/nonexistent/aiphase.toml"], &[]);
    assert_eq!(missing.code, 1);

    let usage = exec(&["phase"], &[]);
    assert_eq!(usage.code, 1);
}

#[test]
fn tolerance_override_is_honoured() {
    let s = Scenario::new(REFERENCE);
    let path = s.path.to_str().unwrap();
    let bad = exec(&["phase", "--config", path], &[("AIPHASE_TOL", "abc")]);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.contains("AIPHASE_TOL"));
    let unreachable = exec(&["phase", "--config", path], &[("AIPHASE_TOL", "1e-300")]);
    assert_eq!(unreachable.code, 2, "{}", unreachable.stderr);
    assert!(unreachable.stderr.contains("achieved"));
    assert!(unreachable.stdout.is_empty());
    let loose = exec(&["phase", "--config", path], &[("AIPHASE_TOL", "1e-6")]);
    assert_eq!(loose.code, 0);
}

#[test]
fn fringe_csv_is_deterministic() {
    let s = Scenario::edited(DARK);
    let args = ["--scan", "kg_minus_alpha", "--from", "-20", "--to", "20", "--steps", "41"];
    let a = s.run("fringe", &args);
    let b = s.run("fringe", &args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let rows = csv(&a.stdout);
    assert_eq!(rows.len(), 41);
    assert_eq!(rows[0][0], -20.0);
    assert_eq!(rows[40][0], 20.0);
    for r in &rows {
        assert!((r[2] - 0.5 * (1.0 - r[3] * r[1].cos())).abs() < 1e-12);
    }
    assert!(a.stdout.lines().nth(1).unwrap().contains("e"));
}

#[test]
fn single_step_fringe_matches_phase() {
    let s = Scenario::new(REFERENCE);
    let phase = key_values(&s.run("phase", &[]).stdout);
    let r = s.run("fringe", &["--scan", "alpha", "--from", "0", "--to", "0", "--steps", "1"]);
    let rows = csv(&r.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], value(&phase, "total"));
    assert_eq!(rows[0][2], value(&phase, "p21"));
    assert_eq!(rows[0][3], value(&phase, "contrast"));
}

#[test]
fn gradiometer_scan_is_linear() {
    let s = Scenario::new(REFERENCE);
    let rows = csv(&s.run("fringe", &["--scan", "d_gradiometer", "--from", "0", "--to", "1", "--steps", "5"]).stdout);
    let eta = 5e-5 / 0.5;
    let expected = -1.61e7 * 3e-6 * 0.25 * (1.0 - (2.0 * std::f64::consts::PI - 4.0) / std::f64::consts::PI * eta);
    let slope = rows[4][1] - rows[0][1];
    assert!((slope - expected).abs() < 1e-5 * expected.abs(), "{slope} {expected}");
    for w in rows.windows(2) {
        assert!(((w[1][1] - w[0][1]) - 0.25 * slope).abs() < 1e-6 * slope.abs());
    }
}

#[test]
fn fringe_rejects_unknown_parameter() {
    let r = Scenario::new(REFERENCE).run("fringe", &["--scan", "beta", "--from", "0", "--to", "1", "--steps", "3"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.contains("beta"));
}

#[test]
fn contrast_reports_plans() {
    let flat = key_values(&Scenario::edited(&[("gamma_per_s2 = 3e-6", "gamma_per_s2 = 0.0")]).run("contrast", &[]).stdout);
    assert_eq!(flat["ratio_time"], "none");
    for k in ["dz", "dp", "kick_pi", "kick_final", "residual_dz", "residual_dp"] {
        assert!(value(&flat, k).abs() < 1e-18, "{k}");
    }

    let quad = key_values(&Scenario::new(REFERENCE).run("contrast", &[]).stdout);
    assert_eq!(quad["scheme"], "single_kick");
    assert_eq!(value(&quad, "kick_final"), 0.0);
    assert!((value(&quad, "kick_pi") + 1.61e7 * 3e-6 * 0.25 / 2.0).abs() < 1e-9);

    let cubic = Scenario::edited(&[("gamma_per_s2 = 3e-6", "gamma_per_s2 = 3e-6\nperturbation_poly = [0.0, 0.0, 0.0, 1e-27]")]);
    let c = key_values(&cubic.run("contrast", &[]).stdout);
    assert_eq!(c["scheme"], "two_kick");
    assert!(value(&c, "kick_pi") != 0.0 && value(&c, "kick_final") != 0.0);
    assert!(value(&c, "residual_dz").abs() <= 1e-12 * value(&c, "dz").abs());
    assert!(value(&c, "residual_dp").abs() <= 1e-12 * value(&c, "dp").abs());
}

#[test]
fn validate_passes_and_negative_control_fails() {
    let s = Scenario::new(REFERENCE);
    let ok = s.run("validate", &[]);
    assert_eq!(ok.code, 0, "{}", ok.stdout);
    assert!(ok.stdout.ends_with("overall: PASS\n"));
    for name in ["oracle_vs_closed_form", "magnus_termination", "path_integral", "dressed_state", "regime"] {
        assert!(ok.stdout.contains(&format!("{name}: PASS")), "{name}");
    }
    let bad = s.run("validate", &["--closed-form-eta-coeff", "1.0"]);
    assert_eq!(bad.code, 3);
    assert!(bad.stdout.contains("oracle_vs_closed_form: FAIL"));
    assert!(bad.stdout.contains("magnus_termination: PASS"));
    assert!(!exec(&["validate", "--help"], &[]).stdout.contains("closed-form-eta-coeff"));
}

#[test]
fn regime_violation_warns_without_failing() {
    let s = Scenario::edited(&[
        ("g_m_per_s2 = 9.81", "g_m_per_s2 = 0.0"),
        ("gamma_per_s2 = 3e-6", "gamma_per_s2 = 0.0\nperturbation_poly = [0.0, 1e-30]"),
    ]);
    let v = s.run("validate", &[]);
    assert_eq!(v.code, 0, "{}{}", v.stdout, v.stderr);
    assert!(v.stdout.contains("regime: WARN"));
    assert_eq!(s.run("phase", &[]).code, 0);
}
