//! End-to-end runs of the `willmore` binary.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn willmore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_willmore"))
        .args(args)
        .env_remove("WILLMORE_TOLERANCE")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", stdout(out)))
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

/// Parsed CSV rows (header excluded) and the `#` footer lines.
fn csv_rows(text: &str) -> (Vec<csv::StringRecord>, Vec<String>) {
    let footer = text.lines().filter(|l| l.starts_with('#')).map(str::to_owned).collect();
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["r0", "area", "H", "F", "F_prime", "lhs", "rhs", "gap", "class"]
    );
    (r.records().map(Result::unwrap).collect(), footer)
}

#[test]
fn schwarzschild_constants() {
    let out = willmore(&["constants", "--manifold", "schwarzschild", "--mass", "2", "--dim", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert!((f(&v["b0"]) - (1.0 + 4f64.ln()) / 3.0).abs() < 1e-8);
    assert!((f(&v["b1"]) - 1.0 / 3.0).abs() < 1e-8);
    assert!((f(&v["avr"]) - 1.0).abs() < 1e-4);
    assert!(f(&v["errors"]["avr"]) < 1e-4);
    assert_eq!(v["flags"]["envelope_admissible"], Value::Bool(true));
}

#[test]
fn cone_constants_vanish() {
    let v = json(&willmore(&["constants", "--manifold", "cone", "--slope", "1", "--offset", "1"]));
    assert_eq!(f(&v["b0"]), 0.0);
    assert_eq!(f(&v["b1"]), 0.0);
    assert_eq!(f(&v["avr"]), 1.0);
    assert_eq!(v["flags"]["flat_regime"], Value::Bool(true));
}

#[test]
fn invalid_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cone = "[warp]\nfamily = \"cone\"\nslope = 1.0\noffset = 1.0\n";
    let negative = write(
        dir.path(),
        "bad.cfg",
        &format!("[fiber]\ndim = 2\narea = -1.0\nricci_lower = 1.0\n{cone}"),
    );
    let out = willmore(&["constants", "--config", &negative]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("fiber area must be positive"), "{}", stderr(&out));

    let unknown = write(dir.path(), "unknown.cfg", &format!("{cone}sharpness = 2.0\n"));
    let out = willmore(&["constants", "--config", &unknown]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("sharpness"), "{}", stderr(&out));

    let out = willmore(&["constants", "--config", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn invalid_flags_exit_2() {
    for args in [
        &["constants"][..],
        &["constants", "--manifold", "schwarzschild"],
        &["constants", "--manifold", "schwarzschild", "--mass", "2", "--slope", "1"],
        &["constants", "--manifold", "reissner-nordstrom", "--mass", "1", "--charge", "1"],
        &["constants", "--manifold", "cone", "--slope", "1", "--offset", "1", "--tolerance", "1e-2"],
        &["verify", "--manifold", "cone", "--slope", "1", "--offset", "1", "--slice", "-1"],
        &["verify", "--manifold", "cone", "--slope", "1", "--offset", "1", "--slice", "0", "--format", "csv"],
        &["sweep", "--manifold", "cone", "--slope", "1", "--offset", "1", "--from", "2", "--to", "1"],
    ] {
        let out = willmore(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn curvature_condition_failure_exits_2() {
    // Slope 2 over the round sphere: λ₂ ~ r⁻², not integrable against t dt.
    let out = willmore(&["verify", "--manifold", "cone", "--slope", "2", "--offset", "1", "--slice", "0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("curvature conditions failed"), "{}", stderr(&out));
}

#[test]
fn verify_schwarzschild_horizon() {
    let out = willmore(&["verify", "--manifold", "schwarzschild", "--mass", "2", "--slice", "0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let lhs = 16.0 * PI / 9.0 * (4.0 * 1f64.exp()).powf(2.0 / 3.0);
    assert!((f(&v["lhs"]) - lhs).abs() < 1e-6 * lhs);
    assert!((f(&v["gap"]) - (lhs - 4.0 * PI)).abs() < 1e-4);
    assert_eq!(v["equality_class"], "strict");
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).take(11).collect();
    assert_eq!(
        keys,
        ["lhs", "rhs", "gap", "relative_slack", "b0", "b1", "avr", "avr_error", "equality_class", "limit_ratio", "flags"]
    );
}

#[test]
fn verify_cone_is_w1() {
    let out = willmore(&["verify", "--manifold", "cone", "--slope", "1", "--offset", "1", "--slice", "0", "--annex"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["equality_class"], "equality-W1");
    assert!(f(&v["gap"]).abs() <= 1e-6);
    assert_eq!(f(&v["w1"]["r0_star"]), 1.0);
    assert_eq!(v["annex"]["li_equality"], Value::Bool(true));
}

#[test]
fn verify_reissner_nordstrom() {
    let out = willmore(&["verify", "--manifold", "reissner-nordstrom", "--mass", "3", "--charge", "1", "--slice", "0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert!(f(&v["gap"]) > 0.0);
    // The horizon is minimal: lhs = e^{2 b0} |Σ| b1².
    let area = f(&v["slice"]["area"]);
    let (b0, b1) = (f(&v["b0"]), f(&v["b1"]));
    assert!((f(&v["lhs"]) - (2.0 * b0).exp() * area * b1 * b1).abs() < 1e-9 * f(&v["lhs"]));
}

#[test]
fn verify_is_byte_identical_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["verify", "--manifold", "schwarzschild", "--mass", "1", "--slice", "2"];
    let a = willmore(&args);
    let b = willmore(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut with_output = args.to_vec();
    with_output.extend(["--output", path.to_str().unwrap()]);
    let c = willmore(&with_output);
    assert_eq!(code(&c), 0);
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn numbers_have_seventeen_significant_digits() {
    let out = stdout(&willmore(&["constants", "--manifold", "schwarzschild", "--mass", "2"]));
    let line = out.lines().find(|l| l.trim_start().starts_with("\"b1\"")).unwrap();
    let mantissa = line.split(':').nth(1).unwrap().trim().split('e').next().unwrap();
    let digits = mantissa.chars().filter(char::is_ascii_digit).count();
    assert_eq!(digits, 17, "{line}");
}

#[test]
fn tolerance_env_override() {
    let args = ["verify", "--manifold", "cone", "--slope", "1", "--offset", "1", "--slice", "0"];
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_willmore"))
            .args(args)
            .env("WILLMORE_TOLERANCE", tol)
            .output()
            .unwrap()
    };
    let ok = run("1e-8");
    assert_eq!(code(&ok), 0);
    assert!((f(&json(&ok)["tolerance"]) - 4.0 * PI * 1e-8).abs() < 1e-20);
    assert_eq!(code(&run("0.5")), 2);
    assert_eq!(code(&run("abc")), 2);
}

#[test]
fn schwarzschild_sweep_brackets_photon_sphere() {
    let out = willmore(&["sweep", "--manifold", "schwarzschild", "--mass", "2", "--from", "0", "--to", "5", "--steps", "26"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (rows, footer) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 26);
    assert!(rows.iter().all(|r| &r[8] == "strict"));
    assert_eq!(footer.len(), 1, "{footer:?}");
    let s: f64 = footer[0].rsplit("s=").next().unwrap().parse().unwrap();
    assert!((s - 3.0).abs() < 1e-4, "s = {s}");
}

#[test]
fn cone_sweep_has_decreasing_f() {
    let out = willmore(&["sweep", "--manifold", "cone", "--slope", "1", "--offset", "1", "--to", "10", "--steps", "11"]);
    assert_eq!(code(&out), 0);
    let (rows, footer) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert!(r[4].parse::<f64>().unwrap() < 0.0);
        assert_eq!(&r[8], "equality-W1");
    }
    assert_eq!(footer, ["# F_prime root: none in range"]);
}

#[test]
fn single_step_sweep() {
    let out = willmore(&["sweep", "--manifold", "cone", "--slope", "1", "--offset", "1", "--from", "2", "--to", "9", "--steps", "1"]);
    assert_eq!(code(&out), 0);
    let (rows, _) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 2.0);
}

#[test]
fn sweep_json_matches_csv() {
    let base = ["sweep", "--manifold", "schwarzschild", "--mass", "2", "--to", "5", "--steps", "6"];
    let (rows, _) = csv_rows(&stdout(&willmore(&base)));
    let mut args = base.to_vec();
    args.extend(["--format", "json"]);
    let v = json(&willmore(&args));
    let jrows = v["rows"].as_array().unwrap();
    assert_eq!(jrows.len(), rows.len());
    for (c, j) in rows.iter().zip(jrows) {
        assert_eq!(c[7].parse::<f64>().unwrap(), f(&j["gap"]));
    }
    assert_eq!(v["f_prime_roots"].as_array().unwrap().len(), 1);
}

#[test]
fn check_is_deterministic_and_passes() {
    let a = willmore(&["check", "--seed", "42", "--cases", "200"]);
    let b = willmore(&["check", "--seed", "42", "--cases", "200"]);
    assert_eq!(code(&a), 0, "{}{}", stdout(&a), stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("all properties pass"));
    let j = json(&willmore(&["check", "--seed", "42", "--cases", "20", "--format", "json"]));
    assert_eq!(j["passed"], Value::Bool(true));
    assert_eq!(j["cases"], 20);
}

#[test]
fn faulty_lambda_is_rejected() {
    let out = willmore(&["check", "--inject-faulty-lambda", "--cases", "5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("rejected"), "{}", stderr(&out));
}

#[test]
fn config_file_matches_builtin_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "rn.toml", "[warp]\nfamily = \"reissner-nordstrom\"\nmass = 3.0\ncharge = 1.0\n");
    let a = willmore(&["verify", "--config", &cfg, "--slice", "1"]);
    let b = willmore(&["verify", "--manifold", "reissner-nordstrom", "--mass", "3", "--charge", "1", "--slice", "1"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn non_round_fiber_annex_needs_diameter() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[warp]\nfamily = \"cone\"\nslope = 1.0\noffset = 1.0\n[fiber]\ndim = 2\narea = 12.566370614359172\nricci_lower = 1.0\n";
    let cfg = write(dir.path(), "fiber.toml", body);
    let out = willmore(&["verify", "--config", &cfg, "--slice", "0", "--annex"]);
    assert_eq!(code(&out), 2);
    let cfg = write(dir.path(), "fiber_d.toml", &format!("{body}diameter = 3.141592653589793\n"));
    let out = willmore(&["verify", "--config", &cfg, "--slice", "0", "--annex"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}
