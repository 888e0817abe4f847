use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-workbench"))
}

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write_model(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn circle_report_matches_golden() {
    let path = models().join("circle.json");
    let o = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let golden = std::fs::read(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/circle_analyze.json"),
    )
    .unwrap();
    assert_eq!(o.stdout, golden);
    assert!(o.stderr.is_empty());
}

#[test]
fn reports_are_deterministic_and_written_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["analyze", "circle", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let a = std::fs::read(&out).unwrap();
    let b = run(&["analyze", "circle"]).stdout;
    assert_eq!(a, b);
}

#[test]
fn free_particle_has_no_constraints() {
    let v = json(&run(&[
        "analyze",
        models().join("free.json").to_str().unwrap(),
    ]));
    assert_eq!(v["constraints"], Value::Array(vec![]));
    assert_eq!(v["classification"]["kind"], "unconstrained");
    assert_eq!(v["M"], Value::Null);
    assert_eq!(v["reduced_hamiltonian"], "1/2*px^2 + 1/2*py^2");
}

#[test]
fn pinned_line_chain() {
    let v = json(&run(&["analyze", "pinned_line"]));
    let exprs: Vec<&str> = v["constraints"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["expression"].as_str().unwrap())
        .collect();
    assert_eq!(exprs, ["plambda", "x", "px", "lambda"]);
    assert_eq!(v["multipliers"][0]["value"], "0");
    assert_eq!(v["classification"]["rank"], 4);
}

const HEAD: &str = r#"{"name":"m","symbols":[
  {"name":"x","kind":"coordinate","velocity":"xdot","momentum":"px"},
  {"name":"y","kind":"coordinate","velocity":"ydot","momentum":"py"},
  {"name":"lambda","kind":"multiplier","velocity":"lambdadot","momentum":"plambda"},
  {"name":"r0","kind":"parameter"}],
  "parameters":{"r0":"1"},"#;

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "off.json",
            r#""lagrangian":"1/2*(xdot^2+ydot^2) - lambda*(x^2+y^2-r0^2)",
               "rewrite_rules":[{"target":"x^2+y^2","replacement":"r0^2"}],
               "sample_points":[{"x":"1","y":"1","px":"0","py":"0","lambda":"0","plambda":"0"}]}"#,
            1,
        ),
        (
            "schema.json",
            r#""lagrangian":"xdot^2","sample_points":[{}],"colour":"red"}"#,
            1,
        ),
        (
            "nopoints.json",
            r#""lagrangian":"xdot^2","sample_points":[]}"#,
            1,
        ),
        (
            "parse.json",
            r#""lagrangian":"xdot^y","sample_points":[{}]}"#,
            1,
        ),
        (
            "singular.json",
            r#""lagrangian":"1/2*(xdot + ydot)^2 + 1/2*lambdadot^2","sample_points":[{"x":"0","y":"0","px":"0","py":"0","lambda":"0","plambda":"0"}]}"#,
            2,
        ),
        (
            "inconsistent.json",
            r#""lagrangian":"1/2*(xdot^2 + ydot^2) - lambda","sample_points":[{"x":"0","y":"0","px":"0","py":"0","lambda":"0","plambda":"0"}]}"#,
            3,
        ),
        (
            "gauge.json",
            r#""lagrangian":"1/2*(xdot - lambda)^2 + 1/2*ydot^2","sample_points":[{"x":"0","y":"0","px":"0","py":"1","lambda":"3","plambda":"0"}]}"#,
            4,
        ),
    ];
    for (name, tail, want) in cases {
        let p = write_model(&dir, name, &format!("{HEAD}{tail}"));
        let o = run(&["analyze", &p]);
        assert_eq!(
            code(&o),
            want,
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["analyze", &dir.path().join("off.json").to_string_lossy()]);
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(
        msg.contains("sample point 0") && msg.contains("x^2 + y^2 - r0^2"),
        "{msg}"
    );

    assert_eq!(code(&run(&["analyze", "/no/such/model.json"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["spectrum", "--levels", "many"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn first_class_report_is_still_written() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_model(
        &dir,
        "gauge.json",
        &format!(
            "{HEAD}{}",
            r#""lagrangian":"1/2*(xdot - lambda)^2 + 1/2*ydot^2","sample_points":[{"x":"0","y":"0","px":"0","py":"1","lambda":"3","plambda":"0"}]}"#
        ),
    );
    let o = run(&["analyze", &p]);
    assert_eq!(code(&o), 4);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["classification"]["first_class"],
        serde_json::json!(["phi1", "phi2"])
    );
    assert_eq!(v["bracket_table"], Value::Null);
}

fn csv(o: &Output) -> Vec<Vec<f64>> {
    assert_eq!(code(o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn simulate_circle() {
    let o = run(&["simulate", "circle", "--h", "1e-3", "--steps", "1000"]);
    let head = String::from_utf8_lossy(&o.stdout)
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(head, "t,x,y,px,py,phi2,phi3,H,Lz");
    let rk = csv(&o);
    let ex = csv(&run(&[
        "simulate", "circle", "--h", "1e-3", "--steps", "1000", "--method", "exact",
    ]));
    assert_eq!(rk.len(), 1001);
    let (a, b) = (rk.last().unwrap(), ex.last().unwrap());
    for i in 1..5 {
        assert!((a[i] - b[i]).abs() <= 1e-9, "{a:?} {b:?}");
    }
    assert!((b[1] - 1f64.cos()).abs() < 1e-15);
    let pr = csv(&run(&[
        "simulate", "circle", "--h", "1e-3", "--steps", "100", "--method", "project",
    ]));
    assert!(pr.iter().all(|r| r[5].abs() <= 4.0 * f64::EPSILON));
    let other = csv(&run(&[
        "simulate", "circle", "--h", "1e-2", "--steps", "10", "--point", "1",
    ]));
    assert_eq!(&other[0][1..5], &[0.6, 0.8, -1.6, 1.2]);
}

#[test]
fn simulate_rejects_bad_input() {
    assert_eq!(code(&run(&["simulate", "circle", "--h", "0"])), 1);
    assert_eq!(code(&run(&["simulate", "circle", "--h", "-1e-3"])), 1);
    assert_eq!(code(&run(&["simulate", "circle", "--point", "7"])), 1);
    assert_eq!(
        code(&run(&["simulate", "circle", "--method", "leapfrog"])),
        1
    );
    assert_eq!(code(&run(&["simulate", "free", "--method", "project"])), 1);
    // steps this large diverge
    let o = run(&["simulate", "circle", "--h", "1000", "--steps", "50"]);
    assert_eq!(code(&o), 5, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn spectrum_command() {
    let v = json(&run(&["spectrum"]));
    assert_eq!(v["method"], "analytic");
    assert_eq!(v["levels"][0], 0.125);
    assert_eq!(v["params"]["hbar"], 1.0);
    let a1 = json(&run(&["spectrum", "--alpha", "1.0"]));
    let a0 = json(&run(&["spectrum", "--alpha", "0.0"]));
    assert_eq!(a1["levels"], a0["levels"]);
    let g = json(&run(&[
        "spectrum", "--method", "grid", "--gridN", "64", "--levels", "3",
    ]));
    assert_eq!(g["method"], "grid-fd");
    assert!((g["levels"][0].as_f64().unwrap() - 0.125).abs() <= 5e-4);
    let f = json(&run(&[
        "spectrum", "--method", "fourier", "--alpha", "-0.25",
    ]));
    assert_eq!(f["levels"][0], 0.15625);
    let no = json(&run(&["spectrum", "--no-e0"]));
    assert_eq!(no["levels"][0], 0.0);
    assert_eq!(
        code(&run(&["spectrum", "--method", "grid", "--gridN", "8"])),
        1
    );
    assert_eq!(code(&run(&["spectrum", "--levels", "0"])), 1);
    assert_eq!(code(&run(&["spectrum", "--r0", "0"])), 1);
    assert_eq!(code(&run(&["spectrum", "--method", "grid", "--no-e0"])), 1);
}

#[test]
fn operators_command() {
    for alpha in ["0", "0.25"] {
        let v = json(&run(&["operators", "--N", "16", "--alpha", alpha]));
        assert_eq!(v["N"], 16);
        assert_eq!(v["max_hermiticity"], 0.0);
        assert!(v["max_relation"].as_f64().unwrap() <= 1e-12);
        assert_eq!(v["relations"].as_object().unwrap().len(), 8);
        let ord = v["orderings"].as_array().unwrap();
        assert_eq!(ord[2]["px_defect"], 0.0);
        assert!(ord[0]["px_defect"].as_f64().unwrap() > 1e-2);
    }
    assert_eq!(code(&run(&["operators", "--N", "3"])), 1);
}

#[test]
fn eigensolver_and_integrator_codes() {
    use dirac_core::dynamics::DynamicsError;
    use dirac_core::quantum::QuantumError;
    use dirac_workbench::CliError;
    assert_eq!(
        CliError::Eigensolver(QuantumError::NoConvergence { sweeps: 3 }).exit_code(),
        6
    );
    let e: CliError = DynamicsError::NonFinite { step: 2 }.into();
    assert_eq!(e.exit_code(), 5);
}
