use std::path::Path;
use std::process::{Command, Output};

use metamorph_core::signals::io::SignalDoc;
use metamorph_core::signals::{ComplexField2D, Hbar};
use metamorph_core::verify::VerifyReport;

fn metamorph(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metamorph")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn small_config(dir: &Path) {
    write(dir, "run.json", r#"{"n": 128, "window": 6.0}"#);
}

#[test]
fn verify_group_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = metamorph(d, &["verify", "--suite", "group", "--seed", "11", "--report", "a.json"]);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    let stdout = String::from_utf8_lossy(&a.stdout);
    assert!(stdout.contains("PASS group/associativity_1000_triples"));
    assert!(stdout.contains("PASS group/matrix_product_oracle_1000_pairs"));
    let b = metamorph(d, &["verify", "--suite", "group", "--seed", "11", "--report", "b.json"]);
    assert_eq!(code(&b), 0);
    let text = std::fs::read_to_string(d.join("a.json")).unwrap();
    assert_eq!(text, std::fs::read_to_string(d.join("b.json")).unwrap());
    let report: VerifyReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.seed, 11);
    assert!(report.passed);
    assert_eq!(report.to_json(), text);
}

#[test]
fn failed_verification_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // a 16-point window of half-width 1 cannot hold the Hermite functions
    write(d, "coarse.json", r#"{"n": 16, "window": 1.0}"#);
    let out = metamorph(d, &["--config", "coarse.json", "verify", "--suite", "signals", "--report", "v.json"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL signals/hermite_quadrature_norm_0_6"));
    let report: VerifyReport = serde_json::from_str(&std::fs::read_to_string(d.join("v.json")).unwrap()).unwrap();
    assert!(!report.passed);
}

#[test]
fn gaussian_transform_at_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "g.json", r#"{"family": "gaussian", "hbar": 1.0}"#);
    let out = metamorph(d, &["transform", "--signal", "g.json", "--fiducial", "gaussian", "--b", "0", "--r", "1", "--out", "field.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(d.join("field.csv")).unwrap();
    assert!(text.starts_with("x,y,re,im\n"));
    let field = ComplexField2D::from_csv(&text, 0.0, 1.0, Hbar::default()).unwrap();
    let ix = field.x_grid().index_of(0.0).unwrap();
    let iy = field.y_grid().index_of(0.0).unwrap();
    assert!((field.value(ix, iy).re - 1.0).abs() < 1e-8);
    assert!(field.value(ix, iy).im.abs() < 1e-8);
    assert_eq!(field.to_csv(), text);
}

#[test]
fn stack_analyze_and_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_config(d);
    write(d, "h.json", r#"{"family": "hermite", "hbar": 1.0, "n": 1}"#);
    let out = metamorph(
        d,
        &["--config", "run.json", "transform", "--signal", "h.json", "--b", "0.25", "--r", "1.2", "--out", "f.csv", "--stack-out", "stack"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for name in ["slice_b0_r0.csv", "slice_b+h_r0.csv", "slice_b-h_r0.csv", "slice_b0_r+h.csv", "slice_b0_r-h.csv", "meta.json"] {
        assert!(d.join("stack").join(name).exists(), "{name}");
    }
    assert_eq!(
        std::fs::read(d.join("f.csv")).unwrap(),
        std::fs::read(d.join("stack/slice_b0_r0.csv")).unwrap()
    );

    let out = metamorph(d, &["--config", "run.json", "analyze", "--stack", "stack", "--report", "report.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    for key in ["c1", "c2", "s1", "s2", "parabolic", "norms"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    assert!(report["c1"].as_f64().unwrap() < 1e-6);
    assert_eq!(report["convergence_verified"], serde_json::Value::Bool(true));

    let out = metamorph(d, &["--config", "run.json", "reconstruct", "--stack", "stack", "--fiducial", "gaussian", "--out", "back.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(d.join("back.json")).unwrap();
    let doc = SignalDoc::from_json(&text).unwrap();
    assert_eq!(doc.to_json(), text);
    let back = doc.to_signal().unwrap();
    let want = SignalDoc::from_json(r#"{"family": "hermite", "hbar": 1.0, "n": 1}"#).unwrap().to_signal().unwrap();
    let grid = back.grid().copied().unwrap();
    let err = back
        .sample(&grid)
        .values()
        .iter()
        .zip(want.sample(&grid).values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
}

#[test]
fn fiducial_certification_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "bad.json", r#"{"E_s": 0, "E_x": 1, "E_y": 1, "E_b": 0, "E_r": 0}"#);
    let out = metamorph(d, &["fiducial", "--spec", "bad.json", "--out", "phi.json"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("square integrability"), "{}", stderr(&out));
    assert!(!d.join("phi.json").exists());

    write(d, "airy.json", r#"{"E_s": 0, "E_x": -1, "E_y": 1, "E_b": 1, "E_r": 0}"#);
    let out = metamorph(d, &["fiducial", "--spec", "airy.json", "--out", "phi.json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("phi.json")).unwrap()).unwrap();
    assert_eq!(doc["certified"], serde_json::Value::Bool(true));
    assert!(doc["annihilation_residual"].as_f64().unwrap() < 1e-7);
    assert!((doc["norm"].as_f64().unwrap() - 1.0).abs() < 1e-10);

    // the certified document can serve as a fiducial
    small_config(d);
    write(d, "g.json", r#"{"family": "gaussian", "hbar": 1.0}"#);
    let out = metamorph(d, &["transform", "--signal", "g.json", "--fiducial", "phi.json", "--out", "f.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn invalid_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "g.json", r#"{"family": "gaussian", "hbar": 1.0}"#);
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["transform", "--signal", "missing.json", "--out", "f.csv"], "missing.json"),
        (vec!["transform", "--signal", "g.json", "--r", "0", "--out", "f.csv"], "r must be positive"),
        (vec!["transform", "--signal", "g.json", "--fiducial", "nope.json", "--out", "f.csv"], "nope.json"),
        (vec!["analyze", "--stack", "no_such_dir", "--report", "r.json"], "meta.json"),
        (vec!["verify", "--suite", "everything"], "everything"),
    ];
    for (args, needle) in cases {
        let out = metamorph(d, &args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(stderr(&out).contains(needle), "{args:?}: {}", stderr(&out));
    }
    write(d, "run.json", r#"{"n": 500}"#);
    let out = metamorph(d, &["--config", "run.json", "verify", "--suite", "group"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("power of two"));
    write(d, "h2.json", r#"{"hbar": 2.0}"#);
    let out = metamorph(d, &["--config", "h2.json", "transform", "--signal", "g.json", "--out", "f.csv"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("hbar"));
}
