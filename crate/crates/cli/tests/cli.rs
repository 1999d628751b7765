use std::process::Command;

use timekk_cli::main_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["timekk"];
    argv.extend_from_slice(args);
    let code = main_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn zero_rows(args: &[&str]) -> usize {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    out.lines().count() - 1
}

#[test]
fn model_sample_starts_at_one() {
    let (code, out, _) = run(&["model-sample", "--model", "two_state"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,re,im"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 1.0, 0.0]);
}

#[test]
fn zero_count_follows_ratio() {
    assert_eq!(zero_rows(&["zeros", "--model", "two_state"]), 17);
    assert_eq!(zero_rows(&["zeros", "--model", "two_state", "--param", "ratio=4"]), 9);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["zeros", "--model", "two_state", "--format", "json"][..],
        &["fourier", "--model", "two_state", "--n-max", "16"][..],
        &["verify", "--model", "two_state", "--format", "json"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.0, 0, "{}", a.2);
        assert_eq!(a.1, b.1, "{args:?}");
    }
}

#[test]
fn non_integer_ratio_is_rejected() {
    let (code, _, err) = run(&["zeros", "--model", "two_state", "--param", "ratio=7.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("not cyclic"), "{err}");
}

#[test]
fn unknown_parameter_is_a_usage_error() {
    let (code, _, err) = run(&["verify", "--model", "two_state", "--param", "bogus=1"]);
    assert_eq!(code, 2);
    assert!(err.contains("bogus"));
}

#[test]
fn mixed_half_planes_are_sign_ambiguous() {
    let (code, _, err) = run(&["verify", "--model", "synthetic", "--param", "zeros=2;0.5"]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("sign-ambiguous"));
}

#[test]
fn fixed_sign_overrides_detection() {
    let (code, out, err) = run(&["verify", "--model", "synthetic", "--param", "zeros=2;0.5", "--sign", "+1", "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["sign"], 1);
}

#[test]
fn coarse_propagation_is_a_numerical_failure() {
    let (code, _, err) = run(&["propagate", "--model", "two_state", "--param", "eps=0.001", "--grid", "200,12.566370614359172"]);
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("step size"));
}

#[test]
fn show_config_prints_defaults() {
    let (code, out, _) = run(&["verify", "--model", "packet", "--show-config"]);
    assert_eq!(code, 0);
    assert!(out.contains("delta = 1"));
    assert!(out.contains("grid = -100,"));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# two-state, coarse ratio\nmodel = two_state\nratio = 4\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(zero_rows(&["zeros", "--config", p]), 9);
    // flags win over the file
    assert_eq!(zero_rows(&["zeros", "--config", p, "--param", "ratio=8"]), 17);
}

#[test]
fn out_writes_siblings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let (code, stdout, err) = run(&["verify", "--model", "frozen", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.is_empty());
    let plot = std::fs::read_to_string(&out).unwrap();
    assert!(plot.starts_with("t,log_modulus,log_modulus_reconstructed,phase,phase_reconstructed,excluded"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("v.report.json")).unwrap()).unwrap();
    assert_eq!(report.as_array().unwrap().len(), 2);
    assert!(report[0]["residual_max"].as_f64().unwrap() < 1e-8);
}

#[test]
fn input_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sample = dir.path().join("s.csv");
    let (code, _, err) = run(&["model-sample", "--model", "two_state", "--out", sample.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (code, out, err) = run(&["zeros", "--input", sample.to_str().unwrap(), "--period", "12.566370614359172", "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["degree"], 17);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_timekk");
    let st = Command::new(bin).args(["zeros", "--model", "nope"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = Command::new(bin).args(["verify", "--model", "synthetic", "--param", "zeros=2;0.5"]).output().unwrap();
    assert_eq!(st.status.code(), Some(3));
    let st = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(st.status.code(), Some(0));
}
