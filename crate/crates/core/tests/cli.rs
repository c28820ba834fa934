use std::fs;
use std::process::Command;

use xxring::cli::{run, run_verify, EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_VERIFY_FAILED};
use xxring::oracle::Grid;
use xxring::{closed_form_eigensystem, ModelParams};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_xxring"))
}

fn lib_run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("xxring").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn eval_zero_field_ferromagnet() {
    let out = bin()
        .args(["eval", "--j", "-1", "--b", "0", "--tau", "0.5", "--pair", "12"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    // Gibbs weights e^4, e^-2 and 1 on the zero-field levels
    let e4 = 4f64.exp();
    let em2 = (-2f64).exp();
    let z = 2.0 * e4 + 2.0 + 4.0 * em2;
    let y = (2.0 * e4 / 3.0 + em2 / 3.0 - em2) / z;
    let sqrt_uv = (1.0 + e4 / 3.0 + 2.0 * em2 / 3.0) / z;
    let expected = 2.0 * (y.abs() - sqrt_uv);
    assert!((v - expected).abs() < 1e-11, "{v} vs {expected}");
    assert!((v - 0.305).abs() < 1e-3);
}

#[test]
fn eval_strong_field_antiferromagnet() {
    let (code, out, _) = lib_run(&["eval", "--j", "1", "--b", "10", "--tau", "0.01", "--pair", "12"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.trim().parse::<f64>().unwrap() >= 0.999);
}

#[test]
fn eval_zero_temperature_is_rejected() {
    let out = bin()
        .args(["eval", "--j", "1", "--b", "1", "--tau", "0", "--pair", "12"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INVALID));
    assert!(!out.stderr.is_empty());
}

#[test]
fn sweep_three_by_five() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let status = bin()
        .args(["sweep", "--pair", "13", "--j", "-1", "--b-range", "0:2:3", "--tau-range", "0.1:1:5", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 16);
    assert_eq!(lines[0], "pair,j_sign,B,tau,concurrence");
    let bs: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(&bs[..6], ["0", "0", "0", "0", "0", "1"]);
}

#[test]
fn sweep_field_sign_symmetry() {
    let (code, out, _) = lib_run(&["sweep", "--j", "-1", "--b", "-3,3", "--tau-range", "0.05:3:40"]);
    assert_eq!(code, EXIT_OK);
    let values: Vec<&str> = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(values[..40], values[40..]);
}

#[test]
fn sweep_empty_tau_range() {
    let (code, _, err) = lib_run(&["sweep", "--b", "1", "--tau-range", "0.1:1:0"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("tau"));
}

#[test]
fn sweep_unwritable_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("s.csv");
    let (code, _, _) = lib_run(&["sweep", "--b", "1", "--tau", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_IO);
}

#[test]
fn sweep_config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    let out = dir.path().join("out.csv");
    fs::write(
        &cfg,
        format!(
            "pair = 13\nj = -1\nb = [0.5, 1.0]\ntau_range = \"0.2:1:3\"\nthreads = 2\nout = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let (code, _, err) = lib_run(&["sweep", "--config", cfg.to_str().unwrap(), "--pair", "12"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().skip(1).all(|l| l.starts_with("12,-1,")));
}

#[test]
fn sweep_output_is_deterministic() {
    let args = ["sweep", "--pair", "13", "--j", "1", "--b-range", "-12:12:31", "--tau-range", "0.05:3:17"];
    let reference = lib_run(&args).1;
    for threads in ["1", "2", "7"] {
        let mut a = vec!["--threads", threads];
        a.extend_from_slice(&args);
        assert_eq!(lib_run(&a).1, reference, "threads = {threads}");
    }
    let out = bin().args(args).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), reference);
}

#[test]
fn figure_presets_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for (id, series) in [(1, 6), (2, 6), (3, 6), (4, 4)] {
        let (code, _, err) = lib_run(&["figure", &id.to_string(), "--out", out]);
        assert_eq!(code, EXIT_OK, "{err}");
        let text = fs::read_to_string(dir.path().join(format!("fig{id}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 1 + series * 200, "fig{id}");
    }
    assert_eq!(lib_run(&["figure", "5", "--out", out]).0, EXIT_INVALID);
}

#[test]
fn limits_report() {
    let (code, out, _) = lib_run(&["limits"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 9);
    assert!(out.lines().skip(1).all(|l| l.ends_with("\tPASS")));
}

#[test]
fn verify_default_and_extended_grids() {
    let out = bin().arg("verify").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("result: PASS"));
    let out = bin()
        .args(["verify", "--b-max", "50", "--tau-min", "0.005"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn verify_catches_corrupted_closed_form() {
    let corrupted = |p: &ModelParams| {
        let mut sys = closed_form_eigensystem(p)?;
        sys.energies[5] += 1e-3;
        Ok(sys)
    };
    let mut out = Vec::new();
    let code = run_verify(&Grid::default(), corrupted, &mut out);
    assert_eq!(code, EXIT_VERIFY_FAILED);
    assert!(String::from_utf8(out).unwrap().contains("FAIL"));
}
