use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use uncervals::io::{read_covariates, read_dataset};
use uncervals_core::conformal::{uncervals as run_library, Mode, UncervalsConfig};
use uncervals_core::{EstimatorSpec, FeatureMap};

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uncervals")).args(args).current_dir(dir).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = cli(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn pipeline(dir: &Path) {
    ok(dir, &["simulate", "--n", "240", "--seed", "5", "--out", "data.csv", "--manifest", "sim.json"]);
    ok(
        dir,
        &[
            "fit",
            "--data",
            "data.csv",
            "--model",
            "weibph",
            "--seed",
            "3",
            "--out",
            "model.json",
            "--manifest",
            "fit.json",
        ],
    );
    ok(
        dir,
        &["calibrate", "--model-file", "model.json", "--alpha", "0.1", "--out", "cal.json", "--manifest", "cal-m.json"],
    );
    fs::write(dir.join("x.csv"), "x1\n-1.5\n0\n0.25\n1.75\n").unwrap();
    ok(
        dir,
        &[
            "predict",
            "--model-file",
            "model.json",
            "--calibration",
            "cal.json",
            "--covariates",
            "x.csv",
            "--out",
            "pred.csv",
            "--manifest",
            "pred-m.json",
        ],
    );
}

const OUTPUTS: [&str; 5] = ["data.csv", "data.truth.csv", "model.json", "cal.json", "pred.csv"];

#[test]
fn pipeline_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    pipeline(a.path());
    pipeline(b.path());
    for f in OUTPUTS.iter().chain(&["sim.json", "fit.json", "cal-m.json", "pred-m.json"]) {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn replay_reproduces_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline(d);
    let before: Vec<Vec<u8>> = OUTPUTS.iter().map(|f| fs::read(d.join(f)).unwrap()).collect();
    let manifests = ["sim.json", "fit.json", "cal-m.json", "pred-m.json"];
    let manifest_bytes: Vec<Vec<u8>> = manifests.iter().map(|f| fs::read(d.join(f)).unwrap()).collect();
    for f in OUTPUTS {
        fs::remove_file(d.join(f)).unwrap();
    }
    for m in manifests {
        ok(d, &["replay", m]);
    }
    for (f, bytes) in OUTPUTS.iter().zip(&before) {
        assert_eq!(&fs::read(d.join(f)).unwrap(), bytes, "{f} differs after replay");
    }
    for (f, bytes) in manifests.iter().zip(&manifest_bytes) {
        assert_eq!(&fs::read(d.join(f)).unwrap(), bytes, "{f} was rewritten");
    }
}

#[test]
fn cli_predictions_equal_library_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline(d);
    let data = read_dataset(&d.join("data.csv")).unwrap();
    let (_, xs) = read_covariates(&d.join("x.csv")).unwrap();
    let config = UncervalsConfig::new(0.1, Mode::Estar, EstimatorSpec::weibull_ph(FeatureMap::Identity), 3);
    let sets = run_library(&data, &config, &xs).unwrap();

    let text = fs::read_to_string(d.join("pred.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,lpb"));
    for (line, set) in lines.zip(&sets) {
        let lpb: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(lpb.to_bits(), set.lpb().to_bits(), "{line}");
    }
}

#[test]
fn experiment_reports_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let common = ["--n", "150", "--replications", "12", "--n-test", "50", "--seed", "9", "--method", "naive"];
    let run = |threads: &str, out: &str| {
        let mut args = vec!["coverage", "--threads", threads, "--out", out, "--manifest", "m.json"];
        args.extend_from_slice(&common);
        ok(d, &args);
        fs::read(d.join(out)).unwrap()
    };
    assert_eq!(run("1", "one.json"), run("4", "four.json"));

    let gof = |threads: &str, out: &str| {
        ok(
            d,
            &["gof", "--n", "300", "--replications", "6", "--threads", threads, "--out", out, "--manifest", "g.json"],
        );
        fs::read(d.join(out)).unwrap()
    };
    assert_eq!(gof("1", "g1.json"), gof("3", "g3.json"));
}

#[test]
fn config_file_is_overridden_by_flags_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("run.toml"), "out = \"sim.csv\"\n[sim]\nn = 40\nseed = 2\nshape = 1.5\n").unwrap();
    ok(d, &["simulate", "--config", "run.toml", "--n", "25"]);
    assert_eq!(read_dataset(&d.join("sim.csv")).unwrap().len(), 25);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["sim"]["n"], 25);
    assert_eq!(manifest["config"]["sim"]["shape"], 1.5);
    assert_eq!(manifest["config"]["sim"]["seed"], 2);
    assert_eq!(manifest["config_file"], "run.toml");
    assert_eq!(manifest["flags"]["sim"]["n"], 25);
}

fn exit_code(dir: &Path, args: &[&str]) -> (i32, Value) {
    let out = cli(dir, args);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap_or(Value::Null);
    (out.status.code().unwrap(), err)
}

#[test]
fn failures_map_to_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let (code, err) = exit_code(d, &["fit", "--no-such-flag"]);
    assert_eq!((code, err["error"].as_str()), (2, Some("usage")));

    let (code, err) = exit_code(d, &["fit", "--data", "missing.csv", "--out", "m.json"]);
    assert_eq!((code, err["error"].as_str()), (3, Some("io")));

    fs::write(d.join("bad.csv"), "l,u,x1\n0.1,0.5,1\n0.9,0.4,0.0\n").unwrap();
    let (code, err) = exit_code(d, &["fit", "--data", "bad.csv", "--out", "m.json"]);
    assert_eq!(code, 3);
    assert!(err["message"].as_str().unwrap().contains('2'), "{err}");

    fs::write(d.join("right.csv"), "l,u,x1\n0.1,inf,1\n0.5,inf,0.0\n0.2,inf,2\n0.3,inf,1\n").unwrap();
    let (code, err) = exit_code(d, &["fit", "--data", "right.csv", "--model", "weibph", "--out", "m.json"]);
    assert_eq!((code, err["error"].as_str()), (4, Some("numeric")));

    let (code, _) = exit_code(d, &["calibrate", "--out", "c.json"]);
    assert_eq!(code, 2);
}

#[test]
fn two_sided_sets_use_lo_hi_columns() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline(d);
    ok(
        d,
        &[
            "calibrate",
            "--model-file",
            "model.json",
            "--b",
            "0.5",
            "--alpha",
            "0.2",
            "--out",
            "cal2.json",
            "--manifest",
            "c2.json",
        ],
    );
    ok(
        d,
        &[
            "predict",
            "--model-file",
            "model.json",
            "--calibration",
            "cal2.json",
            "--covariates",
            "x.csv",
            "--out",
            "two.csv",
            "--manifest",
            "p2.json",
        ],
    );
    let text = fs::read_to_string(d.join("two.csv")).unwrap();
    assert!(text.starts_with("x1,lo,hi\n"), "{text}");
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!(v[1] <= v[2] && v[2].is_finite());
    }
}
