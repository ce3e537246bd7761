//! End-to-end runs of the `riskprof` binary: output formats, exit codes,
//! and byte-level determinism across reruns.

use std::path::Path;
use std::process::{Command, Output};

fn riskprof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riskprof"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn write(path: &Path, body: &str) {
    std::fs::write(path, body).unwrap();
}

#[test]
fn score_reports_named_metrics_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("fc.csv");
    write(&input, "model_id,realized_prob,correct\nm,0.2,0\nm,0.8,1\n");

    let out = riskprof(&["score", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let got = stdout(&out);
    // Geometric mean of {0.2, 0.8} is exactly 0.4; arithmetic mean 0.5.
    assert_eq!(
        got,
        "{\"decisiveness\":0.5,\"accuracy\":0.4,\"robustness\":0.342649583541,\
         \"surprisal\":0.916290731874,\"n_zero\":0,\"n\":2}\n"
    );

    let rerun = riskprof(&["score", input.to_str().unwrap()]);
    assert_eq!(out.stdout, rerun.stdout);
}

#[test]
fn score_saturates_on_zero_probability() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("fz.csv");
    write(&input, "realized_prob\n0.5\n0\n");

    let out = riskprof(&["score", input.to_str().unwrap()]);
    assert!(out.status.success());
    let got = stdout(&out);
    assert!(got.contains("\"accuracy\":0"), "{got}");
    assert!(got.contains("\"robustness\":0"), "{got}");
    assert!(got.contains("\"surprisal\":\"inf\""), "{got}");
    assert!(got.contains("\"n_zero\":1"), "{got}");

    // A floor lifts the zero and de-saturates every metric.
    let floored = riskprof(&["score", input.to_str().unwrap(), "--floor", "0.01"]);
    assert!(floored.status.success());
    let got = stdout(&floored);
    assert!(!got.contains("inf"), "{got}");
    assert!(got.contains("\"n_zero\":0"), "{got}");
}

#[test]
fn score_rejects_bad_rows_with_row_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    write(&input, "realized_prob\n0.4\n1.7\n");

    let out = riskprof(&["score", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("row 2"), "{}", stderr(&out));

    let empty = dir.path().join("empty.csv");
    write(&empty, "realized_prob\n");
    let out = riskprof(&["score", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn profile_emits_sorted_curve_with_named_points() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("half.csv");
    write(&input, "realized_prob\n0.5\n0.5\n0.5\n");

    let out = riskprof(&["profile", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let got = stdout(&out);
    let lines: Vec<&str> = got.lines().collect();
    assert_eq!(lines[0], "r,value");
    assert_eq!(lines.len(), 23, "22 default grid points plus header");
    assert!(got.contains("\n-0.666666666667,0.5\n"), "{got}");
    assert!(got.contains("\n0,0.5\n"), "{got}");
    assert!(got.contains("\n1,0.5\n"), "{got}");
    // Constant forecasts profile flat at the constant.
    for line in &lines[1..] {
        assert!(line.ends_with(",0.5"), "{line}");
    }
}

#[test]
fn profile_curve_is_nondecreasing_in_r() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("mix.csv");
    write(&input, "realized_prob\n0.05\n0.3\n0.6\n0.9\n");

    let out = riskprof(&[
        "profile",
        input.to_str().unwrap(),
        "--r-min",
        "-2",
        "--r-max",
        "2",
        "--r-step",
        "0.25",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let values: Vec<f64> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1] + 1e-12));

    let bad = riskprof(&["profile", input.to_str().unwrap(), "--r-step", "-1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("r_step"));
}

#[test]
fn bench_is_deterministic_and_writes_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let args = [
        "bench", "--dims", "3", "--trials", "2", "--n-train", "8", "--n-test", "40", "--out",
        out_path.to_str().unwrap(),
    ];

    let first = riskprof(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    let first_bytes = std::fs::read(&out_path).unwrap();
    let text = String::from_utf8(first_bytes.clone()).unwrap();
    assert!(text.starts_with("dims,pct_correct,decisiveness,accuracy,robustness\n"));
    assert_eq!(text.lines().count(), 4, "header plus one row per dims");

    let meta = std::fs::read_to_string(dir.path().join("sweep.meta")).unwrap();
    assert!(meta.contains("seed=21061"), "{meta}");
    assert!(meta.contains("trials=2"), "{meta}");

    let second = riskprof(&args);
    assert!(second.status.success());
    assert_eq!(first_bytes, std::fs::read(&out_path).unwrap());
}

#[test]
fn bench_config_file_yields_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    write(
        &cfg_path,
        "# tiny run\ndims=2\ntrials=5\nn_train=8\nn_test=40\nseed=7\n",
    );
    let out_path = dir.path().join("sweep.csv");

    let out = riskprof(&[
        "bench",
        "--config",
        cfg_path.to_str().unwrap(),
        "--trials",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let meta = std::fs::read_to_string(dir.path().join("sweep.meta")).unwrap();
    assert!(meta.contains("trials=2"), "flag beats file: {meta}");
    assert!(meta.contains("seed=7"), "file beats default: {meta}");

    let unknown = dir.path().join("bad.cfg");
    write(&unknown, "n_trails=2\n");
    let out = riskprof(&["bench", "--config", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("n_trails"), "{}", stderr(&out));
}

#[test]
fn bench_rejects_invalid_counts_by_field() {
    let out = riskprof(&["bench", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("n_trials"), "{}", stderr(&out));

    let out = riskprof(&["bench", "--dims", "11"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("n_features"), "{}", stderr(&out));
}

#[test]
fn bench_writes_per_dims_curves() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = format!("{}/curve_", dir.path().to_str().unwrap());
    let out = riskprof(&[
        "bench", "--dims", "2", "--trials", "2", "--n-train", "8", "--n-test", "40",
        "--curve-out", &prefix, "--r-min", "-1", "--r-max", "1", "--r-step", "0.5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for dims in 1..=2 {
        let curve =
            std::fs::read_to_string(format!("{prefix}dims{dims}.csv")).expect("curve file");
        let lines: Vec<&str> = curve.lines().collect();
        assert_eq!(lines[0], "r,value");
        assert_eq!(lines.len(), 7, "6 grid points plus header");
        assert!(curve.contains("\n-0.666666666667,"), "{curve}");
    }
}

#[test]
fn dist_pdf_tabulates_standard_normal_mode() {
    let out = riskprof(&["dist", "pdf", "--family", "gaussian"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let got = stdout(&out);
    let lines: Vec<&str> = got.lines().collect();
    assert_eq!(lines[0], "x,pdf");
    assert_eq!(lines.len(), 202, "201 default points plus header");
    assert!(got.contains("\n0,0.398942280401\n"), "mode row: {got}");

    // Compact support: the default table spans the support and the edge
    // densities vanish.
    let compact = riskprof(&["dist", "pdf", "--family", "gaussian", "--r-d", "0.6"]);
    let got = stdout(&compact);
    let first = got.lines().nth(1).unwrap();
    let last = got.lines().last().unwrap();
    assert_eq!(first.split(',').nth(1).unwrap(), "0");
    assert_eq!(last.split(',').nth(1).unwrap(), "0");
}

#[test]
fn dist_sample_is_seed_deterministic() {
    let a = riskprof(&[
        "dist", "sample", "--family", "exponential", "--r-d", "-0.3", "--n", "50", "--seed", "9",
    ]);
    let b = riskprof(&[
        "dist", "sample", "--family", "exponential", "--r-d", "-0.3", "--n", "50", "--seed", "9",
    ]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let got = stdout(&a);
    assert_eq!(got.lines().next().unwrap(), "value");
    assert_eq!(got.lines().count(), 51);

    let other = riskprof(&[
        "dist", "sample", "--family", "exponential", "--r-d", "-0.3", "--n", "50", "--seed", "10",
    ]);
    assert_ne!(a.stdout, other.stdout, "different seeds draw differently");
}

#[test]
fn dist_identities_reports_closed_form_match() {
    let out = riskprof(&["dist", "identities"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let got = stdout(&out);
    let lines: Vec<&str> = got.lines().collect();
    assert_eq!(
        lines[0],
        "family,r_d,sigma,quadrature,closed_form,rel_dev,diverged"
    );
    assert_eq!(lines.len(), 37, "36 identity rows plus header");
    // Classical Gaussian at unit scale: density average is 1/sqrt(2 pi e).
    assert!(
        got.contains("coupled_gaussian,0,1,0.241970724519,0.241970724519,"),
        "{got}"
    );
    assert!(!got.contains(",true\n"), "no diverged rows: {got}");
    assert!(stderr(&out).contains("max rel dev"), "{}", stderr(&out));
}

#[test]
fn invalid_distribution_parameters_exit_2() {
    let out = riskprof(&["dist", "pdf", "--family", "gaussian", "--sigma", "-1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = riskprof(&["dist", "pdf", "--family", "gaussian", "--points", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("points"), "{}", stderr(&out));
}
