use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn isoembed(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoembed"))
        .args(args)
        .current_dir(dir)
        .env_remove("ISOEMBED_THREADS")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not a report ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("elapsed_ms");
    v
}

const SEARCH: &[&str] = &[
    "search-misaligner", "--m", "16", "--k", "16", "--t", "16", "--alpha", "0.1", "--preprocess", "1000",
    "--budget", "20000",
];

fn searched(dir: &Path, file: &str) -> Output {
    let mut args = SEARCH.to_vec();
    args.extend(["--out", file]);
    isoembed(dir, &args)
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(isoembed(dir.path(), &["gen-lsm", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(isoembed(dir.path(), &["bogus"]).status.code(), Some(2));
    assert_eq!(isoembed(dir.path(), &["check-lsm", "missing.txt"]).status.code(), Some(2));
    // exactly one of --exhaustive and --sampled
    assert_eq!(isoembed(dir.path(), &["verify-isometry", "--spec", "x.json"]).status.code(), Some(2));
    assert_eq!(
        isoembed(dir.path(), &["verify-isometry", "--spec", "x.json", "--exhaustive", "--sampled"]).status.code(),
        Some(2)
    );
    assert_eq!(isoembed(dir.path(), &["--version"]).status.code(), Some(0));
}

#[test]
fn failing_misaligner_check_exits_with_one_and_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.txt"), "isoembed-misaligner v1\n4 3 2 0.5\n*0*1\n*0*0\n*1*1\n").unwrap();
    let out = isoembed(dir.path(), &["check-misaligner", "bad.txt"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["status"], "fail");
    assert_eq!(r["inputs"][0]["path"], "bad.txt");
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let failing: Vec<&Value> = r["payload"]["properties"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["pass"] == false)
        .collect();
    assert!(!failing.is_empty());
    let witness = &failing[0]["witnesses"][0];
    assert!(witness["codewords"].is_array(), "{witness}");
    assert!(witness["measured"].as_f64().unwrap() < witness["required"].as_f64().unwrap());
}

#[test]
fn rate_report_for_built_specs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(searched(d, "m.txt").status.code(), Some(0));
    let build = [
        "build-embedding", "--family", "misaligner", "--misaligner", "m.txt", "--epsilon", "0.05", "--n", "8",
        "--out", "mis.json",
    ];
    assert_eq!(isoembed(d, &build).status.code(), Some(0));
    let folk = isoembed(d, &["build-embedding", "--family", "folklore", "--n", "16", "--out", "folk.json"]);
    assert_eq!(folk.status.code(), Some(0));

    let out = isoembed(d, &["rate-report", "--spec", "mis.json", "--spec", "folk.json", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("mis.json\tmisaligner\t0.0625 (1/16)"), "{text}");
    assert!(text.contains("folk.json\tfolklore\t0.0769230769231 (1/13)"), "{text}");

    let out = isoembed(d, &["verify-isometry", "--spec", "mis.json", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&out);
    assert_eq!(r["payload"]["pairs_checked"], 256 * 255 / 2);
}

#[test]
fn attack_on_a_synthetic_map_finds_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out = isoembed(dir.path(), &["attack", "--synthetic-rate", "0.6", "--n", "200", "--max-delta", "8"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["status"], "fail");
    assert_eq!(r["payload"]["cost"]["total"], 10);
}

#[test]
fn outputs_are_reproducible() {
    let runs: Vec<(Vec<Vec<u8>>, Vec<Value>)> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let d = dir.path();
            let mut reports = Vec::new();
            let mut run = |args: &[&str]| {
                let out = isoembed(d, args);
                assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
                reports.push(without_timing(report(&out)));
            };
            run(&["gen-lsm", "--epsilon", "0.5", "--sigma", "129", "--n", "300", "--seed", "4", "--out", "w.txt"]);
            let mut search = SEARCH.to_vec();
            search.extend(["--out", "m.txt", "--seed", "1"]);
            run(&search);
            run(&[
                "build-embedding", "--family", "misaligner", "--misaligner", "m.txt", "--epsilon", "0.05", "--n",
                "12", "--seed", "2", "--out", "mis.json",
            ]);
            run(&["build-embedding", "--family", "third-rate", "--rate", "1/4", "--n", "20", "--out", "tr.json"]);
            run(&["build-embedding", "--family", "product", "--rho", "1/2", "--n", "20", "--out", "p.json"]);
            let files = ["w.txt", "m.txt", "mis.json", "tr.json", "p.json"]
                .iter()
                .map(|f| fs::read(d.join(f)).unwrap())
                .collect();
            (files, reports)
        })
        .collect();
    assert_eq!(runs[0].0, runs[1].0);
    assert_eq!(runs[0].1, runs[1].1);
}
