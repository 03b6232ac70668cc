use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ttpack(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttpack"))
        .args(args)
        .env("TTPACK_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn census_of_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "cycle3.txt", "n=3\n101\n");
    let out = ttpack(&["census", "--in", &f], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!((v["a"].as_u64(), v["t"].as_u64()), (Some(0), Some(1)));
    for key in ["tool_version", "format_version", "seed", "config"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn malformed_input_names_offset() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.txt", "n=4\n10x101\n");
    let out = ttpack(&["census", "--in", &f], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 6"));
    let short = write(dir.path(), "short.txt", "n=4\n101\n");
    assert_eq!(ttpack(&["solve", "--in", &short], dir.path()).status.code(), Some(2));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = ttpack(&["solve", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(ttpack(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(ttpack(&["construct", "--qr7", "--turan3", "--n", "9"], dir.path()).status.code(), Some(2));
    assert_eq!(ttpack(&["--version"], dir.path()).status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["experiment", "density", "--n", "40", "--trials", "6", "--seed", "9", "--improve"],
        &["experiment", "edge-stats", "--n", "30", "--k", "4"],
        &["fmin", "--n", "6"],
        &["lp", "--budget", "35/4"],
    ];
    for args in runs {
        let a = ttpack(args, dir.path());
        let b = ttpack(args, dir.path());
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let one = ttpack(&["--workers", "1", "experiment", "density", "--n", "40", "--trials", "6"], dir.path());
    let four = ttpack(&["--workers", "4", "experiment", "density", "--n", "40", "--trials", "6"], dir.path());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn solve_then_verify_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let t = ttpack(&["construct", "--turan3", "--n", "8", "--filler", "random", "--seed", "4"], dir.path());
    assert_eq!(t.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&t.stderr).contains("V1->V2->V3->V1"));
    let host = write(dir.path(), "t8.txt", &String::from_utf8(t.stdout).unwrap());
    let solved = ttpack(&["solve", "--in", &host, "--k", "3"], dir.path());
    let v = json(&solved);
    assert_eq!(v["value"], 7);
    assert_eq!(v["optimal"], true);
    let cert = write(dir.path(), "p.json", &String::from_utf8(solved.stdout).unwrap());
    let ok = ttpack(&["verify", "packing", "--in", &host, "--packing", &cert], dir.path());
    assert_eq!(ok.status.code(), Some(0));

    let forged = write(dir.path(), "forged.json", r#"{"k": 3, "copies": [[0, 1, 2], [0, 1, 5]]}"#);
    let bad = ttpack(&["verify", "packing", "--in", &host, "--packing", &forged], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["valid"], false);
}

#[test]
fn text_solve_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let host = write(dir.path(), "tt7.txt", &format!("n=7\n{}\n", "1".repeat(21)));
    let target = dir.path().join("report.txt");
    let out = ttpack(
        &["solve", "--in", &host, "--format", "text", "--out", target.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(target).unwrap();
    assert!(text.starts_with("value=7 optimal=true\n"));
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn designs_emit_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let fano = ttpack(&["design", "--fano"], dir.path());
    let path = write(dir.path(), "fano.txt", &String::from_utf8(fano.stdout).unwrap());
    assert_eq!(ttpack(&["verify", "design", "--in", &path], dir.path()).status.code(), Some(0));
    let broken = write(dir.path(), "broken.txt", "v=7 k=3 b=7\n0 1 2\n0 1 3\n0 4 5\n0 5 6\n1 4 6\n2 3 6\n2 4 5\n");
    assert_eq!(ttpack(&["verify", "design", "--in", &broken], dir.path()).status.code(), Some(1));
    let all = ttpack(&["design", "--all-sts7"], dir.path());
    assert_eq!(String::from_utf8_lossy(&all.stdout).matches("v=7 k=3 b=7").count(), 30);
    let ag = ttpack(&["design", "--ag2"], dir.path());
    assert!(String::from_utf8_lossy(&ag.stdout).starts_with("v=49 k=7 b=56\n"));
}

#[test]
fn density_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = ttpack(&["experiment", "density", "--n", "3", "--trials", "5", "--format", "csv"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,copies,covered_fraction"));
    for line in lines {
        let fraction: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(fraction == 0.0 || fraction == 1.0);
    }
}

#[test]
fn enumeration_uses_cache_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = ttpack(&["enumerate", "--n", "7", "--score", "5,3,3,3,3,2,2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["count"], 15);
    assert!(dir.path().join("classes-n7.v1.txt").exists());
    let again = ttpack(&["enumerate", "--n", "7", "--score", "5,3,3,3,3,2,2"], dir.path());
    assert_eq!(out.stdout, again.stdout);
}
