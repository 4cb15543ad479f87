use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subspace-lab")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const SQRT2: &str = "poly=[-2,0,1]; interval=[1,2]";

#[test]
fn roth_scan_sqrt2() {
    let v = json(&["roth", "scan", "--xi", SQRT2, "--delta", "1/4", "--max-height", "100"]);
    let alphas: Vec<&str> = v["solutions"].as_array().unwrap().iter().map(|s| s["alpha"].as_str().unwrap()).collect();
    // |√2 - p/q| <= max(p, q)^(-9/4): 3/2 misses by 0.0858 > 0.0844, 7/5 by 0.0142 > 0.0126
    assert_eq!(alphas, ["1"]);
    assert_eq!(v["gap_audit"], "pass");
    assert_eq!(v["solutions"][0]["side"], "below");
    assert_eq!(v["solutions"][0]["size_class"], "small");
}

#[test]
fn golden_roth_scan() {
    let out = run(&["roth", "scan", "--xi", SQRT2, "--delta", "1/16", "--max-height", "300"]);
    assert!(out.status.success());
    let golden = include_str!("golden/roth_scan_sqrt2.json");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn missing_interval_is_invalid_input() {
    let out = run(&["roth", "scan", "--xi", "poly=[-2,0,1]", "--delta", "1/2", "--max-height", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = run(&["roth", "scan", "--xi", SQRT2, "--delta", "3/2", "--max-height", "10"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_matches_json() {
    let args = ["roth", "scan", "--xi", SQRT2, "--delta", "1/8", "--max-height", "200"];
    let v = json(&args);
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let out = run(&csv_args);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "alpha").unwrap();
    let delta = headers.iter().position(|h| h == "delta").unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let from_json: Vec<&str> = v["solutions"].as_array().unwrap().iter().map(|s| s["alpha"].as_str().unwrap()).collect();
    let from_csv: Vec<&str> = rows.iter().map(|r| &r[col]).collect();
    assert_eq!(from_json, from_csv);
    assert!(rows.iter().all(|r| &r[delta] == "1/8"));
    assert!(from_csv.len() >= 3);
}

#[test]
fn report_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let system = example("unit_sum.toml");
    for (path, threads) in [(&a, "1"), (&b, "2")] {
        let out = run(&["subspace", "scan", "--system", &system, "--max-height", "6", "--threads", threads, "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    // (1, -1, 0) lies on x1 + x2 + x3 = 0
    assert!(v["solutions"].as_array().unwrap().iter().any(|s| s["x"] == serde_json::json!(["1", "-1", "0"])));
}

#[test]
fn u0_reports() {
    let v = json(&["subspace", "u0", "--system", &example("cubic.toml")]);
    assert_eq!(v["semistable"], true);
    assert_eq!(v["mu0"], "-1/6");
    let v = json(&["subspace", "u0", "--system", &example("unit_sum.toml")]);
    assert_eq!(v["semistable"], false);
    assert_eq!(v["u0"]["dim"], 2);
}

#[test]
fn cluster_spans_are_proper() {
    let v = json(&["subspace", "cluster", "--system", &example("line.toml"), "--max-height", "100", "--window-Q", "16"]);
    assert_eq!(v["window"]["threshold_met"], true);
    let clusters = v["clusters"].as_array().unwrap();
    assert!(clusters.len() >= 2);
    for c in clusters {
        assert!(c["dim"].as_u64().unwrap() < 2, "{c}");
    }
    assert_eq!(clusters[0]["members"], 16);
}

#[test]
fn bounds_table() {
    let v = json(&["subspace", "bounds", "--n", "2", "--delta", "1", "--R", "3"]);
    let rows = v["bounds"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let schmidt = rows.iter().find(|r| r["name"].as_str().unwrap().starts_with("schmidt")).unwrap();
    assert_eq!(schmidt["value"]["form"], "log2log2");
    assert_eq!(schmidt["value"]["value"].as_str().unwrap().trim_end_matches('0').trim_end_matches('.'), "54");
    let from_file = json(&["subspace", "bounds", "--system", &example("cubic.toml")]);
    assert_eq!(from_file["n"], 3);
    let out = run(&["subspace", "bounds", "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn partition_of_vector_file() {
    let v = json(&["subspace", "partition", "--vectors", &example("vectors.txt"), "--M", "sqrt(81/4)"]);
    assert_eq!(v["M"], "9/2");
    let classes: Vec<&str> = v["assignments"].as_array().unwrap().iter().map(|a| a["class"].as_str().unwrap()).collect();
    assert_eq!(classes.len(), 4);
    // the zero vector shares the class of e1; the last vector has its largest entry last
    assert_eq!(classes[0], classes[1]);
    assert!(classes[3].starts_with("(3,"));
    let out = run(&["subspace", "partition", "--vectors", &example("vectors.txt"), "--M", "1/2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_system_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "n = 2\ndelta = 1\n[[places]]\nplace = \"inf\"\nconstant = 1\nexponents = [1, 1]\nforms = [[1, 0], [2, 0]]\n").unwrap();
    let out = run(&["subspace", "u0", "--system", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
