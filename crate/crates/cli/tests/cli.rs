//! End-to-end tests of the staged pipeline: golden stage artifacts,
//! byte-level idempotence, polynomial round-trips, and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ndflow")
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

const WORKED_IDEAL: &str = r#"{ "n": 2, "q": 1, "R": [["s1*s2 - s1 - s2 + 1"]] }"#;
const THREE_D: &str = r#"{ "n": 3, "q": 1,
  "R": [["s3^2 - 2*s3 + 1"], ["s2^2 - 2*s2 + 1"], ["s1*s3 - s1 - s2 - s3 + 2"]] }"#;

#[test]
fn analyze_reports_the_worked_ideal() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sys.json", WORKED_IDEAL);
    let out = run(&["analyze", "sys.json", "--out", "report.json"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["autonomous"], true);
    assert_eq!(report["d"], 1);
    assert_eq!(report["strongly_relevant_at_identity"], false);
}

#[test]
fn analyze_three_d_is_strongly_relevant_at_identity() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sys.json", THREE_D);
    let out = run(&["analyze", "sys.json", "--out", "report.json"], dir.path());
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["strongly_relevant_at_identity"], true);
    assert_eq!(report["d"], 1);
}

#[test]
fn normalize_emits_the_golden_transform() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sys.json", WORKED_IDEAL);
    let out = run(&["normalize", "sys.json", "--out", "norm.json"], dir.path());
    assert!(out.status.success());
    let norm: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("norm.json")).unwrap())
            .unwrap();
    assert_eq!(norm["T"], serde_json::json!([[1, 0], [2, 1]]));
    assert_eq!(norm["d"], 1);
    assert_eq!(
        norm["transformed_R"],
        serde_json::json!([["s1*s2^3 - s1*s2^2 - s2 + 1"]])
    );
}

#[test]
fn full_pipeline_is_idempotent_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sys.json", WORKED_IDEAL);
    for stage in [
        vec!["normalize", "sys.json", "--out", "norm.json"],
        vec!["regularize", "norm.json", "--out", "real.json"],
        vec![
            "solve",
            "--realization",
            "real.json",
            "--normalization",
            "norm.json",
            "--box=-3:3,-3:3",
            "--out",
            "traj.json",
            "--seed",
            "9",
            "--float-csv",
            "traj.csv",
        ],
    ] {
        let out = run(&stage, dir.path());
        assert!(
            out.status.success(),
            "stage {:?}: {}",
            stage,
            String::from_utf8_lossy(&out.stderr)
        );
    }
    // re-running every stage on unchanged inputs yields byte-identical artifacts
    let before: Vec<Vec<u8>> = ["norm.json", "real.json", "traj.json", "traj.csv"]
        .iter()
        .map(|f| std::fs::read(dir.path().join(f)).unwrap())
        .collect();
    for stage in [
        vec!["normalize", "sys.json", "--out", "norm.json"],
        vec!["regularize", "norm.json", "--out", "real.json"],
        vec![
            "solve",
            "--realization",
            "real.json",
            "--normalization",
            "norm.json",
            "--box=-3:3,-3:3",
            "--out",
            "traj.json",
            "--seed",
            "9",
            "--float-csv",
            "traj.csv",
        ],
    ] {
        let out = run(&stage, dir.path());
        assert!(out.status.success());
    }
    let after: Vec<Vec<u8>> = ["norm.json", "real.json", "traj.json", "traj.csv"]
        .iter()
        .map(|f| std::fs::read(dir.path().join(f)).unwrap())
        .collect();
    assert_eq!(before, after, "stage artifacts must be byte-identical");

    // independent verification passes with residual zero
    let out = run(
        &[
            "verify",
            "--system",
            "sys.json",
            "--trajectory",
            "traj.json",
            "--out",
            "verify.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap())
            .unwrap();
    assert_eq!(v["exact"], true);
    assert_eq!(v["max_residual"], "0");
}

#[test]
fn emitted_polynomials_reparse_to_equal_values() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sys.json", THREE_D);
    assert!(
        run(&["normalize", "sys.json", "--out", "norm.json"], dir.path())
            .status
            .success()
    );
    assert!(run(
        &["regularize", "norm.json", "--out", "real.json"],
        dir.path()
    )
    .status
    .success());
    let real: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("real.json")).unwrap())
            .unwrap();
    // every emitted polynomial string reparses to an equal polynomial
    let d = real["d"].as_u64().unwrap() as usize;
    for row in real["X"].as_array().unwrap() {
        for s in row.as_array().unwrap() {
            let f = ndflow::laurent::parse_poly(d, s.as_str().unwrap()).unwrap();
            assert_eq!(f.to_string(), s.as_str().unwrap());
        }
    }
    for a in real["A"].as_array().unwrap() {
        for row in a.as_array().unwrap() {
            for s in row.as_array().unwrap() {
                let f = ndflow::laurent::parse_poly(d, s.as_str().unwrap()).unwrap();
                assert_eq!(f.to_string(), s.as_str().unwrap());
            }
        }
    }
}

#[test]
fn check_free_reports_the_three_d_golden() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sys.json", THREE_D);
    assert!(
        run(&["normalize", "sys.json", "--out", "norm.json"], dir.path())
            .status
            .success()
    );
    assert!(run(
        &["regularize", "norm.json", "--out", "real.json"],
        dir.path()
    )
    .status
    .success());
    let out = run(
        &[
            "check-free",
            "--realization",
            "real.json",
            "--normalization",
            "norm.json",
            "--out",
            "free.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("free.json")).unwrap())
            .unwrap();
    assert_eq!(v["gamma"], 4);
    assert_eq!(v["d"], 1);
    assert_eq!(v["rank"], 2);
    assert_eq!(v["is_free"], true);
    assert_eq!(v["is_nonautonomous"], true);
}

#[test]
fn membership_command_agrees_both_ways() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sys.json", THREE_D);
    assert!(
        run(&["normalize", "sys.json", "--out", "norm.json"], dir.path())
            .status
            .success()
    );
    assert!(run(
        &["regularize", "norm.json", "--out", "real.json"],
        dir.path()
    )
    .status
    .success());
    let out = run(
        &[
            "membership",
            "--system",
            "sys.json",
            "--row",
            "s1^-3*s3^2 - 2*s1^-3*s3 + s1^-3",
            "--realization",
            "real.json",
            "--out",
            "member.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("member.json")).unwrap())
            .unwrap();
    assert_eq!(v["member"], true);
    assert_eq!(v["realization_member"], true);
    assert!(v["witness"].is_array());

    let out = run(
        &[
            "membership",
            "--system",
            "sys.json",
            "--row",
            "s3 - 1",
            "--realization",
            "real.json",
            "--out",
            "member2.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("member2.json")).unwrap())
            .unwrap();
    assert_eq!(v["member"], false);
    assert_eq!(v["realization_member"], false);
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    // 2: parse error with position information
    write(
        dir.path(),
        "bad.json",
        r#"{ "n": 2, "q": 1, "R": [["s1 + @"]] }"#,
    );
    let out = run(&["analyze", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column"));

    // 3: stage precondition (non-autonomous input cannot be regularized)
    write(dir.path(), "free.json", r#"{ "n": 2, "q": 1, "R": [] }"#);
    assert!(
        run(&["normalize", "free.json", "--out", "n.json"], dir.path())
            .status
            .success()
    );
    let out = run(&["regularize", "n.json", "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));

    // 4: verification failure on a tampered trajectory
    write(dir.path(), "sys.json", WORKED_IDEAL);
    write(
        dir.path(),
        "zero.json",
        r#"{ "dim": 2, "lo": [0, 0], "hi": [1, 1], "width": 1,
            "values": ["0", "0", "0", "1"] }"#,
    );
    let out = run(
        &[
            "verify",
            "--system",
            "sys.json",
            "--trajectory",
            "zero.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn solve_rejects_incompatible_or_short_initial_conditions() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sys.json", THREE_D);
    assert!(
        run(&["normalize", "sys.json", "--out", "norm.json"], dir.path())
            .status
            .success()
    );
    assert!(run(
        &["regularize", "norm.json", "--out", "real.json"],
        dir.path()
    )
    .status
    .success());
    // a window that is too small is rejected with the required box
    write(
        dir.path(),
        "x_small.json",
        r#"{ "dim": 1, "lo": [0], "hi": [0], "width": 4,
            "values": ["1", "1", "1", "1"] }"#,
    );
    let out = run(
        &[
            "solve",
            "--realization",
            "real.json",
            "--normalization",
            "norm.json",
            "--box=-2:2,-2:2,-2:2",
            "--x",
            "x_small.json",
            "--out",
            "t.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    // an incompatible window is rejected rather than zero-padded
    write(
        dir.path(),
        "x_bad.json",
        r#"{ "dim": 1, "lo": [-3], "hi": [3], "width": 4,
            "values": ["1","2","3","4","1","2","3","4","1","2","3","4","1","2","3","4",
                       "1","2","3","4","1","2","3","4","1","2","3","4"] }"#,
    );
    let out = run(
        &[
            "solve",
            "--realization",
            "real.json",
            "--normalization",
            "norm.json",
            "--box=-2:2,-2:2,-2:2",
            "--x",
            "x_bad.json",
            "--out",
            "t.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    // a compatible constant window solves and verifies
    let consts: Vec<String> = std::iter::repeat("5".to_string()).take(28).collect();
    write(
        dir.path(),
        "x_ok.json",
        &format!(
            r#"{{ "dim": 1, "lo": [-3], "hi": [3], "width": 4, "values": [{}] }}"#,
            consts
                .iter()
                .map(|s| format!("\"{s}\""))
                .collect::<Vec<_>>()
                .join(",")
        ),
    );
    let out = run(
        &[
            "solve",
            "--realization",
            "real.json",
            "--normalization",
            "norm.json",
            "--box=-2:2,-2:2,-2:2",
            "--x",
            "x_ok.json",
            "--out",
            "t.json",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
