//! End-to-end checks of the command-line surface: commands, formats, exit
//! codes, and the environment cap.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn plonka(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plonka"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn decompose_text_reports_negative_verdict_with_reasons() {
    let out = plonka(&["decompose", &fixture("a8.alg")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("not a Płonka sum"), "{text}");
    assert!(
        text.contains("no homomorphism from {a1} into {a3,a4}"),
        "{text}"
    );
    assert!(text.contains("none is a P-homomorphism"), "{text}");
}

#[test]
fn decompose_text_reports_positive_verdict() {
    let out = plonka(&["decompose", &fixture("a7.alg")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.contains("is a Płonka sum (2 direct system(s))"),
        "{text}"
    );
}

#[test]
fn decompose_json_is_versioned_and_stable() {
    let run = || {
        let out = plonka(&["decompose", &fixture("a6.alg"), "--format", "json"]);
        assert_eq!(out.status.code(), Some(0));
        serde_json::from_str::<serde_json::Value>(&stdout(&out)).unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(first["schema"], 1);
    assert_eq!(first["report"]["verdict"], true);
    assert_eq!(first["report"]["systems"].as_array().unwrap().len(), 10);
    // the comparable body is byte-identical across runs
    assert_eq!(
        serde_json::to_string(&first["report"]).unwrap(),
        serde_json::to_string(&second["report"]).unwrap()
    );
    // empty-systems reports carry verdict false
    let out = plonka(&["decompose", &fixture("a3.alg"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["verdict"], false);
    assert_eq!(v["report"]["systems"].as_array().unwrap().len(), 0);
}

#[test]
fn decompose_dot_draws_frames_and_systems() {
    let out = plonka(&["decompose", &fixture("a7.alg"), "--format", "dot"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.matches("digraph frame_").count(), 24);
    assert_eq!(text.matches("digraph system_").count(), 2);
    // node count of each frame digraph equals its member count; the first
    // frame is the full six-member one
    let first = text.split("digraph frame_2").next().unwrap();
    assert_eq!(first.matches("[label=").count(), 6);
}

#[test]
fn compose_reproduces_the_algebra_document() {
    let out = plonka(&["compose", &fixture("a4_system.sys")]);
    assert_eq!(out.status.code(), Some(0));
    let expected = std::fs::read_to_string(fixture("a4.alg")).unwrap();
    assert_eq!(stdout(&out), expected);
}

#[test]
fn verify_matches_and_mismatches() {
    let out = plonka(&[
        "verify",
        &fixture("a4.alg"),
        "--system",
        &fixture("a4_system.sys"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("MATCH"));

    let out = plonka(&[
        "verify",
        &fixture("a5.alg"),
        "--system",
        &fixture("a4_system.sys"),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "a verdict is data, not an error"
    );
    assert!(stdout(&out).contains("MISMATCH"));
}

#[test]
fn partition_brute_force_refutes_and_finds() {
    let out = plonka(&["partition", &fixture("a3.alg"), "--brute-force"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("no non-trivial partition function exists"));

    let out = plonka(&["partition", &fixture("a4.alg"), "--brute-force"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("partition function found"), "{text}");
    assert!(text.contains("axioms: all pass"), "{text}");
}

#[test]
fn partition_derives_from_a_decomposition() {
    let out = plonka(&["partition", &fixture("a4.alg")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("induced by system 1"), "{text}");
    assert!(text.contains("axioms: all pass"), "{text}");
}

#[test]
fn partition_resource_limits() {
    // six elements without a budget: refuse with the resource exit code
    let out = plonka(&["partition", &fixture("a1.alg"), "--brute-force"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    // a tiny budget cannot decide the space
    let out = plonka(&[
        "partition",
        &fixture("a1.alg"),
        "--brute-force",
        "--budget",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("budget exhausted"));
}

#[test]
fn isolated_and_frames_listings() {
    let out = plonka(&["isolated", &fixture("a7.alg")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("(6 members)"), "{text}");
    assert!(text.contains("I4 = {a1,a2,a3,a4,a5,a6,a9}"), "{text}");

    let out = plonka(&["frames", &fixture("a4.alg")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("frames of A4 (3)"), "{text}");
    assert!(text.contains("covering: I1 -> I2, I2 -> I3"), "{text}");
}

#[test]
fn universe_caps_flag_and_environment() {
    let out = plonka(&["decompose", &fixture("a7.alg"), "--max-universe", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("exceeds the cap"));

    let out = Command::new(env!("CARGO_BIN_EXE_plonka"))
        .args(["decompose", &fixture("a7.alg")])
        .env("PLONKA_MAX_UNIVERSE", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // the flag overrides the environment
    let out = Command::new(env!("CARGO_BIN_EXE_plonka"))
        .args(["decompose", &fixture("a7.alg"), "--max-universe", "16"])
        .env("PLONKA_MAX_UNIVERSE", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn input_errors_exit_with_one() {
    let out = plonka(&["decompose", "/nonexistent/file.alg"]);
    assert_eq!(out.status.code(), Some(1));

    let dir = std::env::temp_dir().join("plonka-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.alg");
    std::fs::write(&bad, "algebra X\nelements a b\nop f arity 2\na b\na\n").unwrap();
    let out = plonka(&["decompose", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 5"), "{}", stderr(&out));
}
