//! Command-level behavior: fixture validation matrix, exit codes, JSON
//! round-trips, and the documented diagnostics of the invalid fixtures.

use std::path::PathBuf;
use std::process::{Command, Output};

use nefkit::report::Report;

fn fixture_root() -> PathBuf {
    match std::env::var("NEFKIT_FIXTURES") {
        Ok(p) => PathBuf::from(p),
        Err(_) => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"),
    }
}

fn nefkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nefkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture_arg(name: &str) -> String {
    fixture_root().join(name).display().to_string()
}

fn list_fixtures(sub: &str) -> Vec<String> {
    let dir = if sub.is_empty() {
        fixture_root()
    } else {
        fixture_root().join(sub)
    };
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| {
            let e = e.ok()?;
            let name = e.file_name().into_string().ok()?;
            (e.file_type().ok()?.is_file() && name.ends_with(".toml")).then_some(name)
        })
        .collect();
    names.sort();
    names
}

#[test]
fn every_regular_fixture_validates() {
    for name in list_fixtures("") {
        let out = nefkit(&["validate", &fixture_arg(&name)]);
        assert!(
            out.status.success(),
            "{name}: {}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn every_invalid_fixture_fails_with_its_diagnostic() {
    let expected = [
        ("bad-adjunction.toml", "adjunction"),
        ("coefficient-exceeds-one.toml", "exceeds 1"),
        ("missing-pairing.toml", "pairing incomplete"),
        ("duplicate-id.toml", "duplicate curve id"),
        ("unknown-key.toml", "degree"),
        ("float-literal.toml", "string"),
    ];
    let names = list_fixtures("invalid");
    assert_eq!(names.len(), expected.len(), "fixture list drifted: {names:?}");
    for (name, needle) in expected {
        let out = nefkit(&["validate", &fixture_arg(&format!("invalid/{name}"))]);
        assert_eq!(out.status.code(), Some(1), "{name} should exit 1");
        let text = format!(
            "{}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(
            text.contains(needle),
            "{name}: diagnostic `{needle}` missing in:\n{text}"
        );
    }
}

#[test]
fn usage_errors_exit_two() {
    let out = nefkit(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = nefkit(&["mmp-run", "--mode", "bogus", &fixture_arg("p2.toml")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_exits_one() {
    let out = nefkit(&["validate", &fixture_arg("no-such-model.toml")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_reports_reparse_to_equal_values() {
    let commands: Vec<Vec<&str>> = vec![
        vec!["validate", "--json"],
        vec!["mmp-run", "--json"],
        vec!["analyze", "--json", "--bpf", "--cartier"],
    ];
    for args in &commands {
        let mut full = args.clone();
        let path = fixture_arg("blowup-p2.toml");
        full.push(&path);
        let out = nefkit(&full);
        assert!(out.status.success(), "{args:?}");
        let text = String::from_utf8(out.stdout).unwrap();
        let report = Report::from_json(&text).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        assert_eq!(report.to_json().trim(), text.trim(), "{args:?}");
    }
}

#[test]
fn classify_singularity_reports_cusp() {
    let out = nefkit(&["classify-singularity", &fixture_arg("cusp-223.toml")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("lc, not klt"), "{text}");
    assert!(text.contains("coefficients 1,1,1"), "{text}");
    assert!(text.contains("not rational"), "{text}");
}

#[test]
fn classify_singularity_json_round_trips() {
    let out = nefkit(&["classify-singularity", "--json", &fixture_arg("du-val.toml")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report = Report::from_json(&text).unwrap();
    assert_eq!(report.to_json().trim(), text.trim());
}

#[test]
fn mmp_run_fp_mode_on_fp_fixture() {
    let out = nefkit(&[
        "mmp-run",
        "--mode",
        "fp",
        &fixture_arg("fp-elliptic.toml"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("contract C"), "{text}");

    // The same boundary is rejected in qf mode: coefficient 2 exceeds 1.
    let out = nefkit(&["mmp-run", "--mode", "qf", &fixture_arg("fp-elliptic.toml")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("exceeds 1"), "{err}");
}

#[test]
fn mmp_run_relative_respects_vertical_flags() {
    let out = nefkit(&[
        "mmp-run",
        "--relative",
        "--json",
        &fixture_arg("hirzebruch.toml"),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report = Report::from_json(&text).unwrap();
    match report {
        Report::MmpRun(r) => {
            assert!(r.steps.is_empty());
            assert!(matches!(
                r.end_state,
                nefkit::mmp::EndState::MoriFiberOverCurve { .. }
            ));
        }
        other => panic!("unexpected report {other:?}"),
    }

    // Absolute mode contracts the horizontal section down to the plane.
    let out = nefkit(&["mmp-run", "--json", &fixture_arg("hirzebruch.toml")]);
    assert!(out.status.success());
    let report = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    match report {
        Report::MmpRun(r) => {
            assert_eq!(r.steps.len(), 1);
            assert_eq!(r.steps[0].curve, "C0");
            assert!(matches!(
                r.end_state,
                nefkit::mmp::EndState::FanoRhoOne { .. }
            ));
            assert_eq!(r.final_model.k_self_intersection.to_string(), "9");
        }
        other => panic!("unexpected report {other:?}"),
    }
}

#[test]
fn nef_polytope_command_matches_expected_interval() {
    let out = nefkit(&[
        "nef-polytope",
        "--curves",
        "C",
        "--decompose",
        &fixture_arg("interval-polytope.toml"),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(1/2)"), "{text}");
    assert!(text.contains("(1)"), "{text}");
    assert!(text.contains("weights sum to 1"), "{text}");
}

#[test]
fn lc_structure_command_reports_cases() {
    let out = nefkit(&["lc-structure", &fixture_arg("lc-suite.toml")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("case (a)"), "{text}");
    assert!(text.contains("case (b)"), "{text}");
}

#[test]
fn dot_export_prints_graph() {
    let out = nefkit(&[
        "classify-singularity",
        "--graph",
        "cusp-223",
        "--dot",
        &fixture_arg("cusp-223.toml"),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("graph \"cusp-223\""), "{text}");
    assert!(text.contains("\"E1\" -- \"E2\""), "{text}");
}

#[test]
fn analyze_default_divisor_is_log_canonical_class() {
    let out = nefkit(&["analyze", &fixture_arg("p2.toml")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("divisor: 1*K"), "{text}");
    // K on the plane is anti-ample: not nef.
    assert!(text.contains("nef on catalog: false"), "{text}");
}

#[test]
fn analyze_explicit_divisor_with_bpf() {
    let out = nefkit(&[
        "analyze",
        "--divisor",
        "H=1",
        "--bpf",
        "--cartier",
        &fixture_arg("p2.toml"),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("certificate issued"), "{text}");
    assert!(text.contains("semi-ample relative to catalog"), "{text}");
    assert!(text.contains("euler characteristic: 3"), "{text}");
}
