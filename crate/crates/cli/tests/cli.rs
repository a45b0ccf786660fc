//! End-to-end checks of the command-line surface: subcommands, exit
//! codes, and the JSON report shapes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn tofh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tofh"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn eq_exit_codes() {
    let out = tofh(&["eq", "word_a.txt", "word_b.txt"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("equal"));

    let out = tofh(&["eq", "word_a.txt", "word_a.txt", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["equal"], true);

    // an unequal pair exits 1 and reports a witness column
    let dir = tempfile::tempdir().unwrap();
    let word_c = dir.path().join("word_c.txt");
    std::fs::write(&word_c, "X0\n").unwrap();
    let out = tofh(&["eq", "word_a.txt", word_c.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["equal"], false);
    assert!(v["witness_column"].is_number());

    // unknown tokens are a usage error: exit 2
    let word_bad = dir.path().join("word_bad.txt");
    std::fs::write(&word_bad, "FROB\n").unwrap();
    let out = tofh(&["eq", "word_a.txt", word_bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn normalize_reports_body_and_parity() {
    let out = tofh(&["normalize", "word_a.txt", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["h_exp"], 1);
    assert_eq!(v["body"].as_array().unwrap().len(), 5);
}

#[test]
fn verify_tables() {
    for set in ["RE8", "R0", "R3", "R4", "TofH", "RN"] {
        let out = tofh(&["verify", "--set", set]);
        assert_eq!(out.status.code(), Some(0), "verify {set}: {}", stdout(&out));
        assert!(stdout(&out).contains("all sound"));
    }
    let out = tofh(&["verify", "--set", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_proof_accept_and_reject() {
    for ok in [
        "r1_squared.proof",
        "cx_x_commute.proof",
        "derivs_subs.proof",
    ] {
        let out = tofh(&["check-proof", ok]);
        assert_eq!(out.status.code(), Some(0), "{ok}: {}", stdout(&out));
    }
    let out = tofh(&["check-proof", "cyclic.proof", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["accepted"], false);
    assert_eq!(v["acyclic"], false);
    assert!(v["cycle_witness"].is_array());
}

#[test]
fn rewrite_finds_and_reports() {
    let out = tofh(&[
        "rewrite",
        "--from",
        "CX01 X1",
        "--to",
        "X1 CX01",
        "--rels",
        "e8_gates.pres",
        "--max-steps",
        "12",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = tofh(&[
        "rewrite",
        "--from",
        "X0",
        "--to",
        "X1",
        "--rels",
        "xy.pres",
        "--max-steps",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2)); // unknown symbols in that file
    let out = tofh(&[
        "rewrite",
        "--from",
        "x",
        "--to",
        "y",
        "--rels",
        "xy.pres",
        "--max-steps",
        "4",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["found"], false);
}

#[test]
fn count_reports_published_deltas() {
    let out = tofh(&["count", "--n", "8", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["partial_subtotal"], 1414);
    assert_eq!(v["linear_subtotal"], 709);
    assert_eq!(v["total"], 2123);
    assert_eq!(v["published_total"], 2113);
}

#[test]
fn roots_counts() {
    let out = tofh(&["roots", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["roots"], 240);
    assert_eq!(v["positive_roots"], 120);
}

#[test]
fn minimality_finds_witness() {
    let out = tofh(&[
        "minimality",
        "--sub",
        "CX01,CCX12,K12",
        "--full",
        "X0,CX01,CCX12,K12",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["witness_found"], true);
    assert_eq!(v["fails_to_commute_with"], "X0");
}

#[test]
fn apply_moves_script() {
    let out = tofh(&["apply-moves", "demo.moves", "--base", "xy.pres"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    // the script adds and removes everything, landing back at the base
    assert!(text.contains("r: x x = ."));
    assert!(text.contains("rp: y y = ."));
    assert!(!text.contains("claim.inner"));
}

#[test]
fn emit_roundtrips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r0.pres");
    let out = tofh(&["emit", "--set", "R0", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("fig4.eq17: CCX01 = K12 CCX02 K12"));
}

#[test]
fn closure_orders() {
    let out = tofh(&[
        "closure",
        "--gens",
        "X0,SW01,SW12",
        "--cap",
        "1000",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["order"], 48);
    let out = tofh(&["closure", "--gens", "X0", "--cap", "1"]);
    assert!(stdout(&out).contains("exceeded cap"));
}
