//! End-to-end tests against the built binary: golden stdout, the exit-code
//! contract (0 success, 1 failed verification, 2 usage/validation), and
//! JSON round trips.

use std::process::Command;

use levelpic::divclass::DivisorClass;
use levelpic::formulas;

fn run(args: &[&str]) -> (String, String, i32) {
    let output = Command::new(env!("CARGO_BIN_EXE_levelpic"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(output.stdout).expect("utf8 stdout"),
        String::from_utf8(output.stderr).expect("utf8 stderr"),
        output.status.code().expect("exit code"),
    )
}

#[test]
fn class_text_golden() {
    let (out, _, code) = run(&["class", "mukai-virtual", "--g", "8", "--l", "3"]);
    assert_eq!(out, "196 lambda - 28 d0' - 56 d0'' - 224/3 d0^(1)\n");
    assert_eq!(code, 0);

    let (out, _, code) = run(&["class", "canonical", "--g", "8", "--l", "3", "--restrict"]);
    assert_eq!(out, "13 lambda - 2 d0' - 2 d0'' - 4 d0^(1)\n");
    assert_eq!(code, 0);

    let (out, _, code) = run(&["class", "rho", "--l", "5"]);
    assert_eq!(out, "4/5 d0^(1) + 6/5 d0^(2)\n");
    assert_eq!(code, 0);
}

#[test]
fn class_json_round_trips() {
    let (out, _, code) = run(&["class", "canonical", "--g", "8", "--l", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let parsed: DivisorClass = serde_json::from_str(out.trim()).expect("valid class JSON");
    assert_eq!(parsed, formulas::canonical_class(8, 3).unwrap());
}

#[test]
fn class_decimal_flag() {
    let (out, _, code) = run(&["class", "mukai-virtual", "--g", "8", "--l", "3", "--decimal"]);
    assert_eq!(out, "196 lambda - 28 d0' - 56 d0'' - 224/3 (~74.666667) d0^(1)\n");
    assert_eq!(code, 0);
}

#[test]
fn class_usage_and_validation_errors() {
    let (_, err, code) = run(&["class", "mukai-virtual", "--g", "7", "--l", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("genus"), "stderr: {err}");

    let (_, err, code) = run(&["class", "mukai-virtual", "--g", "8", "--l", "3", "--restrict"]);
    assert_eq!(code, 2);
    assert!(err.contains("--restrict"), "stderr: {err}");

    let (_, err, code) = run(&["class", "bogus", "--l", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("bogus"), "stderr: {err}");

    let (_, err, code) = run(&["class", "census", "--g", "6", "--l", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("census subcommand"), "stderr: {err}");

    let (_, err, code) = run(&["class", "canonical", "--l", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("--g"), "stderr: {err}");

    let (_, _, code) = run(&["class", "canonical", "--g", "8", "--l", "4"]);
    assert_eq!(code, 2);

    let (_, _, code) = run(&[]);
    assert_eq!(code, 2);
}

#[test]
fn certify_builtin_catalog_golden() {
    let (out, _, code) = run(&[
        "certify",
        "--g",
        "8",
        "--l",
        "3",
        "--use-builtin-catalog",
        "--format",
        "json",
    ]);
    assert_eq!(
        out,
        "{\"epsilon\":\"3/17\",\"coefficients\":{\"mukai-improved\":\"1/119\",\
         \"koszul-improved\":\"5/17\"},\"residual\":{\"d0pp\":\"4/17\"},\
         \"verdict\":\"general-type\"}\n"
    );
    assert_eq!(code, 0);

    let (out, _, code) = run(&["certify", "--g", "8", "--l", "3", "--use-builtin-catalog"]);
    assert_eq!(code, 0);
    assert!(out.contains("epsilon: 3/17"), "stdout: {out}");
    assert!(out.contains("verdict: general-type"), "stdout: {out}");
}

#[test]
fn certify_reads_catalog_files_and_reports_failures() {
    let path = std::env::temp_dir().join(format!(
        "levelpic-virtual-catalog-{}.json",
        std::process::id()
    ));
    let catalog = r#"[
  {"name":"mukai-virtual","class":{"space":{"g":8,"l":3,"model":"RPrime"},
   "coeffs":{"lambda":"196","d0p":"-28","d0pp":"-56","d0r1":"-224/3"}}},
  {"name":"koszul-virtual","class":{"space":{"g":8,"l":3,"model":"RPrime"},
   "coeffs":{"lambda":"38","d0p":"-6","d0pp":"-6","d0r1":"-2/3"}}}
]"#;
    std::fs::write(&path, catalog).expect("temp file writes");
    let path_str = path.to_str().expect("utf8 path");

    let (out, _, code) = run(&[
        "certify", "--g", "8", "--l", "3", "--catalog", path_str, "--format", "json",
    ]);
    assert_eq!(
        out,
        "{\"epsilon\":\"-15/23\",\"coefficients\":{\"mukai-virtual\":\"17/322\",\
         \"koszul-virtual\":\"2/23\"},\"residual\":{\"d0pp\":\"34/23\"},\
         \"verdict\":\"not-established\"}\n"
    );
    assert_eq!(code, 1);

    // Space mismatch between catalog and requested model is a usage error.
    let (_, err, code) = run(&["certify", "--g", "6", "--l", "3", "--catalog", path_str]);
    assert_eq!(code, 2);
    assert!(err.contains("catalog lives on"), "stderr: {err}");

    std::fs::remove_file(&path).ok();

    let (_, _, code) = run(&["certify", "--g", "8", "--l", "3", "--catalog", path_str]);
    assert_eq!(code, 2, "missing file is a validation error");

    let (_, _, code) = run(&["certify", "--g", "8", "--l", "3"]);
    assert_eq!(code, 2, "a catalog source is required");
}

#[test]
fn verify_theorems_text_and_exit() {
    let (out, _, code) = run(&["verify-theorems", "--l-max", "7"]);
    assert_eq!(code, 0);
    assert!(
        out.contains("final-certificate-8-3: epsilon=3/17 PASS"),
        "stdout: {out}"
    );
    assert!(out.contains("mukai-pipeline-g6-l7"), "stdout: {out}");
    assert!(!out.contains("FAIL"), "stdout: {out}");
}

#[test]
fn verify_theorems_json_respects_level_cap() {
    let (out, _, code) = run(&["verify-theorems", "--l-max", "2", "--format", "json"]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value = serde_json::from_str(out.trim()).expect("valid JSON");
    let checks = parsed["checks"].as_array().expect("checks array");
    let names: Vec<&str> = checks
        .iter()
        .map(|c| c["name"].as_str().expect("name string"))
        .collect();
    assert_eq!(
        names,
        vec![
            "mukai-pipeline-g6-l2",
            "mukai-pipeline-g8-l2",
            "koszul-example-3-3",
            "final-certificate-8-3",
            "statement-variant-note",
        ]
    );
    assert!(checks.iter().all(|c| c["status"] == "pass"));

    let (_, _, code) = run(&["verify-theorems", "--l-max", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn census_golden() {
    let (out, _, code) = run(&["census", "--g", "6", "--l", "3", "--format", "json"]);
    assert_eq!(
        out,
        "{\"g\":6,\"l\":3,\"wirtinger_components\":1,\"wirtinger_degree_each\":2,\
         \"delta0prime_count\":\"177144\",\"delta0ram_degree\":\"118098\"}\n"
    );
    assert_eq!(code, 0);

    let (out, _, code) = run(&["census", "--g", "6", "--l", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("2046"), "stdout: {out}");
    assert!(out.contains("2048"), "stdout: {out}");

    let (_, _, code) = run(&["census", "--g", "6", "--l", "9"]);
    assert_eq!(code, 2, "nonprime level is a validation error");
}

#[test]
fn derive_transcript_and_errors() {
    let (out, _, code) = run(&["derive", "--g", "8", "--l", "3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("frame: g=8, l=3, rank=3, degree=9, deg-sigma=14\n"));
    for rule in [
        "pushforward-chern-twisted",
        "pushforward-chern-square",
        "domain-bundle",
        "codomain-bundle",
        "first-degeneracy-locus",
        "pushforward-sigma",
        "expand-boundary",
        "result",
    ] {
        assert!(out.contains(&format!("{rule}: ")), "missing {rule}: {out}");
    }
    assert!(out.ends_with("class: 196 lambda - 28 d0' - 56 d0'' - 224/3 d0^(1)\n"));

    let (out, _, code) = run(&["derive", "--g", "6", "--l", "5", "--format", "json"]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value = serde_json::from_str(out.trim()).expect("valid JSON");
    assert_eq!(parsed["config"]["deg_sigma"], 5);
    assert_eq!(parsed["steps"].as_array().map(|s| s.len()), Some(8));
    let result: DivisorClass =
        serde_json::from_value(parsed["result"].clone()).expect("result class parses");
    assert_eq!(result, formulas::mukai_virtual_class(6, 5).unwrap());

    let (_, _, code) = run(&["derive", "--g", "7", "--l", "3"]);
    assert_eq!(code, 2);
}
