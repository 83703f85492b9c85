use std::process::{Command, Output};

use serde_json::Value;

fn entstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entstar")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

const LEFT: &str = r#"{"p":2,"kind":"left_shift"}"#;
const KER_E0: &str = r#"{"kind":"kernel","rows":[[[0,1]]]}"#;

#[test]
fn hstar_of_left_shift_is_log_2() {
    let out = entstar(&["compute", "--op", LEFT, "--subgroup", KER_E0, "--mode", "hstar"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let e = &r["results"]["subgroups"][0]["entropy"];
    assert_eq!(e["value"]["display"], "log 2");
    assert_eq!(e["trace"]["alpha_final"], 2);
    assert_eq!(e["exact"], true);
    assert_eq!(r["schema_version"], 1);
    assert!(r.get("timing_ms").is_none());
}

#[test]
fn hstar_of_right_shift_is_zero() {
    let out = entstar(&["compute", "--op", "right_shift", "--subgroup", KER_E0]);
    assert_eq!(report(&out)["results"]["subgroups"][0]["entropy"]["value"]["value"], "zero");
}

#[test]
fn h_mode_with_unit_vector() {
    let out = entstar(&["compute", "--mode", "h", "--op", "right_shift", "--finite-subgroup", "e0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["subgroups"][0]["entropy"]["value"]["display"], "log 2");
}

#[test]
fn classify_examples() {
    let cases = [
        ("left_shift", "infinite", "non_algebraic"),
        ("multiplication", "zero", "narrow"),
        (r#"{"kind":"finite_dim","p":3,"matrix":[[1,1],[0,1]]}"#, "zero", "algebraic"),
    ];
    for (op, value, kind) in cases {
        let out = entstar(&["classify", "--op", op]);
        assert_eq!(out.status.code(), Some(0), "{op}");
        let r = report(&out);
        assert_eq!(r["results"]["ent_star"]["value"], value, "{op}");
        assert_eq!(r["results"]["certificate"]["kind"], kind, "{op}");
        assert_eq!(r["results"]["certificate_verified"], true);
    }
}

#[test]
fn malformed_input_exits_1() {
    let out = entstar(&["compute", "--op", r#"{"kind":"left_shift","p":4}"#, "--subgroup", KER_E0]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let out = entstar(&["compute", "--op", LEFT, "--subgroup", r#"{"kind":"nope"}"#]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inconclusive_exits_2_with_trace() {
    let out = entstar(&["compute", "--op", LEFT, "--subgroup", KER_E0, "--max-steps", "3", "--window", "50"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["results"]["status"], "inconclusive");
    assert!(r["results"]["trace"]["c_log_p"].as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn rejected_certificate_exits_3() {
    let cert = r#"{"kind":"algebraic","p":2,"f":{"p":2,"coeffs":[1,1]}}"#;
    let out = entstar(&["verify", "certificate", "--op", "left_shift", "--certificate", cert]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(report(&out)["results"]["verified"], false);
}

#[test]
fn certificate_roundtrip_verifies() {
    let out = entstar(&["classify", "--op", r#"{"kind":"finite_dim","p":2,"matrix":[[0,1],[1,1]]}"#]);
    let cert = report(&out)["results"]["certificate"].to_string();
    let out =
        entstar(&["verify", "certificate", "--op", r#"{"kind":"finite_dim","p":2,"matrix":[[0,1],[1,1]]}"#, "--certificate", &cert]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_perp_passes() {
    let out = entstar(&["verify", "perp", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["passed"], true);
}

#[test]
fn verify_suites_pass_with_small_budgets() {
    for suite in ["duality", "dichotomy", "addition", "growth-laws", "monotonicity", "narrow"] {
        let out = entstar(&["verify", suite, "--budget", "20"]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn unknown_suite_is_rejected() {
    let out = entstar(&["verify", "nonsense"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "dichotomy", "--seed", "5", "--budget", "15"];
    assert_eq!(entstar(&args).stdout, entstar(&args).stdout);
    let args = ["compute", "--op", LEFT, "--subgroup", KER_E0];
    assert_eq!(entstar(&args).stdout, entstar(&args).stdout);
}

#[test]
fn operator_file_is_accepted() {
    let dir = std::env::temp_dir().join(format!("entstar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("op.json");
    std::fs::write(&path, LEFT).unwrap();
    let out = entstar(&["compute", "--op", path.to_str().unwrap(), "--subgroup", KER_E0]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_format() {
    let out = entstar(&["--format", "text", "classify", "--op", "left_shift"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ent* = "));
    assert!(text.contains("certificate verified: true"));
}
