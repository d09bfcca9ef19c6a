use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_fekete");

fn run_with(args: &[&str], env: &[(&str, &str)], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("FEKETE_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().unwrap();
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = run_with(args, &[], None);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

fn sandwich() -> Vec<&'static str> {
    vec!["modulus", "sandwich", "--lower", "1 - 1/n", "--upper", "1 + 1/n", "--M", "3"]
}

#[test]
fn sandwich_certificate_fields() {
    let mut args = sandwich();
    args.extend(["--limit", "1"]);
    let (code, v) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "fekete-cert/1");
    assert_eq!(v["M"], 3);
    assert_eq!(v["n0"], 17);
    assert_eq!(v["kappa"], 17);
    assert_eq!(v["checked_window"], json!([17, 67]));
    assert_eq!(v["verified"], true);
    assert_eq!(v["subject"]["kind"], "sandwich");
}

#[test]
fn crossed_envelopes_exit_4() {
    let (code, v) = run(&["modulus", "sandwich", "--lower", "1/n", "--upper", "0", "--M", "3"]);
    assert_eq!(code, 4);
    assert_eq!(v["error"]["kind"], "CertificateViolation");
    assert!(v["error"]["message"].is_string());
}

#[test]
fn budget_from_flag_and_env() {
    let mut args = vec!["--budget", "5"];
    args.extend(sandwich());
    let (code, v) = run(&args);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "BudgetExhausted");
    assert_eq!(v["error"]["budget"], 5);

    let out = run_with(&sandwich(), &[("FEKETE_BUDGET", "5")], None);
    assert_eq!(out.status.code(), Some(3));
    let out = run_with(&sandwich(), &[("FEKETE_BUDGET", "100")], None);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn parse_errors_carry_offsets() {
    let (code, v) = run(&["modulus", "sandwich", "--lower", "1 - 1/k", "--upper", "1", "--M", "3"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "UnknownVariable");
    assert_eq!(v["error"]["offset"], 6);

    let (code, v) = run(&["limit", "--expr", "1 +", "--kind", "super", "--terms", "3"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "ParseError");
    assert!(v["error"]["offset"].is_u64());
}

#[test]
fn usage_errors_are_json() {
    let (code, v) = run(&["no-such-command"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "UsageError");
    let out = run_with(&["--help"], &[], None);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn limit_report() {
    let (code, v) = run(&["limit", "--expr", "floor(3*n/2)", "--kind", "super", "--terms", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["kind"], "superadditive");
    let r = &v["report"];
    assert_eq!(r["direction"], "lower_of_limit");
    assert_eq!(r["prefix_length"], 4);
    assert_eq!(r["attained_at"], 2);
    assert_eq!(r["bound"], json!({"num": "3", "den": "2"}));
}

#[test]
fn fekete_pipeline_command() {
    let (code, v) = run(&[
        "modulus", "fekete", "--sup", "floor(3*n/2)", "--sub", "ceil(3*n/2)", "--M", "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["n0"], 25);
    assert_eq!(v["kappa"], 625);
    assert_eq!(v["verified"], true);
}

#[test]
fn verify_round_trip_and_tamper() {
    let out = run_with(&sandwich(), &[], None);
    let cert = String::from_utf8(out.stdout).unwrap();

    let ok = run_with(&["verify", "--cert", "-"], &[], Some(&cert));
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));

    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("sandwich-cert.json");
    std::fs::write(&path, &cert).unwrap();
    let (code, v) = run(&["verify", "--cert", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["verified"], true);

    let mut tampered: Value = serde_json::from_str(&cert).unwrap();
    tampered["checked_window"] = json!([5, 55]);
    let bad = run_with(&["verify", "--cert", "-"], &[], Some(&tampered.to_string()));
    assert_eq!(bad.status.code(), Some(4));

    let missing = run_with(&["verify", "--cert", "/nonexistent/cert.json"], &[], None);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn demos() {
    let (code, v) = run(&["demo", "shannon", "--graph", "c5", "--power", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["powers"][1]["alpha"], 5);

    let (code, v) = run(&["demo", "t17", "--count", "50"]);
    assert_eq!(code, 0, "{v}");
    let (code, v) = run(&["demo", "specker", "--count", "50"]);
    assert_eq!(code, 0, "{v}");
    let (code, v) = run(&["demo", "foo", "--n-limit", "5"]);
    assert_eq!(code, 0, "{v}");
}

#[test]
fn table_output_is_plain_text() {
    let out = run_with(&["--table", "limit", "--expr", "1 - 1/n", "--kind", "sub", "--terms", "3"], &[], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(serde_json::from_str::<Value>(&text).is_err());
    assert!(text.contains("bound"));
}
