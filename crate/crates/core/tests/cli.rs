use std::process::Command;

fn sessc(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sessc")).args(args).current_dir(env!("CARGO_MANIFEST_DIR")).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn encode_type_prints_pi_type() {
    let (code, out, _) = sessc(&["encode-type", "!unit.end"]);
    assert_eq!(code, 0);
    assert!(!out.trim().is_empty());
}

#[test]
fn verdicts_set_exit_codes() {
    assert_eq!(sessc(&["dual", "!unit.end", "?unit.end"]).0, 0);
    let (code, out, _) = sessc(&["dual", "!unit.end", "!unit.end"]);
    assert_eq!((code, out.trim()), (1, "false"));
    assert_eq!(sessc(&["sub", "rec X.+{l:X}", "+{l:rec X.+{l:X}}"]).0, 0);
    assert_eq!(sessc(&["equiv", "--pi", "rec X.li[<l:X>]", "li[<l:rec X.li[<l:X>]>]"]).0, 0);
}

#[test]
fn parse_errors_exit_two() {
    let (code, _, err) = sessc(&["encode-type", "!unit."]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
    assert_eq!(sessc(&["check", "programs/missing.spi"]).0, 2);
    assert_eq!(sessc(&["check", "programs/sys.pi"]).0, 2);
    assert_eq!(sessc(&["check", "programs/sys.spi", "--ctx", "nocolon"]).0, 2);
}

#[test]
fn json_output() {
    let (code, out, _) = sessc(&["--json", "dual", "rec X.&{l:X}", "rec X.+{l:X}"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["result"], true);

    let (code, out, _) = sessc(&["--json", "check", "programs/sys.spi"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert!(v["result"]["rules"].as_array().unwrap().iter().any(|r| r == "T-Rep"));

    let (code, out, _) = sessc(&["--json", "encode-type", "!unit."]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["ok"], false);
}

#[test]
fn parse_prints_back() {
    let (code, out, _) = sessc(&["parse", "programs/sys.pi"]);
    assert_eq!(code, 0);
    let again = sessc::parse::parse_pi_process(out.trim()).unwrap();
    let orig =
        sessc::parse::parse_pi_process(&std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/programs/sys.pi")).unwrap()).unwrap();
    use sessc::syntax::AlphaEq;
    assert!(again.alpha_eq(&orig));
}

#[test]
fn run_json_reports_returns() {
    let (code, out, _) = sessc(&["--json", "run", "programs/sys.spi", "--steps", "5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["result"]["steps"].as_array().unwrap().len(), 5);
    assert!(!v["result"]["returns_to_start"].as_array().unwrap().is_empty());
}

#[test]
fn fuzz_is_deterministic() {
    let a = sessc(&["fuzz", "--n", "10", "--seed", "7", "--depth", "2"]);
    let b = sessc(&["fuzz", "--n", "10", "--seed", "7", "--depth", "2"]);
    assert_eq!(a.0, 0, "{}", a.1);
    assert_eq!(a.1, b.1);
}
