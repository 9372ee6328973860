use std::process::{Command, Output};

use serde_json::Value;

fn kstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kstab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = kstab(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn check_degree_two_anticanonical() {
    let v = json(&[
        "check",
        "--L",
        r#"{"degree":2,"L":{"h":"3","e":["1","1","1","1","1","1","1"]}}"#,
        "--json",
    ]);
    assert_eq!(v["verdict"]["status"], "KStableByMainTheorem");
    assert_eq!(v["verdict"]["alpha_lower"], "18/17");
}

#[test]
fn check_six_line_family() {
    let v = json(&[
        "check",
        "--L",
        r#"{"degree":3,"family":"six-line","x":"1/20"}"#,
        "--json",
    ]);
    assert_eq!(v["verdict"]["status"], "KStableBySixLineTheorem");
    assert_eq!(v["verdict"]["alpha_lower"], "40/63");
    let v = json(&[
        "check",
        "--L",
        r#"{"degree":3,"family":"six-line","x":"1/5"}"#,
        "--json",
    ]);
    assert_eq!(v["verdict"]["status"], "Unknown");
}

#[test]
fn alpha_bound_degree_four() {
    let v = json(&[
        "alpha-bound",
        "--L",
        r#"{"degree":4,"family":"anticanonical-plus","delta":"0","a":["1/2","1/3","1/4"]}"#,
        "--json",
    ]);
    assert_eq!(v["mu"], "1");
    assert_eq!(v["certificate"]["bound"], "24/55");
    assert_eq!(v["certificate"]["divisor"][0]["coefficient"], "55/24");
    assert_eq!(v["comparison"]["strict"], true);
    let v = json(&[
        "check",
        "--L",
        r#"{"degree":4,"family":"anticanonical-plus","delta":"0","a":["1/2","1/3","1/4"]}"#,
        "--json",
    ]);
    assert_eq!(v["verdict"]["status"], "DervanInapplicable");
}

#[test]
fn bare_class_needs_degree() {
    let doc = r#"{"h":"4","e":["1","1","1","1","1"]}"#;
    let o = kstab(&["mu", "--L", doc]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&["mu", "--degree", "4", "--L", doc, "--json"]);
    assert!(v.to_string().contains("mu"));
}

#[test]
fn reads_input_from_a_file() {
    let path = std::env::temp_dir().join(format!("kstab-cli-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"degree":5,"L":{"h":"4","e":["1","1","1","1"]}}"#).unwrap();
    let v = json(&["mu", "--L", path.to_str().unwrap(), "--json"]);
    std::fs::remove_file(&path).unwrap();
    assert!(v.to_string().contains("3/4"));
}

#[test]
fn curve_listing() {
    let v = json(&["curves", "--degree", "3", "--json"]);
    assert_eq!(v["count"], 27);
    assert_eq!(v["classes"].as_array().map(Vec::len), Some(27));
    let v = json(&["curves", "--degree", "4", "--fibers", "--json"]);
    assert_eq!(v["count"], 10);
}

#[test]
fn example_cubic_window() {
    let v = json(&["example-cubic", "--x", "1/2", "--json"]);
    assert_eq!(v["in_window"], true);
    let v = json(&["example-cubic", "--x", "1/5", "--json"]);
    assert_eq!(v["in_window"], false);
}

#[test]
fn verify_appendix_small_grid() {
    let v = json(&["verify-appendix", "--max-denominator", "2", "--json"]);
    assert_eq!(v["counterexamples"].as_array().map(Vec::len), Some(0));
}

#[test]
fn input_errors_exit_one() {
    for args in [
        vec!["check", "--L", "{not json"],
        vec![
            "check",
            "--L",
            r#"{"degree":3,"L":{"h":"1","e":["1","0","0","0","0","0"]}}"#,
        ],
        vec!["check", "--L", r#"{"degree":10,"L":{"h":"3","e":[]}}"#],
        vec!["check", "--L", "/nonexistent/kstab.json"],
        vec!["example-cubic", "--x", "1"],
        vec!["curves", "--degree", "3", "--bogus"],
        vec!["frobnicate"],
    ] {
        let o = kstab(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(kstab(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["verify-appendix", "--max-denominator", "3", "--json"];
    let one = Command::new(env!("CARGO_BIN_EXE_kstab"))
        .args(args)
        .env("KSTAB_THREADS", "1")
        .output()
        .unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_kstab"))
        .args(args)
        .env("KSTAB_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_kstab"))
        .args(args)
        .env("KSTAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
