//! End-to-end checks of the command-line interface.

use std::process::{Command, Output};

fn lrank2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrank2"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn infer_quantitative_example() {
    let out = lrank2(&["infer", "-q", "(\\x. x x) (\\y. y)"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("[] |- (\\x. x x) (\\y. y) : a0 -o a0"), "{text}");
    assert!(text.contains("steps=2"), "{text}");
}

#[test]
fn infer_untypable_term_exits_2() {
    let out = lrank2(&["infer", "(\\x. x x) (\\f. \\x. f (f x))"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infer_parse_error_exits_1() {
    let out = lrank2(&["infer", "\\x. \\y."]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_trace_prints_each_step() {
    let out = lrank2(&["eval", "--trace", "(\\x1. (\\x2. x2 x1) x1) (\\y. y)"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines,
        vec![
            "(\\x2. x2 (\\y. y)) (\\y. y)",
            "(\\y. y) (\\y. y)",
            "\\y. y",
            "\\y. y",
            "steps=3",
        ]
    );
}

#[test]
fn unify_prints_substitution_and_counter() {
    let out = lrank2(&["unify", "a1 -o a1 = a2 -o a3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("{a3 / a1, a3 / a2}"), "{text}");
    assert!(text.contains("decompositions=1"), "{text}");
}

#[test]
fn check_accepts_the_bundled_fixture() {
    let path = format!(
        "{}/tests/fixtures/tight_eval3.json",
        env!("CARGO_MANIFEST_DIR")
    );
    let out = lrank2(&["check", &path]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("|-(3)"), "{text}");
    assert!(text.contains("tight"), "{text}");
}

#[test]
fn check_rejects_a_tampered_index_with_exit_3() {
    let path = format!(
        "{}/tests/fixtures/tight_eval3.json",
        env!("CARGO_MANIFEST_DIR")
    );
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    doc["conclusion"]["index"] = serde_json::json!(2);
    let tampered = std::env::temp_dir().join(format!("lrank2_tampered_{}.json", std::process::id()));
    std::fs::write(&tampered, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = lrank2(&["check", "--json", tampered.to_str().unwrap()]);
    let _ = std::fs::remove_file(&tampered);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("\"ok\":false"), "{text}");
    assert!(text.contains("index mismatch"), "{text}");
}

#[test]
fn conjecture_writes_a_report() {
    let report = std::env::temp_dir().join(format!("lrank2_report_{}.json", std::process::id()));
    let out = lrank2(&[
        "conjecture",
        "--seed",
        "5",
        "--count",
        "200",
        "--max-size",
        "9",
        "--fuel",
        "1000",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let _ = std::fs::remove_file(&report);
    assert_eq!(parsed["total"], 200);
    assert_eq!(parsed["mismatches"], serde_json::json!([]));
    assert_eq!(
        parsed["typable"].as_u64().unwrap(),
        parsed["agreements"].as_u64().unwrap() + parsed["diverged"].as_u64().unwrap()
    );
}

#[test]
fn usage_error_exits_1() {
    let out = lrank2(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reading_a_term_from_file_and_stdin() {
    use std::io::Write;
    let path = std::env::temp_dir().join(format!("lrank2_term_{}.lam", std::process::id()));
    std::fs::write(&path, "\\x. x x\n").unwrap();
    let out = lrank2(&["infer", "-f", path.to_str().unwrap()]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("(a0 -o a1) & a0 -> a1"));

    let mut child = Command::new(env!("CARGO_BIN_EXE_lrank2"))
        .args(["infer", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"\\y. y")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("a0 -o a0"));
}

#[test]
fn output_is_reproducible() {
    let a = lrank2(&["infer", "-q", "(\\x. x x) ((\\y. y) (\\z. z))"]);
    let b = lrank2(&["infer", "-q", "(\\x. x x) ((\\y. y) (\\z. z))"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}
