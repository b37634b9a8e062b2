use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_injwords"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"));
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(name: &str, doc: &Value) {
    let validator = jsonschema::validator_for(&schema(name)).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{doc:#}");
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr).to_string();
    assert_eq!(
        text.trim_end().lines().count(),
        1,
        "diagnostic should be one line: {text}"
    );
    text.trim_end().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn euler_of_nonderangements() {
    let doc = stdout_json(&run(&["euler", "--gen", "nonderangements", "--n", "5"]));
    assert_eq!(doc["result"], 1);
    assert_valid("euler", &doc);
}

#[test]
fn homology_of_full_three() {
    let doc = stdout_json(&run(&[
        "homology", "--gen", "full", "--n", "3", "--ring", "q",
    ]));
    assert_eq!(doc["result"]["betti"], serde_json::json!([1, 0, 2]));
    assert_valid("homology", &doc);
    let doc = stdout_json(&run(&["homology", "--gen", "nonderangements", "--n", "4"]));
    assert_eq!(doc["result"]["betti"], serde_json::json!([1, 0, 0, 0]));
    assert_eq!(doc["result"]["ring"], "z");
    assert_valid("homology", &doc);
}

#[test]
fn certify_four() {
    let dir = tempfile::tempdir().unwrap();
    let emit = dir.path().join("cert.jsonl");
    let doc = stdout_json(&run(&[
        "certify",
        "--n",
        "4",
        "--emit",
        emit.to_str().unwrap(),
    ]));
    assert_eq!(doc["result"]["faces"], 24);
    assert_eq!(doc["result"]["acyclic"], true);
    assert_valid("certify", &doc);
    let text = fs::read_to_string(&emit).unwrap();
    let lines: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(
        lines.len() as u64,
        doc["result"]["records"].as_u64().unwrap() + 1
    );
    for line in &lines {
        assert_valid("certificate-line", line);
    }
    assert_eq!(
        lines.last().unwrap(),
        &serde_json::json!({ "n": 4, "faces": 24, "acyclic": true })
    );
}

#[test]
fn collapse_reports() {
    let doc = stdout_json(&run(&["collapse", "--gen", "nonderangements", "--n", "3"]));
    assert_eq!(doc["result"]["success"], true);
    assert_eq!(
        doc["result"]["pairs"][0],
        serde_json::json!({ "face": "[3,1]", "coface": "[3,2,1]" })
    );
    assert_valid("collapse", &doc);
    let doc = stdout_json(&run(&[
        "collapse", "--gen", "full", "--n", "2", "--policy", "topdim",
    ]));
    assert_eq!(doc["result"]["success"], false);
    assert_eq!(doc["result"]["residual_sizes"], serde_json::json!([2, 2]));
    assert_valid("collapse", &doc);
}

#[test]
fn experiment_and_fixed_point() {
    let doc = stdout_json(&run(&["top-experiment", "--n", "4"]));
    assert_eq!(doc["result"]["success"], true);
    assert_eq!(doc["result"]["remaining_top_cells"], 0);
    assert_valid("top-experiment", &doc);
    let doc = stdout_json(&run(&["fredpoint", "--n", "5"]));
    assert_eq!(doc["result"]["marked"], 120);
    assert_eq!(doc["result"]["complete"], true);
    assert_valid("fredpoint", &doc);
}

#[test]
fn export_matrix_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d2.txt");
    let doc = stdout_json(&run(&[
        "export-matrix",
        "--gen",
        "nonderangements",
        "--n",
        "2",
        "--level",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_valid("export-matrix", &doc);
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "2 2 1 z\n1 1 -1\n2 1 1\n"
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("d2.txt.rows")).unwrap(),
        "[1]\n[2]\n"
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("d2.txt.cols")).unwrap(),
        "[1,2]\n"
    );

    let out = dir.path().join("d3.txt");
    let doc = stdout_json(&run(&[
        "export-matrix",
        "--gen",
        "full",
        "--n",
        "3",
        "--level",
        "3",
        "--ring",
        "fp:2",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(
        (
            doc["result"]["rows"].as_u64(),
            doc["result"]["cols"].as_u64()
        ),
        (Some(6), Some(6))
    );
    assert_eq!(doc["result"]["nnz"], 18);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("3 6 6 fp:2\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(" 1")));
}

#[test]
fn generator_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "p3.txt",
        "# fixed-point permutations\n[1,2,3]\n[1,3,2]\n[2,1,3]\n[3,2,1]\n",
    );
    let from_file = stdout_json(&run(&[
        "homology",
        "--gen",
        "file",
        &path,
        "--n",
        "3",
        "--no-meta",
    ]));
    let preset = stdout_json(&run(&[
        "homology",
        "--gen",
        "nonderangements",
        "--n",
        "3",
        "--no-meta",
    ]));
    assert_eq!(from_file["result"], preset["result"]);
    assert_valid("homology", &from_file);

    let bad = write(dir.path(), "bad.txt", "[1,2]\n[1,1]\n");
    let out = run(&["euler", "--gen", "file", &bad, "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let line = stderr_line(&out);
    assert!(
        line.contains("line 2") && line.contains("duplicate letter 1"),
        "{line}"
    );

    let out = run(&[
        "euler",
        "--gen",
        "file",
        "/nonexistent/gens.txt",
        "--n",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).contains("cannot read"));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["frobnicate"],
        vec!["homology", "--gen", "full", "--n", "3", "--ring", "fp:4"],
        vec!["homology", "--gen", "full", "--n", "13"],
        vec![
            "collapse", "--gen", "full", "--n", "3", "--policy", "random",
        ],
        vec!["certify", "--n", "9"],
        vec!["tables", "--n", "4"],
        vec![
            "export-matrix",
            "--gen",
            "full",
            "--n",
            "3",
            "--level",
            "7",
            "--out",
            "/tmp/never-written",
        ],
        vec!["homology", "--gen", "sometimes", "--n", "3"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(stderr_line(&out).starts_with("error"), "{args:?}");
    }
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn write_failures_exit_two() {
    let out = run(&[
        "export-matrix",
        "--gen",
        "full",
        "--n",
        "2",
        "--level",
        "2",
        "--out",
        "/nonexistent/dir/m.txt",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).contains("cannot write"));
}

#[test]
fn thread_variable() {
    let one = bin()
        .env("INJWORDS_THREADS", "1")
        .args(["certify", "--n", "5", "--no-meta"])
        .output()
        .unwrap();
    let many = bin()
        .env("INJWORDS_THREADS", "4")
        .args(["certify", "--n", "5", "--no-meta"])
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    let bad = bin()
        .env("INJWORDS_THREADS", "zero")
        .args(["euler", "--gen", "full", "--n", "2"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical() {
    for args in [
        vec![
            "homology",
            "--gen",
            "full",
            "--n",
            "4",
            "--ring",
            "fp:3",
            "--no-meta",
        ],
        vec![
            "collapse",
            "--gen",
            "nonderangements",
            "--n",
            "4",
            "--no-meta",
        ],
        vec!["certify", "--n", "5", "--no-meta"],
        vec!["tables", "--n", "3"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let meta = stdout_json(&run(&["euler", "--gen", "full", "--n", "3"]));
    assert!(meta["duration_ms"].is_u64());
    let plain = stdout_json(&run(&["euler", "--gen", "full", "--n", "3", "--no-meta"]));
    assert!(plain.get("duration_ms").is_none());
}

#[test]
fn tables_text() {
    let out = run(&["tables", "--n", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("== X ==\n"));
    assert!(text.contains("collapsed: ([3,1], [3,2,1])\n"));
    assert!(text.contains("collapsed: ([2,1], [2,1,3]) ([3,2], [1,3,2])\n"));
    assert!(text.contains("Z_3\n  s1 = [1,2,3]\nZ_2"));
}

#[test]
fn schemas_reject_wrong_shapes() {
    let mut doc = stdout_json(&run(&["homology", "--gen", "full", "--n", "2"]));
    doc["result"]["betti"] = serde_json::json!("one");
    let validator = jsonschema::validator_for(&schema("homology")).unwrap();
    assert!(!validator.is_valid(&doc));
    let mut doc = stdout_json(&run(&["certify", "--n", "3"]));
    doc["command"] = serde_json::json!("homology");
    assert!(!jsonschema::validator_for(&schema("certify"))
        .unwrap()
        .is_valid(&doc));
}
