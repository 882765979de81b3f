use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fatcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fatcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_into(catalog: &str, out: &Path) -> Output {
    fatcert(&["run", catalog, "--out", out.to_str().unwrap()])
}

#[test]
fn builtin_catalog_passes_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_into("paper_examples", a.path());
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stdout));
    let table = String::from_utf8(first.stdout).unwrap();
    assert!(table.contains("so4_1_so4_J"));
    let second = fatcert(&["run", "paper_examples", "--out", b.path().to_str().unwrap(), "--jobs", "1"]);
    assert_eq!(second.status.code(), Some(0));
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 12);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn wrong_expectation_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat.json");
    fs::write(
        &cat,
        r#"[{"id": "so4_so3", "g": {"family": "so", "params": [4]}, "h": {"kind": "so_block", "k": 3},
            "xu": ["1"], "run": ["roots", "oracle", "centralizer"], "expect": "fat"}]"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let res = run_into(cat.to_str().unwrap(), &out);
    assert_eq!(res.status.code(), Some(1));
    let cert = fs::read_to_string(out.join("so4_so3.json")).unwrap();
    assert!(cert.contains("\"oracle\": \"not_fat\""));
    assert!(cert.contains("\"odd_dimension\": true"));
}

#[test]
fn empty_catalog_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("empty.json");
    fs::write(&cat, "[]").unwrap();
    let res = run_into(cat.to_str().unwrap(), &dir.path().join("out"));
    assert_eq!(res.status.code(), Some(0));
    assert!(String::from_utf8(res.stdout).unwrap().contains("0/0 instances passed"));
}

#[test]
fn parse_error_exits_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("bad.json");
    fs::write(&cat, "[\n  {\"id\": \"x\",\n   \"run\": [\"roots\"\n]").unwrap();
    let res = run_into(cat.to_str().unwrap(), &dir.path().join("out"));
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8(res.stderr).unwrap().contains("line"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fatcert(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fatcert(&["run", "no_such_catalog"]).status.code(), Some(2));
}

#[test]
fn explain_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(fatcert(&["run", "paper_examples", "--out", out]).status.code(), Some(0));
    let j = String::from_utf8(fatcert(&["explain", "so5_so4_J", "--out", out]).stdout).unwrap();
    assert!(j.contains("forbidden walls:  t1, t2, -t1, -t2"), "{j}");
    assert!(j.contains("t1  1") && j.contains("t2  1"), "{j}");
    let w = String::from_utf8(fatcert(&["explain", "so5_so4_t1", "--out", out]).stdout).unwrap();
    assert!(w.contains("vanishing root: t2"), "{w}");
    let p = String::from_utf8(fatcert(&["explain", "pinch_n2_pos", "--out", out]).stdout).unwrap();
    assert!(p.contains("min|diag|"), "{p}");
    assert_eq!(p.lines().filter(|l| l.trim_end().ends_with("true")).count(), 100);
    assert_eq!(fatcert(&["explain", "nope", "--out", out]).status.code(), Some(1));
}

#[test]
fn list_builtins() {
    let res = fatcert(&["list-builtins"]);
    assert_eq!(res.status.code(), Some(0));
    assert!(String::from_utf8(res.stdout).unwrap().contains("paper_examples"));
}
