use super::*;

fn run_one(id: &str) -> InstanceCertificate {
    let spec = builtin_catalog("paper_examples")
        .unwrap()
        .into_iter()
        .find(|s| s.id == id)
        .unwrap();
    run_instance(&spec, 0, DEFAULT_TOL)
}

#[test]
fn empty_catalog_parses() {
    assert!(parse_catalog("[]").unwrap().is_empty());
}

#[test]
fn parse_error_has_position() {
    let err = parse_catalog("[{\"id\": \"a\", \"run\": [\"roots\"],}]").unwrap_err();
    assert!(err.to_string().contains("line 1"), "{err}");
}

#[test]
fn unknown_fields_and_duplicates_rejected() {
    assert!(parse_catalog(r#"[{"id":"a","run":[],"bogus":1}]"#).is_err());
    assert!(parse_catalog(r#"[{"id":"a","run":[]},{"id":"a","run":[]}]"#).is_err());
    assert!(parse_catalog(r#"[{"id":"a","run":[],"tol":0}]"#).is_err());
}

#[test]
fn builtins_roundtrip_through_json() {
    let specs = builtin_catalog("paper_examples").unwrap();
    let text = serde_json::to_string(&specs).unwrap();
    assert_eq!(parse_catalog(&text).unwrap(), specs);
    assert!(builtin_catalog("nope").is_none());
}

#[test]
fn twistor_pair_passes() {
    let c = run_one("so5_so4_J");
    assert!(c.passed, "{:?}", c.failures);
    let f = c.fatness.unwrap();
    assert_eq!(f.verdicts.oracle, Verdict::Fat);
    assert_eq!(c.samples.unwrap().agreed, 200);
    assert_eq!(c.coupling.unwrap().closedness_residual, "0");
}

#[test]
fn wall_point_is_not_fat() {
    let c = run_one("so5_so4_t1");
    assert!(c.passed, "{:?}", c.failures);
    let f = c.fatness.unwrap();
    assert_eq!(f.verdicts.roots, Verdict::NotFat);
    assert_eq!(f.witnesses.root, Some(vec![0, 1]));
}

#[test]
fn unequal_rank_pair_is_never_fat() {
    let c = run_one("so4_so3");
    assert!(c.passed, "{:?}", c.failures);
    let s = c.samples.unwrap();
    assert_eq!(s.not_fat, 100);
    assert!(c.algebra.unwrap().root_note.is_some());
}

#[test]
fn wrong_expectation_fails_honestly() {
    let mut spec = builtin_catalog("paper_examples")
        .unwrap()
        .into_iter()
        .find(|s| s.id == "so4_so3")
        .unwrap();
    spec.expect = Some(Verdict::Fat);
    let c = run_instance(&spec, 0, DEFAULT_TOL);
    assert!(!c.passed);
}

#[test]
fn shift_instances() {
    let sq = run_one("b2_unit_square_shift");
    assert!(sq.passed, "{:?}", sq.failures);
    assert!(sq.shift.unwrap().verified);
    let none = run_one("b2_central_shift_infeasible");
    assert!(none.passed, "{:?}", none.failures);
    assert!(none.shift.unwrap().shift.is_none());
    let moved = run_one("so5_so4_shift");
    assert!(moved.passed, "{:?}", moved.failures);
    assert!(moved.shift.unwrap().shifted_vertices.unwrap().iter().all(|v| v.is_fat()));
}

#[test]
fn errors_become_failures() {
    let specs = parse_catalog(r#"[{"id":"bad","g":{"family":"so","params":[5,2]},"h":{"kind":"so_block","k":4},"run":["oracle"]}]"#)
        .unwrap();
    let c = run_instance(&specs[0], 0, DEFAULT_TOL);
    assert!(!c.passed);
    assert!(c.failures[0].starts_with("error"));
}

#[test]
fn catalog_run_writes_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let specs = parse_catalog(
        r#"[{"id":"so5_u2","g":{"family":"so","params":[5]},"h":{"kind":"u_block","m":2},"xu":["1","1"],"run":["roots","oracle","centralizer","coupling"],"expect":"fat"}]"#,
    )
    .unwrap();
    let opts = RunOptions {
        out_dir: dir.path().to_path_buf(),
        jobs: Some(2),
        ..RunOptions::default()
    };
    let summary = run_catalog(&specs, &opts).unwrap();
    assert_eq!(summary.exit_code(), 0);
    let text = fs::read_to_string(dir.path().join("so5_u2.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdicts"]["oracle"], "fat");
    assert_eq!(v["Xu_torus"], serde_json::json!(["1", "1"]));
    let again = run_catalog(&specs, &opts).unwrap();
    assert_eq!(again, summary);
    assert_eq!(fs::read_to_string(dir.path().join("so5_u2.json")).unwrap(), text);
    let report = explain("so5_u2", dir.path()).unwrap();
    assert!(report.contains("verdicts: roots fat"), "{report}");
}

#[test]
fn explain_unknown_and_builtin() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(explain("nope", dir.path()), Err(Error::UnknownInstance(_))));
    let text = explain("so5_so4_t1", dir.path()).unwrap();
    assert!(text.contains("t2"), "{text}");
}

#[test]
fn root_names() {
    assert_eq!(root_name(&[1, -1, 0]), "t1-t2");
    assert_eq!(root_name(&[0, 2]), "2t2");
    assert_eq!(root_name(&[-1, 0]), "-t1");
}
