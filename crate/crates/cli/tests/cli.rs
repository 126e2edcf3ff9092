use std::path::Path;
use std::process::{Command, Output};

fn tannaka(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tannaka"))
        .args(args)
        .env_remove("TANNAKA_TOLERANCE")
        .env_remove("TANNAKA_MEMORY_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn closure_dims_csv() {
    let o = tannaka(&["closure", "--dim", "2", "--level", "3", "--F", "identity"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "k\\l,0,1,2,3\n0,1,0,1,0\n1,0,1,0,2\n2,1,0,2,0\n3,0,2,0,5\n"
    );
}

#[test]
fn closure_from_generator_file() {
    let dir = tempfile::tempdir().unwrap();
    let gens = dir.path().join("gens.json");
    let coll = dir.path().join("c.json");
    let o = tannaka(&[
        "builtin",
        "uq-plus",
        "--Q",
        "identity",
        "--out",
        path(&gens),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = tannaka(&[
        "closure",
        "--gens",
        path(&gens),
        "--level",
        "2",
        "--out",
        path(&coll),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "k\\l,0,1,2\n0,1,0,2\n1,0,2,0\n2,2,0,6\n");
    let text = std::fs::read_to_string(&coll).unwrap();
    assert!(text.starts_with("{\"format\":1"));
    assert!(text.contains("\"provenance\""));
}

#[test]
fn malformed_matrix_row() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("F.json");
    std::fs::write(&f, r#"{"format":1,"matrix":[[[1,0],[0,0]],[[0,0]]]}"#).unwrap();
    let o = tannaka(&["closure", "--F", path(&f), "--level", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("row 1"), "{}", stderr(&o));
    std::fs::write(&f, "not json").unwrap();
    assert_eq!(
        tannaka(&["closure", "--F", path(&f), "--level", "2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn guard_refusal() {
    let o = tannaka(&["closure", "--dim", "2", "--level", "7"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = tannaka(&[
        "--memory-cap",
        "16",
        "closure",
        "--dim",
        "2",
        "--level",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn env_overrides() {
    let o = Command::new(env!("CARGO_BIN_EXE_tannaka"))
        .args(["closure", "--dim", "2", "--level", "3"])
        .env("TANNAKA_MEMORY_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_tannaka"))
        .args(["closure", "--dim", "2", "--level", "1"])
        .env("TANNAKA_TOLERANCE", "-1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn builtin_families() {
    let o = tannaka(&["builtin", "uq-plus", "--Q", "identity"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dim"], 2);
    assert_eq!(v["sign"], 1);
    assert_eq!(v["F"][0][1][0], 1.0);
    assert_eq!(v["F"][1][0][0], 1.0);
    assert_eq!(v["F"][0][0][0], 0.0);
    assert_eq!(v["generators"][0]["matrix"][0][0][0], 1.0);
    assert_eq!(v["generators"][0]["matrix"][1][1][0], 0.0);

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("F.json");
    std::fs::write(&f, r#"{"format":1,"matrix":[[[1,0],[1,0]],[[0,0],[1,0]]]}"#).unwrap();
    let o = tannaka(&["builtin", "of-plus", "--F", path(&f)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let o = tannaka(&["builtin", "of-plus", "--F", "identity", "--dim", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["sign"], 1);
    assert_eq!(v["generators"].as_array().unwrap().len(), 0);
}

#[test]
fn relations_output() {
    let dir = tempfile::tempdir().unwrap();
    let f1 = dir.path().join("F1.json");
    std::fs::write(&f1, r#"{"format":1,"matrix":[[[1,0]]]}"#).unwrap();
    let o = tannaka(&["relations", "builtin", "of-plus", "--F", path(&f1)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rels = v["relations"].as_array().unwrap();
    assert_eq!(rels.len(), 1);
    assert_eq!(rels[0]["terms"][0]["rows"], serde_json::json!([1, 1]));
    assert_eq!(rels[0]["equals"], serde_json::json!([1.0, 0.0]));

    let o = tannaka(&[
        "relations",
        "builtin",
        "of-plus",
        "--F",
        "identity",
        "--dim",
        "2",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rels = v["relations"].as_array().unwrap();
    assert_eq!(rels.len(), 8);
    assert!(rels.iter().all(|r| r["terms"]
        .as_array()
        .unwrap()
        .iter()
        .all(|t| t["degree"] == 2)));

    let coll = dir.path().join("c.json");
    let o = tannaka(&["closure", "--level", "2", "--out", path(&coll)]);
    assert_eq!(o.status.code(), Some(0));
    let o = tannaka(&["relations", "--collection", path(&coll)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["relations"].as_array().unwrap().len(), 7);
}

#[test]
fn verify_full_suite_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let o = tannaka(&[
        "verify",
        "--dim",
        "2",
        "--F",
        "identity",
        "--level",
        "2",
        "--out",
        path(&report),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("annihilator.duality_dims 0e0 0e0 PASS"));
    assert!(!text.contains("FAIL"));

    let coll = dir.path().join("c.json");
    tannaka(&["closure", "--level", "2", "--out", path(&coll)]);
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&coll).unwrap()).unwrap();
    let cell = v["cells"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|c| c["k"] == 2 && c["l"] == 2)
        .unwrap();
    cell["basis"][0]["matrix"][1][2] = serde_json::json!([0.3, 0.0]);
    std::fs::write(&coll, v.to_string()).unwrap();
    let o = tannaka(&["verify", "--collection", path(&coll)]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("verification failed: "), "{err}");
    assert!(err.contains("FAIL"));
}

#[test]
fn verify_oracle_and_uniqueness() {
    let o = tannaka(&["verify", "--suite", "oracle", "--level", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("oracle.table_agreement 0e0 0e0 PASS"));

    let dir = tempfile::tempdir().unwrap();
    let gens = dir.path().join("gens.json");
    let alt = dir.path().join("alt.json");
    tannaka(&["builtin", "uq-plus", "--out", path(&gens)]);
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&gens).unwrap()).unwrap();
    v["generators"][0]["matrix"] =
        serde_json::json!([[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]);
    std::fs::write(&alt, v.to_string()).unwrap();
    let o = tannaka(&[
        "verify",
        "--gens",
        path(&gens),
        "--level",
        "2",
        "--suite",
        "uniqueness",
        "--alternate",
        path(&alt),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = tannaka(&[
        "verify",
        "--gens",
        path(&gens),
        "--level",
        "2",
        "--jobs",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}
