use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qlocc::cli::document::EnsembleDocument;

fn qlocc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlocc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn generate(dir: &Path, family: &str, extra: &[&str]) -> String {
    let path = dir.join(format!("{family}.json"));
    let p = path.to_str().unwrap().to_string();
    let mut args = vec!["generate", family, "--out", &p];
    args.extend_from_slice(extra);
    let o = qlocc(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    p
}

#[test]
fn classify_first_family_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "eq1", &["--lambda1", "0.3", "--lambda3", "0.4"]);
    let o = qlocc(&["classify", &path]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(
        text.lines().next(),
        Some("OneUnidentifiable; unidentifiable: state 0; UEB: yes")
    );
    assert!(text.contains("witness"));
    assert!(text.contains("declared class OneUnidentifiable: confirmed"));
}

#[test]
fn classify_bell_basis_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "bell-basis", &[]);
    let o = qlocc(&["classify", &path]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).lines().next(),
        Some("CompleteBasis(4); conclusively distinguishable: no")
    );
}

#[test]
fn generated_documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for family in ["eq1", "eq2", "bell-triple", "random-met", "bell-basis"] {
        let path = generate(dir.path(), family, &["--seed", "7"]);
        let o = qlocc(&["classify", "--json", &path]);
        assert_eq!(o.status.code(), Some(0), "{family}: {}", stderr(&o));
        let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(json["class"], json["declared_class"], "{family}");
        // every witness is an amplitude quadruple
        for s in json["states"].as_array().unwrap() {
            if let Some(w) = s["witness"].as_object() {
                assert_eq!(w["amplitudes"].as_array().unwrap().len(), 4);
            }
        }
    }
}

#[test]
fn declared_class_mismatch_is_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "bell-triple", &[]);
    let mut doc = EnsembleDocument::parse(&fs::read_to_string(&path).unwrap()).unwrap();
    doc.class = Some("TwoUnidentifiable".into());
    fs::write(&path, doc.to_json()).unwrap();
    let o = qlocc(&["classify", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("MISMATCH"));
}

#[test]
fn malformed_input_exits_2_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"states": [[[1, 0], [0, 0], [0, 0], [0, 0]], [[0, 0], ["x", 0], [0, 0], [0, 0]]]}"#,
    )
    .unwrap();
    let o = qlocc(&["classify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("states[1][1][0]"), "{}", stderr(&o));

    fs::write(
        &path,
        r#"{"states": [[[1, 0], [0, 0], [0, 0], [0, 0]], [[1, 0], [1, 0], [0, 0], [0, 0]]]}"#,
    )
    .unwrap();
    let o = qlocc(&["classify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("0 and 1"), "{}", stderr(&o));

    let o = qlocc(&[
        "classify",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = qlocc(&[
        "classify",
        path.to_str().unwrap(),
        "--tolerance",
        "eps_bogus=1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = qlocc(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tolerance_override_changes_orthogonality_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("near.json");
    fs::write(
        &path,
        r#"{"states": [[[1, 0], [0, 0], [0, 0], [0, 0]], [[1e-7, 0], [1, 0], [0, 0], [0, 0]]]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(qlocc(&["classify", p]).status.code(), Some(2));
    let o = qlocc(&["classify", p, "--tolerance", "eps_orth=1e-6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("PerfectLOCC"));
}

#[test]
fn sweeps_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = qlocc(&[
            "sweep",
            "--family",
            "eq1",
            "--grid",
            "0.1:0.9:5",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("25 points, class OneUnidentifiable at every point"));
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 26);
    assert_eq!(
        lines[0],
        "λ1,λ3,class,unidentifiable,avg_entanglement,is_ueb"
    );
    assert!(lines[2].starts_with("0.1,0.3,OneUnidentifiable,0,"));
    assert!(lines[2].ends_with(",true"));
}

#[test]
fn second_family_sweep() {
    let o = qlocc(&["sweep", "--family", "eq2", "--grid", "0.1:0.9:5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 6);
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.contains(",,TwoUnidentifiable,1;2,") && l.ends_with(",false")));
    assert!(stderr(&o).contains("class TwoUnidentifiable at every point"));
}

#[test]
fn sweep_rejects_bad_bounds() {
    for grid in ["0:0.5:3", "0.1:0.9:1", "0.1:1.5:3", "nonsense"] {
        let o = qlocc(&["sweep", "--family", "eq1", "--grid", grid]);
        assert_eq!(o.status.code(), Some(2), "{grid}");
    }
}

#[test]
fn joined_sweep_reports_the_entropy_comparison() {
    let o = qlocc(&["sweep", "--family", "joined", "--grid", "0.2:0.8:3"]);
    // the second family is always higher in class but never lower in
    // average entropy, so the joined claim is reported as violated
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("eq2 class higher: 9/9; eq2 average entanglement lower: 0/9"));
    let text = stdout(&o);
    assert!(text.starts_with("λ1,λ3,eq1_class,eq2_class,"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn demo_trit() {
    let o = qlocc(&["demo-trit", "--lambda1", "0.3", "--lambda3", "0.4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("trit 0: protected; trit 1: recoverable; trit 2: recoverable"));
    assert_eq!(text.matches("  witness").count(), 2);

    let o = qlocc(&["demo-trit", "--lambda1", "0.5", "--lambda3", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("warning"));

    let o = qlocc(&["demo-trit", "--lambda1", "1.2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let o = qlocc(&["verify", "--suite", "prop1", "--count", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("prop1            PASS 100/100"),
        "{}",
        stdout(&o)
    );

    let o = qlocc(&["verify", "--suite", "footnote2", "--count", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS 1000/1000"));

    let o = qlocc(&["verify", "--suite", "hierarchy", "--grid", "0.2:0.8:3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("1 suite(s) failed"));

    let o = qlocc(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}
