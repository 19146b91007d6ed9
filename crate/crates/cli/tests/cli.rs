use std::fs;
use std::process::{Command, Output};

fn curvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvlab")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn catalog_lists_eight_entries() {
    let o = curvlab(&["catalog", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 8);
    assert!(entries.iter().all(|e| e["ricci_pattern"].is_string()));
    assert!(stdout(&curvlab(&["catalog"])).contains("nil3"));
}

#[test]
fn classify_nil_prints_table() {
    let o = curvlab(&["classify", "--metric", "nil3", "--grid", "(-1,1)^3:5"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("PseudoSymmetricConstantType"));
    assert!(text.contains("L = 0.250000"));
}

#[test]
fn verify_soliton_exit_codes() {
    let base = [
        "verify-soliton",
        "--metric",
        "r_x_s2",
        "--grid",
        "3",
        "--kind",
        "ricci",
        "--potential",
        "t^2/2",
    ];
    let ok = curvlab(&[&base[..], &["--lambda", "1"]].concat());
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    let off = curvlab(&[&base[..], &["--lambda", "2", "--format", "json"]].concat());
    assert_eq!(code(&off), 2);
    let v: serde_json::Value = serde_json::from_str(&stdout(&off)).unwrap();
    assert!((v["soliton"]["defining"]["sup"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["passed"], false);
}

#[test]
fn negative_lambda_is_accepted() {
    let o = curvlab(&[
        "verify-soliton",
        "--metric",
        "r_x_h2",
        "--grid",
        "3",
        "--kind",
        "ricci",
        "--potential",
        "-t^2/2",
        "--lambda",
        "-1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn fit_flat_space_reports_degenerate_lambda() {
    let o = curvlab(&[
        "fit-soliton",
        "--metric",
        "euclidean",
        "--grid",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["fit"]["degenerate"], true);
    assert!(v["fit"]["notes"][0]
        .as_str()
        .unwrap()
        .contains("lambda is not determined"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.toml");
    fs::write(&m, "task = \"classify\"\n[metric]\ncatalog = \"nil3\"\n").unwrap();
    let m = m.to_str().unwrap();
    for args in [
        vec!["classify", "--manifest", m, "--metric", "sol3"],
        vec!["diagnostics", "--manifest", m],
        vec!["classify"],
        vec!["classify", "--metric", "nowhere"],
        vec!["classify", "--metric", "nil3", "--tol", "fit=abc"],
        vec!["classify", "--bogus"],
        vec!["diagnostics", "--metric", "sphere3", "--grid", "2"],
    ] {
        let o = curvlab(&args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(code(&curvlab(&["--help"])), 0);
}

#[test]
fn manifest_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let m = dir.path().join("m.toml");
    fs::write(
        &m,
        format!(
            "task = \"diagnostics\"\nseed = 3\n[metric]\ncatalog = \"sol3\"\n[grid]\nrandom = 12\n\
             [output]\npath = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let once = || {
        let o = curvlab(&["diagnostics", "--manifest", m.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
        fs::read(&out).unwrap()
    };
    let a = once();
    let b = once();
    assert!(a == b, "reports differ");
}

#[test]
fn timing_is_opt_in() {
    let args = ["classify", "--metric", "euclidean", "--grid", "2", "--format", "json"];
    let plain: serde_json::Value = serde_json::from_str(&stdout(&curvlab(&args))).unwrap();
    assert!(plain.get("timing_ms").is_none());
    let timed: serde_json::Value =
        serde_json::from_str(&stdout(&curvlab(&[&args[..], &["--timing"]].concat()))).unwrap();
    assert!(timed["timing_ms"].as_f64().is_some());
}

#[test]
fn csv_and_sequential_flags() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let o = curvlab(&[
        "classify",
        "--metric",
        "sol3",
        "--grid",
        "3",
        "--sequential",
        "--csv",
        csv.to_str().unwrap(),
        "--tol",
        "cross_check=1e-5",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(csv).unwrap().lines().count(), 28);
}
