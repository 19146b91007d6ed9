use std::fs;

use curvlab::manifest::{Format, Manifest, OutputSection};
use curvlab::run::{exit_code, run, run_manifest, write_outputs, RunOptions};
use curvlab::symmetry::RegionClass;
use curvlab::{Error, Report};

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("curvlab-pipeline-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn manifest_file_to_json_and_csv() {
    let json = tmp("sol.json");
    let csv = tmp("sol.csv");
    let path = tmp("sol.toml");
    fs::write(
        &path,
        format!(
            "task = \"classify\"\n[metric]\ncatalog = \"sol3\"\n[grid]\ncounts = 3\n\
             [output]\npath = {:?}\ncsv = {:?}\n",
            json.display().to_string(),
            csv.display().to_string()
        ),
    )
    .unwrap();
    let report = run_manifest(&path, RunOptions::default()).unwrap();
    let m = Manifest::load(&path).unwrap();
    assert_eq!(write_outputs(&report, &m.output).unwrap(), None);

    let text = fs::read_to_string(&json).unwrap();
    let back: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(back.schema, 1);
    let region = back.classification.unwrap().region.unwrap();
    assert_eq!(region.class, RegionClass::PseudoSymmetricConstantType);

    let table = fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 28);
    assert!(table.lines().nth(1).unwrap().contains("PseudoSymmetric,-1"));
}

#[test]
fn inline_metric_warped_product() {
    let src = r#"
task = "classify"
[metric]
name = "warped"
coords = ["t", "x", "y"]
components = { g00 = "1", g11 = "(1 + t^2)^2", g22 = "(1 + t^2)^2" }
[grid]
bounds = [[0.2, 1.0], [-1, 1], [-1, 1]]
counts = 3
"#;
    let r = run(&Manifest::from_toml(src).unwrap(), RunOptions::default()).unwrap();
    assert!(r.passed);
    let c = r.classification.unwrap();
    // L varies with t on a warped product.
    assert_eq!(c.region.unwrap().class, RegionClass::PseudoSymmetricVariable);
}

#[test]
fn stdout_rendering_when_no_path() {
    let m = Manifest::from_toml("task = \"classify\"\n[metric]\ncatalog = \"nil3\"\n[grid]\nrandom = 5\n").unwrap();
    let r = run(&m, RunOptions::default()).unwrap();
    let out = OutputSection {
        path: None,
        format: Format::Text,
        csv: None,
    };
    let text = write_outputs(&r, &out).unwrap().unwrap();
    assert!(text.contains("result: PASSED"));
    assert!(text.contains("region verdict needs at least 8 points"));
}

#[test]
fn input_errors_are_exit_code_one() {
    let cases = [
        "task = \"classify\"\n[metric]\ncatalog = \"nil3\"\n[tolerances]\nfit = -1\n",
        "task = \"classify\"\n[metric]\ncatalog = \"nil3\"\n[tolerances]\nbogus = 1\n",
        "task = \"verify-soliton\"\n[metric]\ncatalog = \"nil3\"\n",
        "task = \"classify\"\n[metric]\ncatalog = \"hyperbolic3\"\n[grid]\nbounds = [[-1, 1], [-1, 1], [-1, 1]]\n",
        "task = \"fit-soliton\"\n[metric]\ncatalog = \"nil3\"\n[grid]\nrandom = 20\n[soliton]\nkind = \"ricci\"\n",
    ];
    for src in cases {
        let r = Manifest::from_toml(src).and_then(|m| run(&m, RunOptions::default()));
        assert_eq!(exit_code(&r), 1, "{src}");
    }
    let missing = run_manifest(
        std::path::Path::new("/nonexistent/manifest.toml"),
        RunOptions::default(),
    );
    assert!(matches!(&missing, Err(Error::Manifest(m)) if m.contains("cannot read")));
    assert_eq!(exit_code(&missing), 1);
}
