use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dbs_cli::commands;
use dbs_cli::manifest::{sha256_hex, InputKind, ProjectionDir, RunManifest};
use dbs_core::clustering::{ClusterMode, ClusterResult};
use dbs_core::data::FcpsName;
use dbs_core::pswarm::PswarmParams;
use dbs_core::topomap::TopoMapDocument;
use tempfile::tempdir;

fn dbs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dbs")).args(args).output().expect("run dbs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn hepta_pipeline_reports_high_accuracy() {
    let tmp = tempdir().unwrap();
    let csv = tmp.path().join("hepta.csv");
    let proj = tmp.path().join("proj");
    let o = dbs(&["generate", "Hepta", "--seed", "1", "--out", p(&csv)]);
    assert!(o.status.success(), "{o:?}");
    let o = dbs(&["project", p(&csv), "--seed", "1", "--out", p(&proj)]);
    assert!(o.status.success(), "{o:?}");
    let o = dbs(&["cluster", p(&proj), "-k", "7", "--mode", "compact"]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    let acc: f64 = out
        .split_whitespace()
        .find_map(|w| w.strip_prefix("accuracy="))
        .and_then(|v| v.trim_end_matches(',').parse().ok())
        .unwrap_or_else(|| panic!("no accuracy in {out:?}"));
    assert!(acc >= 0.95, "accuracy {acc}");
    let result: ClusterResult = serde_json::from_str(&fs::read_to_string(proj.join("clusters.json")).unwrap()).unwrap();
    assert_eq!(result.k, 7);
    assert_eq!(result.mode, ClusterMode::Compact);
    assert_eq!(result.n_clusters(), 7);
}

#[test]
fn project_twice_is_byte_identical() {
    let tmp = tempdir().unwrap();
    let csv = tmp.path().join("hepta.csv");
    commands::generate(FcpsName::Hepta, 3, None, &csv).unwrap();
    for out in ["a", "b"] {
        let o = dbs(&["project", p(&csv), "--seed", "9", "--out", p(&tmp.path().join(out))]);
        assert!(o.status.success(), "{o:?}");
    }
    let a = fs::read(tmp.path().join("a/projection.json")).unwrap();
    let b = fs::read(tmp.path().join("b/projection.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn k_zero_is_a_usage_error() {
    let tmp = tempdir().unwrap();
    let o = dbs(&["cluster", p(tmp.path()), "-k", "0", "--mode", "compact"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_mode_and_dataset_are_usage_errors() {
    let tmp = tempdir().unwrap();
    assert_eq!(dbs(&["cluster", p(tmp.path()), "-k", "2", "--mode", "fuzzy"]).status.code(), Some(2));
    let out = tmp.path().join("x.csv");
    assert_eq!(dbs(&["generate", "NoSuchSet", "--out", p(&out)]).status.code(), Some(2));
}

#[test]
fn module_errors_exit_nonzero_with_one_line() {
    let tmp = tempdir().unwrap();
    let o = dbs(&["cluster", p(&tmp.path().join("missing")), "-k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "{err:?}");
    assert!(err.starts_with("dbs: error:"));

    let csv = tmp.path().join("tiny.csv");
    fs::write(&csv, "x,y\n0,0\n1,1\n").unwrap();
    let o = dbs(&["project", p(&csv), "--out", p(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 3 points"));
}

#[test]
fn manifest_reproduces_the_run() {
    let tmp = tempdir().unwrap();
    let csv = tmp.path().join("lsun.csv");
    commands::generate(FcpsName::Lsun3D, 2, Some(150), &csv).unwrap();
    let dir = tmp.path().join("run");
    let m = commands::project(&csv, 4, &PswarmParams::default(), &dir).unwrap();
    let on_disk: RunManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(on_disk, m);
    assert_eq!(m.seed, 4);
    assert_eq!(m.input.n, 150);
    assert_eq!(m.input.kind, InputKind::Dataset);
    assert_eq!(m.input.sha256, sha256_hex(&fs::read(&csv).unwrap()));
    assert_eq!(m.grid, ProjectionDir::open(&dir).unwrap().projection.grid);

    let o = dbs(&["reproduce", p(&dir), "--out", p(&tmp.path().join("again"))]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("byte-identical"));
}

#[test]
fn tampered_input_is_rejected() {
    let tmp = tempdir().unwrap();
    let csv = tmp.path().join("hepta.csv");
    commands::generate(FcpsName::Hepta, 1, Some(60), &csv).unwrap();
    let dir = tmp.path().join("run");
    commands::project(&csv, 1, &PswarmParams::default(), &dir).unwrap();
    let copy = dir.join("input.csv");
    let mut text = fs::read_to_string(&copy).unwrap();
    let dup = text.lines().nth(1).unwrap().to_owned();
    text.push_str(&dup);
    text.push('\n');
    fs::write(&copy, text).unwrap();
    let err = commands::cluster(&dir, 3, ClusterMode::Compact, None).unwrap_err();
    assert!(err.to_string().contains("does not match manifest"), "{err}");
}

#[test]
fn matrix_input_projects_without_labels() {
    let tmp = tempdir().unwrap();
    let n = 40;
    let mut text = String::new();
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let same = (i < n / 2) == (j < n / 2);
                let v = if i == j { 0.0 } else if same { 1.0 + ((i + j) % 3) as f64 * 0.1 } else { 5.0 };
                v.to_string()
            })
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    let csv = tmp.path().join("d.csv");
    fs::write(&csv, text).unwrap();
    let dir = tmp.path().join("run");
    let m = commands::project(&csv, 1, &PswarmParams::default(), &dir).unwrap();
    assert_eq!(m.input.kind, InputKind::Matrix);
    let r = commands::cluster(&dir, 2, ClusterMode::Compact, None).unwrap();
    assert_eq!(r.accuracy, None);
    assert_eq!(r.result.labels.len(), n);
}

#[test]
fn map_writes_json_and_png() {
    let tmp = tempdir().unwrap();
    let csv = tmp.path().join("hepta.csv");
    commands::generate(FcpsName::Hepta, 1, None, &csv).unwrap();
    let dir = tmp.path().join("run");
    let m = commands::project(&csv, 1, &PswarmParams::default(), &dir).unwrap();
    let o = dbs(&["map", p(&dir), "--scale", "2"]);
    assert!(o.status.success(), "{o:?}");
    let doc: TopoMapDocument = serde_json::from_str(&fs::read_to_string(dir.join("topomap.json")).unwrap()).unwrap();
    assert_eq!((doc.lines, doc.columns), (m.grid.lines, m.grid.columns));
    let png = fs::read(dir.join("topomap.png")).unwrap();
    assert_eq!(&png[1..4], b"PNG");
}

#[test]
fn bench_resumes_from_results_file() {
    let tmp = tempdir().unwrap();
    let suite = tmp.path().join("suite.json");
    fs::write(
        &suite,
        r#"{"trials": 2, "entries": [{"dataset": "Hepta", "algorithms": ["kmeans", "ward"]}]}"#,
    )
    .unwrap();
    let out = tmp.path().join("bench");
    let o = dbs(&["bench", "--suite", p(&suite), "--out", p(&out)]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("ran 4 trials"));
    let before = fs::read_to_string(out.join("results.jsonl")).unwrap();
    let o = dbs(&["bench", "--suite", p(&suite), "--out", p(&out)]);
    assert!(stdout(&o).contains("ran 0 trials"));
    assert_eq!(fs::read_to_string(out.join("results.jsonl")).unwrap(), before);
    let o = dbs(&["bench", "--suite", p(&suite), "--trials", "3", "--out", p(&out)]);
    assert!(stdout(&o).contains("ran 2 trials"), "{}", stdout(&o));
    assert!(out.join("summary.csv").exists());
}
