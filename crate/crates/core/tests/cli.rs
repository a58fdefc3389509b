use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ctdistill::cli::gen_motif;
use ctdistill::graph_io::{write_jsonl, Dataset, Graph};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ctdistill"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn triangles(dir: &Path, n: usize, label: impl Fn(usize) -> usize) -> PathBuf {
    let graphs = (0..n)
        .map(|i| Graph::new(i as i64, label(i), vec![vec![1.0]; 3], vec![(0, 1), (1, 2), (0, 2)]).unwrap())
        .collect();
    let path = dir.join("triangles.jsonl");
    write_jsonl(&Dataset::new(graphs, None).unwrap(), &path).unwrap();
    path
}

fn motif(dir: &Path) -> PathBuf {
    let path = dir.join("motif.jsonl");
    write_jsonl(&gen_motif(20, 1).unwrap(), &path).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn distill_without_theta_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = triangles(dir.path(), 6, |_| 0);
    let out = dir.path().join("d.json");
    let o = run(dir.path(), &["distill", "--input", s(&data), "--hops", "1", "--output", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"].is_string());
    assert!(!out.exists());
}

#[test]
fn identical_triangles_distill_to_one_tree() {
    let dir = tempfile::tempdir().unwrap();
    let data = triangles(dir.path(), 6, |_| 0);
    let out = dir.path().join("d.json");
    let o = run(
        dir.path(),
        &["distill", "--input", s(&data), "--hops", "1", "--theta", "0.5", "--output", s(&out)],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(summary["trees"], 1);
    assert!(out.exists());
    assert!(dir.path().join("d.json.manifest.json").exists());
}

#[test]
fn per_class_thresholds_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let data = motif(dir.path());
    let out = dir.path().join("d.json");
    let o = run(
        dir.path(),
        &["distill", "--input", s(&data), "--hops", "3", "--theta", "0.13,0.10", "--output", s(&out)],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn theta_out_of_range_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = motif(dir.path());
    let out = dir.path().join("d.json");
    let o = run(
        dir.path(),
        &["distill", "--input", s(&data), "--hops", "2", "--theta", "1.5", "--output", s(&out)],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_on_single_class_test_set_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let data = triangles(dir.path(), 20, |_| 0);
    let o = run(dir.path(), &["eval", "--input", s(&data), "--seeds", "1", "--epochs", "2"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "DegenerateError");
}

#[test]
fn eval_over_seeds_reports_mean_and_std() {
    let dir = tempfile::tempdir().unwrap();
    let data = motif(dir.path());
    let o = run(
        dir.path(),
        &["eval", "--input", s(&data), "--seeds", "5", "--epochs", "3", "--hidden", "8"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("test AUC-ROC: ") && last.contains(" ± ") && last.ends_with("(n=5)"), "{last}");
    assert!(dir.path().join("eval.manifest.json").exists());
}

#[test]
fn train_then_eval_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let data = motif(dir.path());
    let ck = dir.path().join("ck.json");
    let hist = dir.path().join("h.csv");
    let o = run(
        dir.path(),
        &[
            "train", "--input", s(&data), "--epochs", "4", "--arch", "gcn", "--checkpoint", s(&ck), "--history",
            s(&hist),
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&hist).unwrap();
    assert!(csv.starts_with("epoch,train_loss,val_loss,val_auc\n"));
    assert!(dir.path().join("ck.json.manifest.json").exists());
    let report = dir.path().join("eval.json");
    let o = run(
        dir.path(),
        &["eval", "--input", s(&data), "--checkpoint", s(&ck), "--output", s(&report)],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("(n=1)"));
    assert!(report.exists());
}

#[test]
fn train_from_mismatched_distillation_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = motif(dir.path());
    let dd = dir.path().join("d.json");
    let o = run(
        dir.path(),
        &["distill", "--input", s(&data), "--hops", "2", "--theta", "0.3,0.3", "--output", s(&dd)],
    );
    assert!(o.status.success());
    let o = run(
        dir.path(),
        &[
            "train", "--input", s(&data), "--split-seed", "7", "--distilled", s(&dd), "--epochs", "1",
            "--checkpoint", s(&dir.path().join("ck.json")), "--history", s(&dir.path().join("h.csv")),
        ],
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn stats_on_identical_triangles() {
    let dir = tempfile::tempdir().unwrap();
    let data = triangles(dir.path(), 6, |_| 0);
    let out = dir.path().join("hist.csv");
    let o = run(dir.path(), &["stats", "--input", s(&data), "--hops", "1", "--output", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap(), "normalized_frequency,percent_of_trees\n1,100\n");
}

#[test]
fn stats_on_colored_pair() {
    let dir = tempfile::tempdir().unwrap();
    let hot = |k: usize| {
        let mut v = vec![0.0; 3];
        v[k - 1] = 1.0;
        v
    };
    let g1 = Graph::new(1, 0, [1, 2, 3, 3].map(hot).to_vec(), vec![(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
    let g2 = Graph::new(
        2,
        1,
        [3, 1, 3, 2, 2].map(hot).to_vec(),
        vec![(1, 2), (2, 3), (3, 0), (0, 4), (4, 1), (2, 0)],
    )
    .unwrap();
    let data = dir.path().join("pair.jsonl");
    write_jsonl(&Dataset::new(vec![g1, g2], None).unwrap(), &data).unwrap();
    let out = dir.path().join("hist.csv");
    let o = run(
        dir.path(),
        &["stats", "--input", s(&data), "--hops", "2", "--label-scheme", "feature-only", "--output", s(&out)],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(summary["top1_normalized_frequency"], 1.0);
}

#[test]
fn stats_on_planted_motif() {
    let dir = tempfile::tempdir().unwrap();
    let data = motif(dir.path());
    let out = dir.path().join("hist.csv");
    let o = run(dir.path(), &["stats", "--input", s(&data), "--hops", "2", "--output", s(&out)]);
    assert!(o.status.success());
    let summary: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(summary["top1_normalized_frequency"].as_f64().unwrap() >= 0.3);
}

#[test]
fn gen_motif_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        let o = run(dir.path(), &["gen-motif", "--output", s(p), "--n-per-class", "12", "--seed", "3"]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let o = run(dir.path(), &["gen-motif", "--output", s(&a), "--n-per-class", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ingest_round_trips_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let data = motif(dir.path());
    let out = dir.path().join("copy.jsonl");
    let manifest = dir.path().join("m.json");
    let o = run(
        dir.path(),
        &["ingest", "--input", s(&data), "--output", s(&out), "--manifest", s(&manifest)],
    );
    assert!(o.status.success());
    assert_eq!(fs::read(&data).unwrap(), fs::read(&out).unwrap());
    let m: serde_json::Value = serde_json::from_slice(&fs::read(&manifest).unwrap()).unwrap();
    assert_eq!(m["command"], "ingest");
}
