use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};

use super::manifest::{beside, Manifest};
use super::motif::gen_motif;
use super::{DataArgs, DistillArgs, EvalArgs, GenMotifArgs, IngestArgs, StatsArgs, TrainArgs, TrainCmdArgs};
use crate::ctree::{decompose_dataset, frequency_histogram};
use crate::distill::{self, compression_report, fingerprint, DistillConfig, DistilledDataset};
use crate::error::{Error, Result};
use crate::gnn::{self, evaluate_auc, Checkpoint, History, ModelConfig, Parameters, TrainData, TrainOptions};
use crate::graph_io::{encode_featureless, load_dataset, split_dataset, write_jsonl, Dataset, FeatureEncoding, SplitPart};

const SPLIT: (f64, f64, f64) = (0.8, 0.1, 0.1);

fn manifest_path(explicit: &Option<PathBuf>, output: &Path) -> PathBuf {
    explicit.clone().unwrap_or_else(|| beside(output))
}

fn to_value(x: &impl serde::Serialize) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

/// Loads, encodes featureless inputs and attaches the 80/10/10 split.
fn prepare(data: &DataArgs, encoding: FeatureEncoding) -> Result<Dataset> {
    let ds = load_dataset(&data.input)?;
    let ds = encode_featureless(&ds, encoding)?;
    split_dataset(ds, SPLIT, data.split_seed)
}

pub(super) fn ingest(a: &IngestArgs, argv: &[String]) -> Result<()> {
    let mut m = Manifest::start("ingest", argv);
    m.config(to_value(a));
    m.input(&a.input)?;
    let ds = load_dataset(&a.input)?;
    let bytes = write_jsonl(&ds, &a.output)?;
    m.output(&a.output)?;
    println!(
        "{}",
        json!({
            "graphs": ds.len(),
            "num_classes": ds.num_classes(),
            "feature_dim": ds.feature_dim(),
            "class_counts": ds.class_counts(),
            "bytes": bytes,
        })
    );
    m.write(&manifest_path(&a.manifest, &a.output))
}

pub(super) fn gen_motif_cmd(a: &GenMotifArgs, argv: &[String]) -> Result<()> {
    let mut m = Manifest::start("gen-motif", argv);
    m.config(to_value(a));
    let ds = gen_motif(a.n_per_class, a.seed)?;
    let bytes = write_jsonl(&ds, &a.output)?;
    m.output(&a.output)?;
    println!("{}", json!({ "graphs": ds.len(), "bytes": bytes }));
    m.write(&manifest_path(&a.manifest, &a.output))
}

pub(super) fn distill_cmd(a: &DistillArgs, argv: &[String]) -> Result<()> {
    let mut m = Manifest::start("distill", argv);
    m.config(to_value(a));
    m.input(&a.data.input)?;
    let ds = prepare(&a.data, a.data.features)?;
    let cfg = DistillConfig {
        hops: a.hops,
        thetas: a.theta.clone(),
        max_itemsets: a.max_itemsets,
        scheme: a.label_scheme,
    };
    let started = Instant::now();
    let dd = distill::distill(&ds, &cfg)?;
    let seconds = started.elapsed().as_secs_f64();
    distill::serialize(&dd, &a.output)?;
    m.output(&a.output)?;
    let report = compression_report(&dd, &ds);
    println!(
        "{}",
        json!({
            "distilled_bytes": report.distilled_bytes,
            "full_bytes": report.full_bytes,
            "ratio": report.ratio,
            "trees": dd.trees.len(),
            "itemsets_per_class": dd.per_class.iter().map(Vec::len).collect::<Vec<_>>(),
            "distill_seconds": seconds,
        })
    );
    m.write(&manifest_path(&a.manifest, &a.output))
}

fn model_config(t: &TrainArgs, seed: u64) -> ModelConfig {
    ModelConfig {
        arch: t.arch,
        layers: t.layers,
        hidden_dim: t.hidden,
        pool: t.pool,
        dropout: t.dropout,
        seed,
    }
}

fn train_options(t: &TrainArgs) -> TrainOptions {
    TrainOptions {
        epochs: t.epochs,
        batch_size: t.batch_size,
        patience: t.patience,
        lr: t.lr,
    }
}

/// Reads a distilled file and checks it was mined from this training split.
fn load_distilled(path: &Path, ds: &Dataset) -> Result<DistilledDataset> {
    let dd = distill::deserialize(path)?;
    let train = ds.training_graphs();
    if dd.source_fingerprint != fingerprint(&train) {
        return Err(Error::Config(format!(
            "{} was not distilled from this dataset's training split (check --input, --features and --split-seed)",
            path.display()
        )));
    }
    Ok(dd)
}

struct Trained {
    params: Parameters,
    history: History,
}

fn train_one(t: &TrainArgs, ds: &Dataset, dd: Option<&DistilledDataset>, seed: u64) -> Result<Trained> {
    let cfg = model_config(t, seed);
    let val = ds.part(SplitPart::Val);
    let train = ds.part(SplitPart::Train);
    let data = match dd {
        Some(dd) => TrainData::Distilled(dd),
        None => TrainData::Full(&train),
    };
    let (params, history) = gnn::train(data, Some(&val), &cfg, &train_options(t))?;
    Ok(Trained { params, history })
}

fn optional_auc(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(a) => Ok(Some(a)),
        Err(Error::Degenerate(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub(super) fn train_cmd(a: &TrainCmdArgs, argv: &[String]) -> Result<()> {
    let t = &a.train;
    let mut m = Manifest::start("train", argv);
    m.config(to_value(a));
    m.input(&t.data.input)?;
    let ds = prepare(&t.data, t.data.features)?;
    let dd = match &t.distilled {
        Some(p) => {
            m.input(p)?;
            Some(load_distilled(p, &ds)?)
        }
        None => None,
    };
    let run = train_one(t, &ds, dd.as_ref(), t.seed)?;
    let cfg = model_config(t, t.seed);
    let ck = Checkpoint {
        config: cfg.clone(),
        feature_dim: run.params.in_dim(),
        num_classes: run.params.num_classes(),
        feature_encoding: t.data.features,
        params: run.params,
    };
    ck.save(&a.checkpoint)?;
    fs::write(&a.history, run.history.to_csv())?;
    m.output(&a.checkpoint)?;
    m.output(&a.history)?;
    let best = run
        .history
        .records
        .iter()
        .find(|r| r.epoch == run.history.best_epoch);
    let test_auc = optional_auc(evaluate_auc(&ck.params, &cfg, &ds.part(SplitPart::Test)))?;
    println!(
        "{}",
        json!({
            "epochs_run": run.history.records.len(),
            "best_epoch": run.history.best_epoch,
            "best_val_loss": best.and_then(|r| r.val_loss),
            "val_auc": best.and_then(|r| r.val_auc),
            "test_auc": test_auc,
        })
    );
    m.write(&manifest_path(&a.manifest, &a.checkpoint))
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub(super) fn eval_cmd(a: &EvalArgs, argv: &[String]) -> Result<()> {
    let t = &a.train;
    let mut m = Manifest::start("eval", argv);
    m.config(to_value(a));
    m.input(&t.data.input)?;
    let mut runs: Vec<(String, f64)> = Vec::new();
    if let Some(n) = a.seeds {
        let ds = prepare(&t.data, t.data.features)?;
        let dd = match &t.distilled {
            Some(p) => {
                m.input(p)?;
                Some(load_distilled(p, &ds)?)
            }
            None => None,
        };
        let test = ds.part(SplitPart::Test);
        for k in 0..n as u64 {
            let seed = t.seed + k;
            let run = train_one(t, &ds, dd.as_ref(), seed)?;
            let auc = evaluate_auc(&run.params, &model_config(t, seed), &test)?;
            println!("seed {seed}: test AUC-ROC {auc:.4}");
            runs.push((format!("seed {seed}"), auc));
        }
    } else {
        for path in &a.checkpoint {
            m.input(path)?;
            let ck = Checkpoint::load(path)?;
            let ds = prepare(&t.data, ck.feature_encoding)?;
            let auc = evaluate_auc(&ck.params, &ck.config, &ds.part(SplitPart::Test))?;
            println!("{}: test AUC-ROC {auc:.4}", path.display());
            runs.push((path.display().to_string(), auc));
        }
    }
    let aucs: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let (mean, std) = mean_std(&aucs);
    println!("test AUC-ROC: {mean:.4} ± {std:.4} (n={})", aucs.len());
    let report = json!({
        "runs": runs.iter().map(|(k, v)| json!({ "run": k, "auc": v })).collect::<Vec<_>>(),
        "mean": mean,
        "std": std,
        "n": aucs.len(),
    });
    let manifest = match (&a.manifest, &a.output) {
        (Some(p), _) => p.clone(),
        (None, Some(out)) => beside(out),
        (None, None) => PathBuf::from("eval.manifest.json"),
    };
    if let Some(out) = &a.output {
        fs::write(out, serde_json::to_string_pretty(&report)? + "\n")?;
        m.output(out)?;
    }
    m.write(&manifest)
}

pub(super) fn stats_cmd(a: &StatsArgs, argv: &[String]) -> Result<()> {
    let mut m = Manifest::start("stats", argv);
    m.config(to_value(a));
    m.input(&a.input)?;
    let ds = load_dataset(&a.input)?;
    let td = decompose_dataset(&ds, a.hops, a.label_scheme)?;
    let hist = frequency_histogram(&td, ds.len())?;
    let mut csv = String::from("normalized_frequency,percent_of_trees\n");
    for b in &hist {
        csv.push_str(&format!("{},{}\n", b.normalized_frequency, b.percent_of_trees));
    }
    fs::write(&a.output, csv)?;
    m.output(&a.output)?;
    println!(
        "{}",
        json!({
            "top1_normalized_frequency": hist.first().map(|b| b.normalized_frequency),
            "unique_trees": td.trees().len(),
            "total_trees": td.occurrence_counts().iter().sum::<usize>(),
        })
    );
    m.write(&manifest_path(&a.manifest, &a.output))
}
