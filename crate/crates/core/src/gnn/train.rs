use std::fmt::Write as _;

use ndarray::{Array2, Axis};
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ModelConfig;
use super::metrics::auc_from_scores;
use super::model::{loss_and_grad, predict_log};
use super::params::Parameters;
use super::plan::Plan;
use crate::distill::DistilledDataset;
use crate::error::{Error, Result};
use crate::graph_io::Dataset;

const EVAL_CHUNK: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub epochs: usize,
    pub batch_size: usize,
    /// Stop after this many epochs without a new best validation loss.
    pub patience: usize,
    pub lr: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            epochs: 200,
            batch_size: 32,
            patience: 15,
            lr: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum TrainData<'a> {
    Full(&'a Dataset),
    Distilled(&'a DistilledDataset),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: Option<f64>,
    /// `None` when there is no validation set or it holds a single class.
    pub val_auc: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    pub records: Vec<EpochRecord>,
    /// Epoch whose parameters were returned (0 means the initialization).
    pub best_epoch: usize,
}

impl History {
    pub fn to_csv(&self) -> String {
        fn opt(x: Option<f64>) -> String {
            x.map_or_else(String::new, |v| format!("{v}"))
        }
        let mut out = String::from("epoch,train_loss,val_loss,val_auc\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.epoch,
                r.train_loss,
                opt(r.val_loss),
                opt(r.val_auc)
            );
        }
        out
    }
}

struct Adam {
    lr: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(lr: f64, n: usize) -> Self {
        Adam {
            lr,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut Parameters, grads: &Parameters) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        let g = grads.to_flat();
        let mut i = 0;
        params.for_each_mut(|p| {
            let gi = g[i];
            self.m[i] = Self::B1 * self.m[i] + (1.0 - Self::B1) * gi;
            self.v[i] = Self::B2 * self.v[i] + (1.0 - Self::B2) * gi * gi;
            *p -= self.lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + Self::EPS);
            i += 1;
        });
    }
}

fn graph_plans(ds: &Dataset, cfg: &ModelConfig, in_dim: usize) -> Result<Vec<Plan>> {
    ds.graphs()
        .iter()
        .map(|g| Plan::for_graph(g, cfg.layers, in_dim))
        .collect()
}

/// Log class probabilities for every graph, in dataset order.
pub fn predict_dataset(params: &Parameters, cfg: &ModelConfig, ds: &Dataset) -> Result<Array2<f64>> {
    let plans = graph_plans(ds, cfg, params.in_dim())?;
    predict_plans(&plans, cfg, params)
}

fn predict_plans(plans: &[Plan], cfg: &ModelConfig, params: &Parameters) -> Result<Array2<f64>> {
    let mut out = Array2::zeros((plans.len(), params.num_classes()));
    for (c, chunk) in plans.chunks(EVAL_CHUNK).enumerate() {
        let parts: Vec<Vec<&Plan>> = chunk.iter().map(|p| vec![p]).collect();
        let probs = predict_log(&Plan::concat(&parts), cfg, params)?;
        let at = c * EVAL_CHUNK;
        out.slice_mut(ndarray::s![at..at + chunk.len(), ..]).assign(&probs);
    }
    Ok(out)
}

fn mean_ce(log_probs: &Array2<f64>, labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let total: f64 = log_probs
        .axis_iter(Axis(0))
        .zip(labels)
        .map(|(row, &y)| -row[y])
        .sum();
    total / labels.len() as f64
}

/// Mean cross-entropy over `ds` in evaluation mode.
pub fn dataset_loss(params: &Parameters, cfg: &ModelConfig, ds: &Dataset) -> Result<f64> {
    let probs = predict_dataset(params, cfg, ds)?;
    Ok(mean_ce(&probs, &ds.labels()))
}

/// Test-set AUC-ROC (binary, or one-vs-rest macro average).
pub fn evaluate_auc(params: &Parameters, cfg: &ModelConfig, test: &Dataset) -> Result<f64> {
    let probs = predict_dataset(params, cfg, test)?;
    auc_from_scores(&probs, &test.labels())
}

/// Itemset sampler: a class in proportion to its train-graph count, then an
/// itemset of that class in proportion to its frequency.
struct ItemsetSampler {
    classes: Vec<usize>,
    class_dist: WeightedIndex<f64>,
    within: Vec<WeightedIndex<f64>>,
}

impl ItemsetSampler {
    fn new(dd: &DistilledDataset) -> Result<Self> {
        let mut classes = Vec::new();
        let mut cw = Vec::new();
        let mut within = Vec::new();
        for (c, sets) in dd.per_class.iter().enumerate() {
            let count = dd.class_graph_counts.get(c).copied().unwrap_or(0);
            if sets.is_empty() || count == 0 {
                continue;
            }
            let w = WeightedIndex::new(sets.iter().map(|s| s.frequency))
                .map_err(|e| Error::Config(format!("class {c} itemset weights: {e}")))?;
            classes.push(c);
            cw.push(count as f64);
            within.push(w);
        }
        if classes.is_empty() {
            return Err(Error::Config("distilled dataset has no itemsets to train on".into()));
        }
        Ok(ItemsetSampler {
            classes,
            class_dist: WeightedIndex::new(&cw).expect("positive counts"),
            within,
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> (usize, usize) {
        let k = self.class_dist.sample(rng);
        (self.classes[k], self.within[k].sample(rng))
    }
}

/// The exact sampling probability of every itemset, as (class, index, p).
fn itemset_probabilities(dd: &DistilledDataset) -> Vec<(usize, usize, f64)> {
    let total: f64 = dd
        .per_class
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(c, _)| dd.class_graph_counts.get(c).copied().unwrap_or(0) as f64)
        .sum();
    let mut out = Vec::new();
    for (c, sets) in dd.per_class.iter().enumerate() {
        let pc = dd.class_graph_counts.get(c).copied().unwrap_or(0) as f64 / total;
        let fsum: f64 = sets.iter().map(|s| s.frequency).sum();
        for (i, s) in sets.iter().enumerate() {
            out.push((c, i, pc * s.frequency / fsum));
        }
    }
    out
}

fn tree_plans(dd: &DistilledDataset, cfg: &ModelConfig, in_dim: usize) -> Result<Vec<Plan>> {
    if cfg.layers > dd.hops {
        return Err(Error::Config(format!(
            "model has {} layers but the distilled trees are {} hops deep",
            cfg.layers, dd.hops
        )));
    }
    dd.trees
        .iter()
        .map(|t| Plan::for_tree(t, cfg.layers, &dd.feature_dict, in_dim))
        .collect()
}

/// Frequency-weighted cross-entropy over every itemset of `dd`, using the
/// same class and itemset probabilities as distilled training.
pub fn distilled_loss(params: &Parameters, cfg: &ModelConfig, dd: &DistilledDataset) -> Result<f64> {
    let plans = tree_plans(dd, cfg, params.in_dim())?;
    let probs = itemset_probabilities(dd);
    let mut total = 0.0;
    for chunk in probs.chunks(EVAL_CHUNK) {
        let parts: Vec<Vec<&Plan>> = chunk
            .iter()
            .map(|&(c, i, _)| dd.per_class[c][i].trees.iter().map(|&t| &plans[t]).collect())
            .collect();
        let plan = Plan::concat(&parts);
        let lp = predict_log(&plan, cfg, params)?;
        for (row, &(c, _, w)) in lp.axis_iter(Axis(0)).zip(chunk) {
            total -= w * row[c];
        }
    }
    Ok(total)
}

struct Validation {
    plans: Vec<Plan>,
    labels: Vec<usize>,
}

impl Validation {
    fn evaluate(&self, params: &Parameters, cfg: &ModelConfig) -> Result<(f64, Option<f64>)> {
        let probs = predict_plans(&self.plans, cfg, params)?;
        let loss = mean_ce(&probs, &self.labels);
        let auc = match auc_from_scores(&probs, &self.labels) {
            Ok(a) => Some(a),
            Err(Error::Degenerate(_)) => None,
            Err(e) => return Err(e),
        };
        Ok((loss, auc))
    }
}

fn dims(data: TrainData) -> (usize, usize) {
    match data {
        TrainData::Full(ds) => (ds.feature_dim(), ds.num_classes()),
        TrainData::Distilled(dd) => (dd.feature_dim, dd.num_classes),
    }
}

/// Trains from a seeded initialization. With a non-empty `val` set the
/// parameters with the lowest validation loss are returned and training
/// stops after `opts.patience` epochs without improvement; otherwise the
/// final parameters are returned.
pub fn train(
    data: TrainData,
    val: Option<&Dataset>,
    cfg: &ModelConfig,
    opts: &TrainOptions,
) -> Result<(Parameters, History)> {
    train_observed(data, val, cfg, opts, |_, _| Ok(()))
}

pub(crate) fn train_observed(
    data: TrainData,
    val: Option<&Dataset>,
    cfg: &ModelConfig,
    opts: &TrainOptions,
    mut observe: impl FnMut(usize, &Parameters) -> Result<()>,
) -> Result<(Parameters, History)> {
    cfg.validate()?;
    if opts.batch_size == 0 {
        return Err(Error::Config("batch size must be positive".into()));
    }
    if !(opts.lr > 0.0 && opts.lr.is_finite()) {
        return Err(Error::Config(format!("learning rate {} must be positive", opts.lr)));
    }
    let (in_dim, num_classes) = dims(data);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = Parameters::init(cfg, in_dim, num_classes, &mut rng);

    enum Source<'a> {
        Graphs { plans: Vec<Plan>, labels: Vec<usize> },
        Trees { plans: Vec<Plan>, dd: &'a DistilledDataset, sampler: ItemsetSampler, per_epoch: usize },
    }
    let source = match data {
        TrainData::Full(ds) => {
            if ds.is_empty() {
                return Err(Error::Config("training set is empty".into()));
            }
            Source::Graphs {
                plans: graph_plans(ds, cfg, in_dim)?,
                labels: ds.labels(),
            }
        }
        TrainData::Distilled(dd) => {
            let plans = tree_plans(dd, cfg, in_dim)?;
            let sampler = ItemsetSampler::new(dd)?;
            let per_epoch = dd.class_graph_counts.iter().sum::<usize>().max(1);
            Source::Trees { plans, dd, sampler, per_epoch }
        }
    };
    let validation = match val {
        Some(v) if !v.is_empty() => {
            if v.feature_dim() != in_dim && v.graphs().iter().any(|g| g.feature_dim().is_some()) {
                return Err(Error::Shape(format!(
                    "validation features have dimension {}, training data {in_dim}",
                    v.feature_dim()
                )));
            }
            Some(Validation {
                plans: graph_plans(v, cfg, in_dim)?,
                labels: v.labels(),
            })
        }
        _ => None,
    };

    let mut adam = Adam::new(opts.lr, params.num_scalars());
    let mut history = History::default();
    let mut best = params.clone();
    let mut best_loss = f64::INFINITY;
    let mut stale = 0usize;
    observe(0, &params)?;

    for epoch in 1..=opts.epochs {
        let mut loss_sum = 0.0;
        let mut seen = 0usize;
        match &source {
            Source::Graphs { plans, labels } => {
                let mut order: Vec<usize> = (0..plans.len()).collect();
                order.shuffle(&mut rng);
                for batch in order.chunks(opts.batch_size) {
                    let parts: Vec<Vec<&Plan>> = batch.iter().map(|&i| vec![&plans[i]]).collect();
                    let ys: Vec<usize> = batch.iter().map(|&i| labels[i]).collect();
                    let w = vec![1.0 / batch.len() as f64; batch.len()];
                    let plan = Plan::concat(&parts);
                    let (loss, grads) = loss_and_grad(&plan, cfg, &params, &ys, &w, Some(&mut rng));
                    adam.step(&mut params, &grads);
                    loss_sum += loss * batch.len() as f64;
                    seen += batch.len();
                }
            }
            Source::Trees { plans, dd, sampler, per_epoch } => {
                let batches = per_epoch.div_ceil(opts.batch_size);
                for _ in 0..batches {
                    let draws: Vec<(usize, usize)> =
                        (0..opts.batch_size).map(|_| sampler.sample(&mut rng)).collect();
                    let parts: Vec<Vec<&Plan>> = draws
                        .iter()
                        .map(|&(c, i)| dd.per_class[c][i].trees.iter().map(|&t| &plans[t]).collect())
                        .collect();
                    let ys: Vec<usize> = draws.iter().map(|&(c, _)| c).collect();
                    let w = vec![1.0 / draws.len() as f64; draws.len()];
                    let plan = Plan::concat(&parts);
                    let (loss, grads) = loss_and_grad(&plan, cfg, &params, &ys, &w, Some(&mut rng));
                    adam.step(&mut params, &grads);
                    loss_sum += loss * draws.len() as f64;
                    seen += draws.len();
                }
            }
        }
        if !params.is_finite() {
            return Err(Error::Config(format!("training diverged at epoch {epoch}")));
        }
        observe(epoch, &params)?;
        let (val_loss, val_auc) = match &validation {
            Some(v) => {
                let (l, a) = v.evaluate(&params, cfg)?;
                (Some(l), a)
            }
            None => (None, None),
        };
        history.records.push(EpochRecord {
            epoch,
            train_loss: loss_sum / seen.max(1) as f64,
            val_loss,
            val_auc,
        });
        match val_loss {
            Some(l) if l < best_loss => {
                best_loss = l;
                best = params.clone();
                history.best_epoch = epoch;
                stale = 0;
            }
            Some(_) => {
                stale += 1;
                if stale > opts.patience {
                    break;
                }
            }
            None => {
                best = params.clone();
                history.best_epoch = epoch;
            }
        }
    }
    Ok((best, history))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRecord {
    pub epoch: usize,
    pub full_loss: f64,
    pub distilled_loss: f64,
    pub gap: f64,
}

/// Trains on `full` for `epochs` epochs (no early stopping) and, with the
/// weights frozen after every epoch including the initialization, compares
/// the mean loss over `full` with the frequency-weighted loss over `dd`.
pub fn loss_gap_experiment(
    full: &Dataset,
    dd: &DistilledDataset,
    cfg: &ModelConfig,
    opts: &TrainOptions,
) -> Result<Vec<GapRecord>> {
    let mut out = Vec::with_capacity(opts.epochs + 1);
    let run = TrainOptions {
        patience: usize::MAX,
        ..opts.clone()
    };
    train_observed(TrainData::Full(full), None, cfg, &run, |epoch, params| {
        let full_loss = dataset_loss(params, cfg, full)?;
        let distilled_loss = distilled_loss(params, cfg, dd)?;
        out.push(GapRecord {
            epoch,
            full_loss,
            distilled_loss,
            gap: (full_loss - distilled_loss).abs(),
        });
        Ok(())
    })?;
    Ok(out)
}

/// Training-set accuracy, used by tests and the CLI summary.
pub fn accuracy(params: &Parameters, cfg: &ModelConfig, ds: &Dataset) -> Result<f64> {
    let probs = predict_dataset(params, cfg, ds)?;
    let labels = ds.labels();
    if labels.is_empty() {
        return Ok(0.0);
    }
    let hits = probs
        .axis_iter(Axis(0))
        .zip(&labels)
        .filter(|(row, &y)| {
            let best = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i);
            best == Some(y)
        })
        .count();
    Ok(hits as f64 / labels.len() as f64)
}
