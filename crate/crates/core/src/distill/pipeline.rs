use sha2::{Digest, Sha256};

use super::dataset::{DistilledDataset, DistilledItemset};
use crate::ctree::{decompose_dataset, LabelScheme, SCHEME_VERSION};
use crate::error::{Error, Result};
use crate::graph_io::{to_jsonl, Dataset};
use crate::mining::{build_transactions, fpgrowth, DEFAULT_MAX_ITEMSETS};

/// Everything distillation depends on besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct DistillConfig {
    pub hops: usize,
    /// One threshold per class.
    pub thetas: Vec<f64>,
    pub max_itemsets: usize,
    pub scheme: LabelScheme,
}

impl DistillConfig {
    pub fn new(hops: usize, thetas: Vec<f64>) -> Self {
        DistillConfig {
            hops,
            thetas,
            max_itemsets: DEFAULT_MAX_ITEMSETS,
            scheme: LabelScheme::FeatureDegree,
        }
    }
}

/// SHA-256 over the canonical JSONL encoding of `ds`.
pub fn fingerprint(ds: &Dataset) -> String {
    hex::encode(Sha256::digest(to_jsonl(ds).as_bytes()))
}

/// Decomposes the training graphs, mines each class separately and keeps
/// one representative tree per label referenced by any mined itemset.
pub fn distill(ds: &Dataset, cfg: &DistillConfig) -> Result<DistilledDataset> {
    if cfg.thetas.len() != ds.num_classes() {
        return Err(Error::Argument(format!(
            "{} thresholds given for {} classes",
            cfg.thetas.len(),
            ds.num_classes()
        )));
    }
    let train = ds.training_graphs();
    let td = decompose_dataset(&train, cfg.hops, cfg.scheme)?;

    let mut mined = Vec::with_capacity(ds.num_classes());
    for (class, &theta) in cfg.thetas.iter().enumerate() {
        let ct = build_transactions(&td, &train, class)?;
        let sets = fpgrowth(&ct.db, theta, cfg.max_itemsets).map_err(|e| e.with_class(class))?;
        let sets: Vec<(Vec<usize>, f64)> = sets
            .into_iter()
            .map(|s| {
                let trees = s.items.iter().map(|&i| ct.item_to_tree[i as usize]).collect();
                (trees, s.frequency)
            })
            .collect();
        mined.push(sets);
    }

    let mut kept: Vec<usize> = mined.iter().flatten().flat_map(|(t, _)| t.iter().copied()).collect();
    kept.sort_unstable();
    kept.dedup();
    let mut remap = vec![usize::MAX; td.trees().len()];
    for (new, &old) in kept.iter().enumerate() {
        remap[old] = new;
    }

    Ok(DistilledDataset {
        scheme_version: SCHEME_VERSION,
        label_scheme: cfg.scheme,
        hops: cfg.hops,
        thetas: cfg.thetas.clone(),
        num_classes: ds.num_classes(),
        feature_dim: ds.feature_dim(),
        feature_dict: td.features().clone(),
        trees: kept.iter().map(|&t| td.trees()[t].clone()).collect(),
        per_class: mined
            .into_iter()
            .map(|sets| {
                sets.into_iter()
                    .map(|(trees, frequency)| DistilledItemset {
                        trees: trees.into_iter().map(|t| remap[t]).collect(),
                        frequency,
                    })
                    .collect()
            })
            .collect(),
        class_graph_counts: train.class_counts(),
        source_fingerprint: fingerprint(&train),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionReport {
    pub distilled_bytes: usize,
    pub full_bytes: usize,
    /// `full_bytes / distilled_bytes`.
    pub ratio: f64,
}

/// Compares the distilled file size to the JSONL size of the training graphs.
pub fn compression_report(dd: &DistilledDataset, ds: &Dataset) -> CompressionReport {
    let distilled_bytes = dd.to_json_string().len();
    let full_bytes = to_jsonl(&ds.training_graphs()).len();
    CompressionReport {
        distilled_bytes,
        full_bytes,
        ratio: full_bytes as f64 / distilled_bytes as f64,
    }
}
