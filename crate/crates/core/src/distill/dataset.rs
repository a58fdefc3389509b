use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ctree::{canonical_label, parse_label, ComputationTree, LabelScheme, SCHEME_VERSION};
use crate::error::{Error, Result};
use crate::graph_io::FeatureDictionary;

#[derive(Debug, Clone, PartialEq)]
pub struct DistilledItemset {
    /// Ascending indices into [`DistilledDataset::trees`].
    pub trees: Vec<usize>,
    pub frequency: f64,
}

/// Per-class frequent tree sets plus the tree structures they reference.
#[derive(Debug, Clone, PartialEq)]
pub struct DistilledDataset {
    pub scheme_version: u32,
    pub label_scheme: LabelScheme,
    pub hops: usize,
    pub thetas: Vec<f64>,
    pub num_classes: usize,
    pub feature_dim: usize,
    pub feature_dict: FeatureDictionary,
    pub trees: Vec<ComputationTree>,
    pub per_class: Vec<Vec<DistilledItemset>>,
    /// Train graphs per class that the itemsets were mined from.
    pub class_graph_counts: Vec<usize>,
    /// SHA-256 of the canonical JSONL of the consumed graphs.
    pub source_fingerprint: String,
}

#[derive(Serialize, Deserialize)]
struct ItemsetRecord {
    frequency: f64,
    items: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Provenance {
    source_fingerprint: String,
}

#[derive(Serialize, Deserialize)]
struct Record {
    class_graph_counts: Vec<usize>,
    feature_dict: Vec<Vec<f64>>,
    feature_dim: usize,
    hops: usize,
    label_scheme: LabelScheme,
    num_classes: usize,
    per_class: Vec<Vec<ItemsetRecord>>,
    provenance: Provenance,
    scheme_version: u32,
    thetas: Vec<f64>,
    /// Each tree as its full canonical label, which encodes the structure.
    trees: Vec<String>,
}

impl DistilledDataset {
    pub fn num_itemsets(&self) -> usize {
        self.per_class.iter().map(Vec::len).sum()
    }

    /// Input feature rows of every node of `tree`.
    pub fn tree_features<'a>(&'a self, tree: &'a ComputationTree) -> impl Iterator<Item = &'a [f64]> + 'a {
        tree.nodes().iter().map(|n| self.feature_dict.entry(n.feature))
    }

    /// Canonical JSON: sorted keys, no whitespace, shortest round-trip floats.
    pub fn to_json_string(&self) -> String {
        let record = Record {
            class_graph_counts: self.class_graph_counts.clone(),
            feature_dict: self.feature_dict.entries().to_vec(),
            feature_dim: self.feature_dim,
            hops: self.hops,
            label_scheme: self.label_scheme,
            num_classes: self.num_classes,
            per_class: self
                .per_class
                .iter()
                .map(|sets| {
                    sets.iter()
                        .map(|s| ItemsetRecord {
                            frequency: s.frequency,
                            items: s.trees.clone(),
                        })
                        .collect()
                })
                .collect(),
            provenance: Provenance {
                source_fingerprint: self.source_fingerprint.clone(),
            },
            scheme_version: self.scheme_version,
            thetas: self.thetas.clone(),
            trees: self
                .trees
                .iter()
                .map(|t| canonical_label(t, LabelScheme::FeatureDegree))
                .collect(),
        };
        // round-trip through Value so object keys come out sorted
        let value = serde_json::to_value(record).expect("distilled record serializes");
        serde_json::to_string(&value).expect("JSON value serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("scheme_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Schema("missing scheme_version".into()))?;
        if found != SCHEME_VERSION as u64 {
            return Err(Error::Version {
                found: found as u32,
                expected: SCHEME_VERSION,
            });
        }
        let r: Record = serde_json::from_value(value)
            .map_err(|e| Error::Schema(format!("distilled dataset: {e}")))?;

        let trees = r
            .trees
            .iter()
            .map(|l| parse_label(l, r.hops))
            .collect::<Result<Vec<_>>>()?;
        let dd = DistilledDataset {
            scheme_version: r.scheme_version,
            label_scheme: r.label_scheme,
            hops: r.hops,
            thetas: r.thetas,
            num_classes: r.num_classes,
            feature_dim: r.feature_dim,
            feature_dict: FeatureDictionary::from_entries(r.feature_dict),
            trees,
            per_class: r
                .per_class
                .into_iter()
                .map(|sets| {
                    sets.into_iter()
                        .map(|s| DistilledItemset {
                            trees: s.items,
                            frequency: s.frequency,
                        })
                        .collect()
                })
                .collect(),
            class_graph_counts: r.class_graph_counts,
            source_fingerprint: r.provenance.source_fingerprint,
        };
        dd.validate()?;
        Ok(dd)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Schema(msg));
        if self.thetas.len() != self.num_classes
            || self.per_class.len() != self.num_classes
            || self.class_graph_counts.len() != self.num_classes
        {
            return bad(format!(
                "expected per-class data for {} classes",
                self.num_classes
            ));
        }
        if self.feature_dict.entries().iter().any(|e| e.len() != self.feature_dim) {
            return bad("feature dictionary entry with wrong dimension".into());
        }
        for t in &self.trees {
            if t.height() > self.hops {
                return bad(format!("tree deeper than {} hops", self.hops));
            }
            if t.nodes().iter().any(|n| n.feature as usize >= self.feature_dict.len()) {
                return bad("tree references an unknown feature id".into());
            }
        }
        for (c, sets) in self.per_class.iter().enumerate() {
            for s in sets {
                if s.trees.is_empty() || s.trees.windows(2).any(|w| w[0] >= w[1]) {
                    return bad(format!("class {c}: itemset items must be ascending and distinct"));
                }
                if s.trees.iter().any(|&t| t >= self.trees.len()) {
                    return bad(format!("class {c}: itemset references a missing tree"));
                }
                if !(s.frequency >= self.thetas[c] && s.frequency <= 1.0) {
                    return bad(format!(
                        "class {c}: itemset frequency {} below threshold {}",
                        s.frequency, self.thetas[c]
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Writes canonical JSON and returns the exact file length in bytes.
pub fn serialize(dd: &DistilledDataset, path: impl AsRef<Path>) -> Result<usize> {
    let text = dd.to_json_string();
    fs::write(path, &text)?;
    Ok(text.len())
}

pub fn deserialize(path: impl AsRef<Path>) -> Result<DistilledDataset> {
    DistilledDataset::from_json_str(&fs::read_to_string(path)?)
}
