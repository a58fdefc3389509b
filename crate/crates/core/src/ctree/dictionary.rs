use std::collections::HashMap;

use serde::Serialize;

use super::label::LabelScheme;
use super::tree::{expand, unfolding_labels, ComputationTree};
use crate::error::{Error, Result};
use crate::graph_io::{Dataset, FeatureDictionary};

/// Every distinct computation tree of a dataset, plus per-graph multisets.
#[derive(Debug, Clone)]
pub struct TreeDictionary {
    hops: usize,
    scheme: LabelScheme,
    features: FeatureDictionary,
    trees: Vec<ComputationTree>,
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    node_trees: Vec<Vec<usize>>,
    per_graph: Vec<Vec<(usize, usize)>>,
}

impl TreeDictionary {
    pub fn hops(&self) -> usize {
        self.hops
    }

    pub fn scheme(&self) -> LabelScheme {
        self.scheme
    }

    pub fn features(&self) -> &FeatureDictionary {
        &self.features
    }

    pub fn trees(&self) -> &[ComputationTree] {
        &self.trees
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tree_id(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    pub fn num_graphs(&self) -> usize {
        self.per_graph.len()
    }

    /// Tree id of each node of graph `g`.
    pub fn node_trees(&self, g: usize) -> &[usize] {
        &self.node_trees[g]
    }

    /// `(tree id, multiplicity)` pairs of graph `g`, ascending by id.
    pub fn graph_multiset(&self, g: usize) -> &[(usize, usize)] {
        &self.per_graph[g]
    }

    /// Number of graphs containing each tree at least once.
    pub fn containment_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.trees.len()];
        for ms in &self.per_graph {
            for &(t, _) in ms {
                counts[t] += 1;
            }
        }
        counts
    }

    /// Total occurrences of each tree across all graphs.
    pub fn occurrence_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.trees.len()];
        for ms in &self.per_graph {
            for &(t, c) in ms {
                counts[t] += c;
            }
        }
        counts
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Entry<'a> {
            id: usize,
            label: &'a str,
            graphs: usize,
            occurrences: usize,
        }
        let graphs = self.containment_counts();
        let occ = self.occurrence_counts();
        let entries: Vec<Entry> = self
            .labels
            .iter()
            .enumerate()
            .map(|(id, label)| Entry {
                id,
                label,
                graphs: graphs[id],
                occurrences: occ[id],
            })
            .collect();
        serde_json::json!({
            "hops": self.hops,
            "label_scheme": self.scheme,
            "scheme_version": super::SCHEME_VERSION,
            "num_graphs": self.num_graphs(),
            "trees": entries,
        })
    }
}

/// Decomposes every graph into its node computation trees and deduplicates
/// them by canonical label. Tree ids follow first appearance.
pub fn decompose_dataset(ds: &Dataset, hops: usize, scheme: LabelScheme) -> Result<TreeDictionary> {
    if hops == 0 {
        return Err(Error::Argument("hop count must be at least 1".into()));
    }
    let mut dict = TreeDictionary {
        hops,
        scheme,
        features: FeatureDictionary::new(),
        trees: Vec::new(),
        labels: Vec::new(),
        label_index: HashMap::new(),
        node_trees: Vec::with_capacity(ds.len()),
        per_graph: Vec::with_capacity(ds.len()),
    };

    for g in ds.graphs() {
        let fids = dict.features.intern_graph(g);
        let full = unfolding_labels(g, &fids, hops, LabelScheme::FeatureDegree);
        let keyed = match scheme {
            LabelScheme::FeatureDegree => None,
            LabelScheme::FeatureOnly => Some(unfolding_labels(g, &fids, hops, scheme)),
        };
        let keys = keyed.as_ref().unwrap_or(&full);

        let mut ids = Vec::with_capacity(g.num_nodes());
        for v in 0..g.num_nodes() {
            let key = &keys[hops][v];
            let id = match dict.label_index.get(key) {
                Some(&id) => id,
                None => {
                    let id = dict.trees.len();
                    dict.trees.push(expand(g, &fids, &full, v, hops));
                    dict.labels.push(key.clone());
                    dict.label_index.insert(key.clone(), id);
                    id
                }
            };
            ids.push(id);
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        let mut multiset: Vec<(usize, usize)> = Vec::new();
        for t in sorted {
            match multiset.last_mut() {
                Some((last, c)) if *last == t => *c += 1,
                _ => multiset.push((t, 1)),
            }
        }
        dict.node_trees.push(ids);
        dict.per_graph.push(multiset);
    }
    Ok(dict)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBucket {
    pub normalized_frequency: f64,
    pub percent_of_trees: f64,
}

/// Share of distinct trees at each normalized frequency (fraction of graphs
/// containing the tree), most frequent first.
pub fn frequency_histogram(td: &TreeDictionary, num_graphs: usize) -> Result<Vec<HistogramBucket>> {
    if num_graphs == 0 {
        return Err(Error::Argument("histogram needs at least one graph".into()));
    }
    let counts = td.containment_counts();
    let mut by_count: std::collections::BTreeMap<usize, usize> = Default::default();
    for c in &counts {
        *by_count.entry(*c).or_default() += 1;
    }
    let total = counts.len() as f64;
    Ok(by_count
        .into_iter()
        .rev()
        .map(|(c, trees)| HistogramBucket {
            normalized_frequency: c as f64 / num_graphs as f64,
            percent_of_trees: 100.0 * trees as f64 / total,
        })
        .collect())
}
