use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::graph::{Dataset, Graph};
use crate::error::Result;

/// Interns node feature vectors by their exact bit patterns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureDictionary {
    entries: Vec<Vec<f64>>,
    index: HashMap<Vec<u8>, u32>,
}

fn key(x: &[f64]) -> Vec<u8> {
    x.iter().flat_map(|v| v.to_bits().to_le_bytes()).collect()
}

impl FeatureDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<Vec<f64>>) -> Self {
        let mut dict = Self::new();
        for e in entries {
            dict.intern(&e);
        }
        dict
    }

    /// Id of `x`, inserting it if unseen.
    pub fn intern(&mut self, x: &[f64]) -> u32 {
        let k = key(x);
        if let Some(&id) = self.index.get(&k) {
            return id;
        }
        let id = self.entries.len() as u32;
        self.entries.push(x.to_vec());
        self.index.insert(k, id);
        id
    }

    pub fn get(&self, x: &[f64]) -> Option<u32> {
        self.index.get(&key(x)).copied()
    }

    pub fn entry(&self, id: u32) -> &[f64] {
        &self.entries[id as usize]
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Feature id of every node of `g`.
    pub fn intern_graph(&mut self, g: &Graph) -> Vec<u32> {
        g.features().iter().map(|f| self.intern(f)).collect()
    }
}

/// How nodes of a featureless (F = 0) dataset are given GNN inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureEncoding {
    /// A single all-ones scalar per node.
    #[default]
    Constant,
    /// One-hot node degree, width = max degree in the dataset + 1.
    DegreeOnehot,
}

/// Fills in node features for featureless datasets; identity when F > 0.
pub fn encode_featureless(ds: &Dataset, encoding: FeatureEncoding) -> Result<Dataset> {
    if ds.feature_dim() > 0 {
        return Ok(ds.clone());
    }
    match encoding {
        FeatureEncoding::Constant => {
            ds.map_graphs(1, |g| g.with_features(vec![vec![1.0]; g.num_nodes()]))
        }
        FeatureEncoding::DegreeOnehot => {
            let width = ds
                .graphs()
                .iter()
                .flat_map(|g| (0..g.num_nodes()).map(move |v| g.degree(v)))
                .max()
                .unwrap_or(0)
                + 1;
            ds.map_graphs(width, |g| {
                let feats = (0..g.num_nodes())
                    .map(|v| {
                        let mut row = vec![0.0; width];
                        row[g.degree(v)] = 1.0;
                        row
                    })
                    .collect();
                g.with_features(feats)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_dense_and_bitwise() {
        let mut d = FeatureDictionary::new();
        assert_eq!(d.intern(&[1.0, 0.0]), 0);
        assert_eq!(d.intern(&[0.0, 1.0]), 1);
        assert_eq!(d.intern(&[1.0, 0.0]), 0);
        // -0.0 and 0.0 differ bitwise
        assert_eq!(d.intern(&[1.0, -0.0]), 2);
        assert_eq!(d.intern(&[]), 3);
        assert_eq!(d.len(), 4);
        assert_eq!(d.get(&[0.0, 1.0]), Some(1));
    }

    #[test]
    fn featureless_encodings() {
        let g = Graph::new(0, 0, vec![vec![]; 3], vec![(0, 1), (1, 2)]).unwrap();
        let ds = Dataset::new(vec![g], None).unwrap();
        let c = encode_featureless(&ds, FeatureEncoding::Constant).unwrap();
        assert_eq!(c.feature_dim(), 1);
        assert_eq!(c.graphs()[0].features(), &[vec![1.0], vec![1.0], vec![1.0]]);
        let d = encode_featureless(&ds, FeatureEncoding::DegreeOnehot).unwrap();
        assert_eq!(d.feature_dim(), 3);
        assert_eq!(d.graphs()[0].features()[1], vec![0.0, 0.0, 1.0]);
    }
}
