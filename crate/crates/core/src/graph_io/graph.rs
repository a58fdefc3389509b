use crate::error::{Error, Result};

/// An undirected, simple, node-attributed graph with a class label.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    id: i64,
    label: usize,
    features: Vec<Vec<f64>>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Validates and builds a graph. Self-loops, duplicate undirected edges,
    /// out-of-range endpoints, ragged or non-finite features are rejected.
    pub fn new(
        id: i64,
        label: usize,
        features: Vec<Vec<f64>>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let n = features.len();
        if let Some(first) = features.first() {
            let dim = first.len();
            if let Some(v) = features.iter().position(|f| f.len() != dim) {
                return Err(Error::Schema(format!(
                    "graph {id}: node {v} has {} features, expected {dim}",
                    features[v].len()
                )));
            }
        }
        if features.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Schema(format!("graph {id}: non-finite feature value")));
        }

        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::Schema(format!(
                    "graph {id}: edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(Error::Schema(format!("graph {id}: self-loop at node {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if nbrs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Schema(format!(
                    "graph {id}: duplicate edge at node {v}"
                )));
            }
        }

        Ok(Graph {
            id,
            label,
            features,
            edges,
            adjacency,
        })
    }

    pub fn id(&self) -> i64 {
        self.id
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn num_nodes(&self) -> usize {
        self.features.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Feature dimensionality, or `None` for a graph without nodes.
    pub fn feature_dim(&self) -> Option<usize> {
        self.features.first().map(Vec::len)
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Same graph with node `v` renamed to `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.num_nodes();
        if perm.len() != n {
            return Err(Error::Argument(format!(
                "permutation has length {}, graph has {n} nodes",
                perm.len()
            )));
        }
        let mut features = vec![Vec::new(); n];
        for (v, f) in self.features.iter().enumerate() {
            features[perm[v]] = f.clone();
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Graph::new(self.id, self.label, features, edges)
    }

    pub(crate) fn with_features(&self, features: Vec<Vec<f64>>) -> Result<Graph> {
        Graph::new(self.id, self.label, features, self.edges.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitPart {
    Train,
    Val,
    Test,
}

/// A labeled collection of graphs with uniform feature dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    graphs: Vec<Graph>,
    num_classes: usize,
    feature_dim: usize,
    split: Option<Vec<SplitPart>>,
}

impl Dataset {
    /// `num_classes` defaults to one more than the largest label.
    pub fn new(graphs: Vec<Graph>, num_classes: Option<usize>) -> Result<Self> {
        let feature_dim = graphs.iter().find_map(Graph::feature_dim).unwrap_or(0);
        for g in &graphs {
            if let Some(d) = g.feature_dim() {
                if d != feature_dim {
                    return Err(Error::Schema(format!(
                        "graph {} has feature dimension {d}, dataset uses {feature_dim}",
                        g.id()
                    )));
                }
            }
        }
        let observed = graphs.iter().map(|g| g.label() + 1).max().unwrap_or(0);
        let num_classes = match num_classes {
            Some(k) if k < observed => {
                return Err(Error::Schema(format!(
                    "label {} out of range for {k} classes",
                    observed - 1
                )))
            }
            Some(k) => k,
            None => observed,
        };
        Ok(Dataset {
            graphs,
            num_classes,
            feature_dim,
            split: None,
        })
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn split(&self) -> Option<&[SplitPart]> {
        self.split.as_deref()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.graphs.iter().map(Graph::label).collect()
    }

    /// Graph counts per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for g in &self.graphs {
            counts[g.label()] += 1;
        }
        counts
    }

    pub(crate) fn with_split(mut self, split: Vec<SplitPart>) -> Result<Self> {
        if split.len() != self.graphs.len() {
            return Err(Error::Argument(format!(
                "split covers {} graphs, dataset has {}",
                split.len(),
                self.graphs.len()
            )));
        }
        self.split = Some(split);
        Ok(self)
    }

    /// The graphs assigned to `part`, as an unsplit dataset with the same
    /// class count. Without a split, `Train` returns everything and the
    /// other parts are empty.
    pub fn part(&self, part: SplitPart) -> Dataset {
        let graphs = match &self.split {
            Some(split) => self
                .graphs
                .iter()
                .zip(split)
                .filter(|(_, p)| **p == part)
                .map(|(g, _)| g.clone())
                .collect(),
            None if part == SplitPart::Train => self.graphs.clone(),
            None => Vec::new(),
        };
        Dataset {
            graphs,
            num_classes: self.num_classes,
            feature_dim: self.feature_dim,
            split: None,
        }
    }

    /// The train part when a split is present, otherwise the whole dataset.
    pub fn training_graphs(&self) -> Dataset {
        self.part(SplitPart::Train)
    }

    pub(crate) fn map_graphs(
        &self,
        feature_dim: usize,
        f: impl Fn(&Graph) -> Result<Graph>,
    ) -> Result<Dataset> {
        let graphs = self.graphs.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            graphs,
            num_classes: self.num_classes,
            feature_dim,
            split: self.split.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feats(n: usize) -> Vec<Vec<f64>> {
        vec![vec![1.0]; n]
    }

    #[test]
    fn adjacency_is_sorted_and_symmetric() {
        let g = Graph::new(0, 0, feats(4), vec![(2, 0), (0, 1), (3, 2), (1, 2)]).unwrap();
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.neighbors(2), &[0, 1, 3]);
        let total: usize = (0..4).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.num_edges());
    }

    #[test]
    fn rejects_self_loops_and_multi_edges() {
        assert!(matches!(
            Graph::new(0, 0, feats(2), vec![(1, 1)]),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            Graph::new(0, 0, feats(2), vec![(0, 1), (1, 0)]),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            Graph::new(0, 0, feats(2), vec![(0, 2)]),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn rejects_ragged_features() {
        let err = Graph::new(0, 0, vec![vec![1.0], vec![1.0, 2.0]], vec![]).unwrap_err();
        assert_eq!(err.kind(), "SchemaError");
    }

    #[test]
    fn dataset_checks_label_range() {
        let g = Graph::new(0, 3, feats(1), vec![]).unwrap();
        assert!(Dataset::new(vec![g.clone()], Some(2)).is_err());
        assert_eq!(Dataset::new(vec![g], None).unwrap().num_classes(), 4);
    }

    #[test]
    fn featureless_graphs_have_zero_dim() {
        let g = Graph::new(0, 0, vec![vec![]; 3], vec![(0, 1)]).unwrap();
        let ds = Dataset::new(vec![g], None).unwrap();
        assert_eq!(ds.feature_dim(), 0);
        assert_eq!(ds.graphs()[0].num_nodes(), 3);
    }
}
