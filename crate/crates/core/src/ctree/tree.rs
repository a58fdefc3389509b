use std::collections::VecDeque;

use super::label::{canonical_cmp, compose, subtree_labels, LabelScheme};
use crate::error::{Error, Result};
use crate::graph_io::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeNode {
    pub feature: u32,
    /// Degree of the originating node in its source graph.
    pub degree: u32,
    pub children: Vec<u32>,
}

/// A rooted tree of annotated nodes; node 0 is the root.
///
/// Trees produced by [`build_computation_tree`] are laid out breadth-first
/// with every child list in canonical order, so two isomorphic computation
/// trees are equal as values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComputationTree {
    nodes: Vec<TreeNode>,
    depth: usize,
}

impl ComputationTree {
    /// Checks that `nodes` form a single tree rooted at 0 of height at most
    /// `depth`.
    pub fn from_parts(nodes: Vec<TreeNode>, depth: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Argument("a tree needs at least one node".into()));
        }
        let mut parent_seen = vec![false; nodes.len()];
        parent_seen[0] = true;
        let mut level = vec![0usize; nodes.len()];
        let mut queue = VecDeque::from([0usize]);
        let mut visited = 0;
        while let Some(v) = queue.pop_front() {
            visited += 1;
            for &c in &nodes[v].children {
                let c = c as usize;
                if c >= nodes.len() || parent_seen[c] {
                    return Err(Error::Argument(format!(
                        "node {c} is out of range or has two parents"
                    )));
                }
                parent_seen[c] = true;
                level[c] = level[v] + 1;
                if level[c] > depth {
                    return Err(Error::Argument(format!(
                        "node {c} lies at depth {} > {depth}",
                        level[c]
                    )));
                }
                queue.push_back(c);
            }
        }
        if visited != nodes.len() {
            return Err(Error::Argument("tree has unreachable nodes".into()));
        }
        Ok(ComputationTree { nodes, depth })
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    /// Nominal depth (the hop count it was built with), not its height.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node_depths(&self) -> Vec<usize> {
        let mut level = vec![0; self.nodes.len()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &c in &self.nodes[v].children {
                level[c as usize] = level[v] + 1;
                queue.push_back(c as usize);
            }
        }
        level
    }

    pub fn height(&self) -> usize {
        self.node_depths().into_iter().max().unwrap_or(0)
    }

    /// True when every node above the depth bound has one child per
    /// source-graph neighbor.
    pub fn satisfies_degree_law(&self) -> bool {
        self.node_depths()
            .iter()
            .zip(&self.nodes)
            .all(|(&d, n)| d >= self.depth || n.children.len() == n.degree as usize)
    }

    /// Breadth-first re-layout with children in canonical order.
    pub fn canonicalized(&self) -> ComputationTree {
        let labels = subtree_labels(self, LabelScheme::FeatureDegree);
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let mut kids: Vec<usize> = self.nodes[v].children.iter().map(|&c| c as usize).collect();
            kids.sort_by(|&a, &b| canonical_cmp(&labels[a], &labels[b]));
            let first = nodes.len() + 1 + queue.len();
            nodes.push(TreeNode {
                feature: self.nodes[v].feature,
                degree: self.nodes[v].degree,
                children: (first..first + kids.len()).map(|i| i as u32).collect(),
            });
            queue.extend(kids);
        }
        ComputationTree {
            nodes,
            depth: self.depth,
        }
    }

    /// The top `depth` levels of the tree, re-canonicalized.
    pub fn truncated(&self, depth: usize) -> ComputationTree {
        let level = self.node_depths();
        let keep: Vec<usize> = (0..self.nodes.len()).filter(|&v| level[v] <= depth).collect();
        let mut new_id = vec![u32::MAX; self.nodes.len()];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i as u32;
        }
        let nodes = keep
            .iter()
            .map(|&v| TreeNode {
                feature: self.nodes[v].feature,
                degree: self.nodes[v].degree,
                children: if level[v] < depth {
                    self.nodes[v].children.iter().map(|&c| new_id[c as usize]).collect()
                } else {
                    Vec::new()
                },
            })
            .collect();
        ComputationTree { nodes, depth }.canonicalized()
    }
}

/// Labels of every node's `r`-hop unfolding, for `r = 0..=hops`.
///
/// `table[r][v]` is the canonical label of the computation tree of depth `r`
/// rooted at `v`, computed bottom-up without materializing any tree.
pub fn unfolding_labels(
    g: &Graph,
    feature_ids: &[u32],
    hops: usize,
    scheme: LabelScheme,
) -> Vec<Vec<String>> {
    let n = g.num_nodes();
    let mut table: Vec<Vec<String>> = Vec::with_capacity(hops + 1);
    table.push(
        (0..n)
            .map(|v| compose::<&str>(scheme, feature_ids[v], g.degree(v) as u32, &mut []))
            .collect(),
    );
    for r in 1..=hops {
        let prev = &table[r - 1];
        let row = (0..n)
            .map(|v| {
                let mut kids: Vec<&str> = g.neighbors(v).iter().map(|&u| prev[u].as_str()).collect();
                compose(scheme, feature_ids[v], g.degree(v) as u32, &mut kids)
            })
            .collect();
        table.push(row);
    }
    table
}

/// Expands node `v` into its `hops`-deep tree using a precomputed full-scheme
/// label table to order children.
pub(crate) fn expand(
    g: &Graph,
    feature_ids: &[u32],
    table: &[Vec<String>],
    v: usize,
    hops: usize,
) -> ComputationTree {
    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut queue = VecDeque::from([(v, hops)]);
    while let Some((u, remaining)) = queue.pop_front() {
        let first = nodes.len() + 1 + queue.len();
        let mut kids: Vec<usize> = if remaining > 0 {
            g.neighbors(u).to_vec()
        } else {
            Vec::new()
        };
        if remaining > 0 {
            let row = &table[remaining - 1];
            kids.sort_by(|&a, &b| canonical_cmp(&row[a], &row[b]));
        }
        nodes.push(TreeNode {
            feature: feature_ids[u],
            degree: g.degree(u) as u32,
            children: (first..first + kids.len()).map(|i| i as u32).collect(),
        });
        queue.extend(kids.into_iter().map(|k| (k, remaining - 1)));
    }
    ComputationTree { nodes, depth: hops }
}

/// The `hops`-deep computation tree of node `v`: every walk of length
/// `hops` from `v`, merged on shared prefixes.
pub fn build_computation_tree(
    g: &Graph,
    feature_ids: &[u32],
    v: usize,
    hops: usize,
) -> Result<ComputationTree> {
    if v >= g.num_nodes() {
        return Err(Error::Argument(format!(
            "node {v} out of range for graph {} with {} nodes",
            g.id(),
            g.num_nodes()
        )));
    }
    if feature_ids.len() != g.num_nodes() {
        return Err(Error::Argument(format!(
            "{} feature ids for {} nodes",
            feature_ids.len(),
            g.num_nodes()
        )));
    }
    let table = unfolding_labels(g, feature_ids, hops.saturating_sub(1), LabelScheme::FeatureDegree);
    Ok(expand(g, feature_ids, &table, v, hops))
}
