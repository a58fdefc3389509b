#![allow(dead_code)]

use ctdistill::ctree::{ComputationTree, TreeNode};
use ctdistill::graph_io::{Dataset, Graph};
use ctdistill::mining::TransactionDB;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random rooted tree with small feature/degree alphabets so that distinct
/// but isomorphic shapes are common.
pub fn random_tree(rng: &mut impl Rng, max_nodes: usize) -> ComputationTree {
    let n = rng.gen_range(1..=max_nodes);
    let mut nodes: Vec<TreeNode> = (0..n)
        .map(|_| TreeNode {
            feature: rng.gen_range(0..2),
            degree: rng.gen_range(1..3),
            children: Vec::new(),
        })
        .collect();
    for v in 1..n {
        // bias towards shallow, bushy trees
        let p = rng.gen_range(0..v.min(1 + v / 2 + 1));
        nodes[p].children.push(v as u32);
    }
    let depth = height(&nodes);
    ComputationTree::from_parts(nodes, depth).unwrap()
}

fn height(nodes: &[TreeNode]) -> usize {
    fn h(nodes: &[TreeNode], v: usize) -> usize {
        nodes[v].children.iter().map(|&c| 1 + h(nodes, c as usize)).max().unwrap_or(0)
    }
    h(nodes, 0)
}

/// Same tree with node ids relabeled (root kept at 0) and child lists
/// shuffled.
pub fn permuted_tree(rng: &mut impl Rng, t: &ComputationTree) -> ComputationTree {
    let n = t.len();
    let mut perm: Vec<usize> = (1..n).collect();
    perm.shuffle(rng);
    perm.insert(0, 0);
    let mut nodes = vec![
        TreeNode {
            feature: 0,
            degree: 0,
            children: Vec::new()
        };
        n
    ];
    for (v, node) in t.nodes().iter().enumerate() {
        let mut children: Vec<u32> = node.children.iter().map(|&c| perm[c as usize] as u32).collect();
        children.shuffle(rng);
        nodes[perm[v]] = TreeNode {
            feature: node.feature,
            degree: node.degree,
            children,
        };
    }
    ComputationTree::from_parts(nodes, t.depth()).unwrap()
}

/// One edit: flip a feature, bump a degree, or re-hang a leaf.
pub fn mutated_tree(rng: &mut impl Rng, t: &ComputationTree) -> ComputationTree {
    let mut nodes = t.nodes().to_vec();
    let n = nodes.len();
    let v = rng.gen_range(0..n);
    match rng.gen_range(0..3) {
        0 => nodes[v].feature ^= 1,
        1 => nodes[v].degree = if nodes[v].degree == 1 { 2 } else { 1 },
        _ => {
            let leaves: Vec<usize> = (1..n).filter(|&u| nodes[u].children.is_empty()).collect();
            if let Some(&leaf) = leaves.choose(rng) {
                for node in nodes.iter_mut() {
                    node.children.retain(|&c| c as usize != leaf);
                }
                let targets: Vec<usize> = (0..n).filter(|&u| u != leaf).collect();
                let p = *targets.choose(rng).unwrap();
                nodes[p].children.push(leaf as u32);
            } else {
                nodes[v].feature ^= 1;
            }
        }
    }
    let depth = height(&nodes).max(t.depth());
    ComputationTree::from_parts(nodes, depth).unwrap()
}

pub fn random_graph(rng: &mut impl Rng, id: i64, label: usize, max_nodes: usize) -> Graph {
    let n = rng.gen_range(1..=max_nodes);
    let p = rng.gen_range(0.1..0.6);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let palette = [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]];
    let features = (0..n).map(|_| palette[rng.gen_range(0..2)].to_vec()).collect();
    Graph::new(id, label, features, edges).unwrap()
}

pub fn random_dataset(rng: &mut impl Rng, graphs: usize, max_nodes: usize) -> Dataset {
    let gs = (0..graphs)
        .map(|i| random_graph(rng, i as i64, i % 2, max_nodes))
        .collect();
    Dataset::new(gs, Some(2)).unwrap()
}

pub fn random_db(rng: &mut impl Rng) -> TransactionDB {
    let items = rng.gen_range(1..=12);
    let m = rng.gen_range(1..=40);
    let density = rng.gen_range(0.1..0.8);
    let txs = (0..m)
        .map(|_| (0..items as u32).filter(|_| rng.gen_bool(density)).collect())
        .collect();
    TransactionDB::new(items, txs).unwrap()
}
