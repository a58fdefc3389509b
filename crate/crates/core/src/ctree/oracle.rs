use std::collections::HashMap;

use super::label::LabelScheme;
use super::tree::ComputationTree;
use crate::error::{Error, Result};

/// Largest tree the exhaustive oracle accepts.
pub const MAX_ORACLE_NODES: usize = 64;

/// Decides rooted, annotation-preserving isomorphism by backtracking over
/// child assignments. Shares no code with canonical labeling.
pub fn tree_isomorphic_oracle(
    a: &ComputationTree,
    b: &ComputationTree,
    scheme: LabelScheme,
) -> Result<bool> {
    for t in [a, b] {
        if t.len() > MAX_ORACLE_NODES {
            return Err(Error::Size(format!(
                "tree with {} nodes exceeds the oracle cap of {MAX_ORACLE_NODES}",
                t.len()
            )));
        }
    }
    if a.len() != b.len() {
        return Ok(false);
    }
    let mut search = Search {
        a,
        b,
        scheme,
        size_a: subtree_sizes(a),
        size_b: subtree_sizes(b),
        memo: HashMap::new(),
    };
    Ok(search.iso(0, 0))
}

fn subtree_sizes(t: &ComputationTree) -> Vec<usize> {
    fn go(t: &ComputationTree, v: usize, out: &mut [usize]) -> usize {
        let s = 1 + t.nodes()[v]
            .children
            .iter()
            .map(|&c| go(t, c as usize, out))
            .sum::<usize>();
        out[v] = s;
        s
    }
    let mut out = vec![0; t.len()];
    go(t, 0, &mut out);
    out
}

struct Search<'a> {
    a: &'a ComputationTree,
    b: &'a ComputationTree,
    scheme: LabelScheme,
    size_a: Vec<usize>,
    size_b: Vec<usize>,
    memo: HashMap<(usize, usize), bool>,
}

impl Search<'_> {
    fn iso(&mut self, x: usize, y: usize) -> bool {
        if let Some(&r) = self.memo.get(&(x, y)) {
            return r;
        }
        let r = self.iso_uncached(x, y);
        self.memo.insert((x, y), r);
        r
    }

    fn iso_uncached(&mut self, x: usize, y: usize) -> bool {
        let (nx, ny) = (&self.a.nodes()[x], &self.b.nodes()[y]);
        if nx.feature != ny.feature
            || (self.scheme == LabelScheme::FeatureDegree && nx.degree != ny.degree)
            || nx.children.len() != ny.children.len()
            || self.size_a[x] != self.size_b[y]
        {
            return false;
        }
        let xs: Vec<usize> = nx.children.iter().map(|&c| c as usize).collect();
        let ys: Vec<usize> = ny.children.iter().map(|&c| c as usize).collect();
        let mut used = vec![false; ys.len()];
        self.assign(&xs, &ys, 0, &mut used)
    }

    fn assign(&mut self, xs: &[usize], ys: &[usize], i: usize, used: &mut [bool]) -> bool {
        if i == xs.len() {
            return true;
        }
        for j in 0..ys.len() {
            if !used[j] && self.iso(xs[i], ys[j]) {
                used[j] = true;
                if self.assign(xs, ys, i + 1, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctree::TreeNode;

    fn star(features: &[u32]) -> ComputationTree {
        let mut nodes = vec![TreeNode {
            feature: 0,
            degree: features.len() as u32,
            children: (1..=features.len() as u32).collect(),
        }];
        nodes.extend(features.iter().map(|&f| TreeNode {
            feature: f,
            degree: 1,
            children: vec![],
        }));
        ComputationTree::from_parts(nodes, 1).unwrap()
    }

    #[test]
    fn identity() {
        let t = star(&[1, 2, 3]);
        assert!(tree_isomorphic_oracle(&t, &t, LabelScheme::FeatureDegree).unwrap());
    }

    #[test]
    fn annotation_mismatch() {
        let a = star(&[1, 2]);
        let b = star(&[1, 1]);
        assert!(!tree_isomorphic_oracle(&a, &b, LabelScheme::FeatureDegree).unwrap());
        assert!(tree_isomorphic_oracle(&star(&[2, 1]), &a, LabelScheme::FeatureOnly).unwrap());
    }

    #[test]
    fn size_cap() {
        let big = star(&vec![1; MAX_ORACLE_NODES]);
        let err = tree_isomorphic_oracle(&big, &big, LabelScheme::FeatureDegree).unwrap_err();
        assert_eq!(err.kind(), "SizeError");
    }
}
