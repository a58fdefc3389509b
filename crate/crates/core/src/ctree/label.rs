//! Knuth-tuple canonical labels for annotated rooted trees.
//!
//! A node's label is `(f:d,c1,c2,...)` where `f` is the feature id, `d` the
//! node's degree in its source graph and `c1, c2, ...` the children's labels
//! in canonical order (shorter first, then lexicographic). The feature-only
//! scheme drops `:d`.

use std::cmp::Ordering;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::tree::{ComputationTree, TreeNode};
use crate::error::{Error, Result};

/// Version of the label grammar; stored next to every persisted label.
pub const SCHEME_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelScheme {
    /// Nodes are annotated with feature id and source-graph degree.
    #[default]
    FeatureDegree,
    /// Nodes are annotated with the feature id only.
    FeatureOnly,
}

/// Total order on labels: by length, then bytewise.
pub fn canonical_cmp(a: &str, b: &str) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub(crate) fn compose<S: AsRef<str>>(
    scheme: LabelScheme,
    feature: u32,
    degree: u32,
    children: &mut [S],
) -> String {
    children.sort_by(|a, b| canonical_cmp(a.as_ref(), b.as_ref()));
    let mut out = String::with_capacity(
        8 + children.iter().map(|c| c.as_ref().len() + 1).sum::<usize>(),
    );
    out.push('(');
    write!(out, "{feature}").unwrap();
    if scheme == LabelScheme::FeatureDegree {
        write!(out, ":{degree}").unwrap();
    }
    for c in children.iter() {
        out.push(',');
        out.push_str(c.as_ref());
    }
    out.push(')');
    out
}

/// Labels of every node's subtree, indexed like `t.nodes()`.
pub fn subtree_labels(t: &ComputationTree, scheme: LabelScheme) -> Vec<String> {
    let nodes = t.nodes();
    let mut labels: Vec<Option<String>> = vec![None; nodes.len()];
    // Explicit post-order so deep trees cannot overflow the stack.
    let mut stack = vec![(0usize, false)];
    while let Some((v, expanded)) = stack.pop() {
        if expanded {
            let mut kids: Vec<&str> = nodes[v]
                .children
                .iter()
                .map(|&c| labels[c as usize].as_deref().expect("child labeled first"))
                .collect();
            labels[v] = Some(compose(scheme, nodes[v].feature, nodes[v].degree, &mut kids));
        } else {
            stack.push((v, true));
            stack.extend(nodes[v].children.iter().map(|&c| (c as usize, false)));
        }
    }
    labels.into_iter().map(|l| l.expect("all nodes reachable")).collect()
}

pub fn canonical_label(t: &ComputationTree, scheme: LabelScheme) -> String {
    subtree_labels(t, scheme).swap_remove(0)
}

/// Rebuilds a tree from a full (`FeatureDegree`) label. The result is laid
/// out breadth-first with children in canonical order.
pub fn parse_label(label: &str, depth: usize) -> Result<ComputationTree> {
    let bytes = label.as_bytes();
    let mut pos = 0;
    // Parse into nested form first, then lay out breadth-first.
    struct Raw {
        feature: u32,
        degree: u32,
        children: Vec<Raw>,
    }
    fn bad(pos: usize, what: &str) -> Error {
        Error::Schema(format!("malformed tree label at byte {pos}: {what}"))
    }
    fn number(bytes: &[u8], pos: &mut usize) -> Result<u32> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        std::str::from_utf8(&bytes[start..*pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(start, "expected a number"))
    }
    fn expect(bytes: &[u8], pos: &mut usize, c: u8) -> Result<()> {
        if bytes.get(*pos) == Some(&c) {
            *pos += 1;
            Ok(())
        } else {
            Err(bad(*pos, &format!("expected `{}`", c as char)))
        }
    }
    fn node(bytes: &[u8], pos: &mut usize, level: usize) -> Result<Raw> {
        if level > 64 {
            return Err(bad(*pos, "nesting too deep"));
        }
        expect(bytes, pos, b'(')?;
        let feature = number(bytes, pos)?;
        expect(bytes, pos, b':')?;
        let degree = number(bytes, pos)?;
        let mut children = Vec::new();
        while bytes.get(*pos) == Some(&b',') {
            *pos += 1;
            children.push(node(bytes, pos, level + 1)?);
        }
        expect(bytes, pos, b')')?;
        Ok(Raw {
            feature,
            degree,
            children,
        })
    }

    let root = node(bytes, &mut pos, 0)?;
    if pos != bytes.len() {
        return Err(bad(pos, "trailing characters"));
    }

    let mut nodes = Vec::new();
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(raw) = queue.pop_front() {
        let first = nodes.len() + 1 + queue.len();
        let children = (0..raw.children.len() as u32).map(|i| first as u32 + i).collect();
        nodes.push(TreeNode {
            feature: raw.feature,
            degree: raw.degree,
            children,
        });
        queue.extend(raw.children);
    }
    let tree = ComputationTree::from_parts(nodes, depth)?;
    if canonical_label(&tree, LabelScheme::FeatureDegree) != label {
        return Err(Error::Schema(format!("tree label is not canonical: {label}")));
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(feature: u32, degree: u32) -> TreeNode {
        TreeNode {
            feature,
            degree,
            children: vec![],
        }
    }

    #[test]
    fn single_leaf() {
        let t = ComputationTree::from_parts(vec![leaf(0, 0)], 0).unwrap();
        assert_eq!(canonical_label(&t, LabelScheme::FeatureDegree), "(0:0)");
        assert_eq!(canonical_label(&t, LabelScheme::FeatureOnly), "(0)");
    }

    #[test]
    fn knuth_tuple_shape() {
        // root -> {b, c}; b -> {d, e}
        let nodes = vec![
            TreeNode { feature: 0, degree: 0, children: vec![1, 2] },
            TreeNode { feature: 0, degree: 0, children: vec![3, 4] },
            leaf(0, 0),
            leaf(0, 0),
            leaf(0, 0),
        ];
        let t = ComputationTree::from_parts(nodes, 2).unwrap();
        assert_eq!(
            canonical_label(&t, LabelScheme::FeatureDegree),
            "(0:0,(0:0),(0:0,(0:0),(0:0)))"
        );
        // mirrored layout, same label
        let nodes = vec![
            TreeNode { feature: 0, degree: 0, children: vec![1, 2] },
            leaf(0, 0),
            TreeNode { feature: 0, degree: 0, children: vec![3, 4] },
            leaf(0, 0),
            leaf(0, 0),
        ];
        let t2 = ComputationTree::from_parts(nodes, 2).unwrap();
        assert_eq!(canonical_label(&t2, LabelScheme::FeatureOnly), "(0,(0),(0,(0),(0)))");
        assert_eq!(
            canonical_label(&t, LabelScheme::FeatureDegree),
            canonical_label(&t2, LabelScheme::FeatureDegree)
        );
    }

    #[test]
    fn length_orders_before_lexicographic() {
        assert_eq!(canonical_cmp("(9:9)", "(10:0)"), Ordering::Less);
        assert_eq!(canonical_cmp("(1:0)", "(0:1)"), Ordering::Greater);
    }

    #[test]
    fn parse_round_trip() {
        let label = "(0:2,(1:1),(2:3,(0:2),(1:1)))";
        let t = parse_label(label, 2).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(canonical_label(&t, LabelScheme::FeatureDegree), label);
        assert!(parse_label("(0:2,(1:1)", 2).is_err());
        assert!(parse_label("(0:2,(2:3),(1:1))", 2).is_err(), "non-canonical order");
    }
}
