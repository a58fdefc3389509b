//! Computation-tree decomposition and canonical labeling.

mod dictionary;
mod label;
mod oracle;
mod tree;

pub use dictionary::{decompose_dataset, frequency_histogram, HistogramBucket, TreeDictionary};
pub use label::{canonical_cmp, canonical_label, parse_label, subtree_labels, LabelScheme, SCHEME_VERSION};
pub use oracle::{tree_isomorphic_oracle, MAX_ORACLE_NODES};
pub use tree::{build_computation_tree, unfolding_labels, ComputationTree, TreeNode};
