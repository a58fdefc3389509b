//! FP-growth: a prefix tree of frequency-ordered transactions, mined by
//! recursive conditional pattern bases.

use std::collections::HashMap;

use super::transactions::TransactionDB;
use super::FrequentItemset;
use crate::error::{Error, Result};

/// Default bound on the number of mined itemsets.
pub const DEFAULT_MAX_ITEMSETS: usize = 100_000;

/// Smallest support count `c` with `c / m >= theta`.
pub fn min_support_count(theta: f64, m: usize) -> usize {
    let mut c = (theta * m as f64).ceil().max(1.0) as usize;
    while c > 1 && (c - 1) as f64 / m as f64 >= theta {
        c -= 1;
    }
    while (c as f64 / m as f64) < theta {
        c += 1;
    }
    c
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 && theta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("threshold {theta} outside (0, 1]")))
    }
}

const ROOT: usize = usize::MAX;

struct Node {
    item: u32,
    count: usize,
    parent: usize,
    children: Vec<usize>,
}

struct HeaderEntry {
    item: u32,
    support: usize,
    nodes: Vec<usize>,
}

/// Header entries are ordered by descending support, ties by ascending item.
struct FpTree {
    nodes: Vec<Node>,
    roots: Vec<usize>,
    header: Vec<HeaderEntry>,
}

impl FpTree {
    fn build(patterns: &[(Vec<u32>, usize)], min_count: usize) -> FpTree {
        let mut support: HashMap<u32, usize> = HashMap::new();
        for (items, w) in patterns {
            for &i in items {
                *support.entry(i).or_default() += w;
            }
        }
        let mut frequent: Vec<(u32, usize)> =
            support.into_iter().filter(|&(_, s)| s >= min_count).collect();
        frequent.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let rank: HashMap<u32, usize> = frequent.iter().enumerate().map(|(r, &(i, _))| (i, r)).collect();

        let mut tree = FpTree {
            nodes: Vec::new(),
            roots: Vec::new(),
            header: frequent
                .iter()
                .map(|&(item, support)| HeaderEntry {
                    item,
                    support,
                    nodes: Vec::new(),
                })
                .collect(),
        };

        let mut path: Vec<(usize, u32)> = Vec::new();
        for (items, w) in patterns {
            path.clear();
            path.extend(items.iter().filter_map(|i| rank.get(i).map(|&r| (r, *i))));
            path.sort_unstable();
            tree.insert(&path, *w);
        }
        tree
    }

    fn insert(&mut self, path: &[(usize, u32)], weight: usize) {
        let mut parent = ROOT;
        for &(rank, item) in path {
            let siblings = if parent == ROOT {
                &self.roots
            } else {
                &self.nodes[parent].children
            };
            let existing = siblings.iter().copied().find(|&c| self.nodes[c].item == item);
            let node = match existing {
                Some(c) => c,
                None => {
                    let id = self.nodes.len();
                    self.nodes.push(Node {
                        item,
                        count: 0,
                        parent,
                        children: Vec::new(),
                    });
                    if parent == ROOT {
                        self.roots.push(id);
                    } else {
                        self.nodes[parent].children.push(id);
                    }
                    self.header[rank].nodes.push(id);
                    id
                }
            };
            self.nodes[node].count += weight;
            parent = node;
        }
    }

    fn prefix_path(&self, mut node: usize) -> Vec<u32> {
        let mut items = Vec::new();
        node = self.nodes[node].parent;
        while node != ROOT {
            items.push(self.nodes[node].item);
            node = self.nodes[node].parent;
        }
        items
    }
}

struct Miner<'a> {
    min_count: usize,
    cap: usize,
    out: &'a mut Vec<(Vec<u32>, usize)>,
}

impl Miner<'_> {
    fn mine(&mut self, tree: &FpTree, suffix: &mut Vec<u32>) -> Result<()> {
        for entry in tree.header.iter().rev() {
            suffix.push(entry.item);
            if self.out.len() == self.cap {
                return Err(Error::CapExceeded {
                    class: None,
                    limit: self.cap,
                });
            }
            let mut items = suffix.clone();
            items.sort_unstable();
            self.out.push((items, entry.support));

            let base: Vec<(Vec<u32>, usize)> = entry
                .nodes
                .iter()
                .map(|&n| (tree.prefix_path(n), tree.nodes[n].count))
                .filter(|(p, _)| !p.is_empty())
                .collect();
            if !base.is_empty() {
                let conditional = FpTree::build(&base, self.min_count);
                if !conditional.header.is_empty() {
                    self.mine(&conditional, suffix)?;
                }
            }
            suffix.pop();
        }
        Ok(())
    }
}

/// All non-empty itemsets contained in at least a `theta` fraction of the
/// transactions, with exact supports, sorted by descending support then
/// ascending items. Fails with `CapExceeded` instead of truncating.
pub fn fpgrowth(db: &TransactionDB, theta: f64, max_itemsets: usize) -> Result<Vec<FrequentItemset>> {
    check_theta(theta)?;
    if db.is_empty() {
        return Err(Error::Argument("transaction database is empty".into()));
    }
    if max_itemsets == 0 {
        return Err(Error::Argument("itemset cap must be at least 1".into()));
    }
    let m = db.len();
    let min_count = min_support_count(theta, m);
    let patterns: Vec<(Vec<u32>, usize)> = db.transactions().iter().map(|t| (t.clone(), 1)).collect();
    let tree = FpTree::build(&patterns, min_count);

    let mut found = Vec::new();
    Miner {
        min_count,
        cap: max_itemsets,
        out: &mut found,
    }
    .mine(&tree, &mut Vec::new())?;

    Ok(super::finish(found, m))
}
