use crate::ctree::TreeDictionary;
use crate::error::{Error, Result};
use crate::graph_io::Dataset;

/// One transaction (a strictly ascending item set) per graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionDB {
    num_items: usize,
    transactions: Vec<Vec<u32>>,
}

impl TransactionDB {
    pub fn new(num_items: usize, transactions: Vec<Vec<u32>>) -> Result<Self> {
        for (i, t) in transactions.iter().enumerate() {
            if t.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Argument(format!(
                    "transaction {i} is not strictly ascending"
                )));
            }
            if t.last().is_some_and(|&x| x as usize >= num_items) {
                return Err(Error::Argument(format!(
                    "transaction {i} references an item outside 0..{num_items}"
                )));
            }
        }
        Ok(TransactionDB {
            num_items,
            transactions,
        })
    }

    /// Sorts and deduplicates each transaction before validating.
    pub fn from_unsorted(num_items: usize, transactions: Vec<Vec<u32>>) -> Result<Self> {
        let transactions = transactions
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t.dedup();
                t
            })
            .collect();
        Self::new(num_items, transactions)
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn transactions(&self) -> &[Vec<u32>] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }
}

/// A class's transactions over densely renumbered items.
#[derive(Debug, Clone)]
pub struct ClassTransactions {
    pub db: TransactionDB,
    /// Global tree id of each local item.
    pub item_to_tree: Vec<usize>,
}

/// One transaction per graph of `class_id`: the set of distinct trees it
/// contains. `td` must come from decomposing `ds` itself.
pub fn build_transactions(
    td: &TreeDictionary,
    ds: &Dataset,
    class_id: usize,
) -> Result<ClassTransactions> {
    if class_id >= ds.num_classes() {
        return Err(Error::Argument(format!(
            "class {class_id} out of range for {} classes",
            ds.num_classes()
        )));
    }
    if td.num_graphs() != ds.len() {
        return Err(Error::Argument(format!(
            "tree dictionary covers {} graphs, dataset has {}",
            td.num_graphs(),
            ds.len()
        )));
    }
    let members: Vec<usize> = (0..ds.len())
        .filter(|&g| ds.graphs()[g].label() == class_id)
        .collect();
    if members.is_empty() {
        return Err(Error::Argument(format!("class {class_id} has no graphs")));
    }

    let mut local = vec![u32::MAX; td.trees().len()];
    let mut used: Vec<usize> = members
        .iter()
        .flat_map(|&g| td.graph_multiset(g).iter().map(|&(t, _)| t))
        .collect();
    used.sort_unstable();
    used.dedup();
    for (i, &t) in used.iter().enumerate() {
        local[t] = i as u32;
    }

    // multisets are ascending by tree id, so local ids stay ascending
    let transactions = members
        .iter()
        .map(|&g| td.graph_multiset(g).iter().map(|&(t, _)| local[t]).collect())
        .collect();
    Ok(ClassTransactions {
        db: TransactionDB::new(used.len(), transactions)?,
        item_to_tree: used,
    })
}
