//! Frequent co-occurring tree sets via frequent-itemset mining.

mod apriori;
mod fpgrowth;
mod transactions;

pub use apriori::{apriori_oracle, MAX_ORACLE_ITEMS};
pub use fpgrowth::{fpgrowth, min_support_count, DEFAULT_MAX_ITEMSETS};
pub use transactions::{build_transactions, ClassTransactions, TransactionDB};

#[derive(Debug, Clone, PartialEq)]
pub struct FrequentItemset {
    /// Ascending item ids.
    pub items: Vec<u32>,
    pub support: usize,
    /// `support / |transactions|`.
    pub frequency: f64,
}

fn finish(mut found: Vec<(Vec<u32>, usize)>, m: usize) -> Vec<FrequentItemset> {
    found.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    found
        .into_iter()
        .map(|(items, support)| FrequentItemset {
            items,
            support,
            frequency: support as f64 / m as f64,
        })
        .collect()
}
