use std::collections::BTreeSet;

use super::fpgrowth::check_theta;
use super::transactions::TransactionDB;
use super::FrequentItemset;
use crate::error::{Error, Result};

pub const MAX_ORACLE_ITEMS: usize = 12;

/// Level-wise candidate generation with support counted by bitmask
/// containment. Independent reference for [`super::fpgrowth`].
pub fn apriori_oracle(db: &TransactionDB, theta: f64) -> Result<Vec<FrequentItemset>> {
    check_theta(theta)?;
    if db.num_items() > MAX_ORACLE_ITEMS {
        return Err(Error::Size(format!(
            "{} items exceeds the oracle cap of {MAX_ORACLE_ITEMS}",
            db.num_items()
        )));
    }
    if db.is_empty() {
        return Err(Error::Argument("transaction database is empty".into()));
    }
    let m = db.len();
    let masks: Vec<u32> = db
        .transactions()
        .iter()
        .map(|t| t.iter().fold(0u32, |acc, &i| acc | (1 << i)))
        .collect();
    let support = |set: u32| masks.iter().filter(|&&t| t & set == set).count();
    let frequent = |count: usize| count as f64 / m as f64 >= theta;

    let mut found: Vec<(Vec<u32>, usize)> = Vec::new();
    let mut level: BTreeSet<u32> = (0..db.num_items() as u32)
        .map(|i| 1u32 << i)
        .filter(|&s| frequent(support(s)))
        .collect();

    while !level.is_empty() {
        for &s in &level {
            found.push((bits(s), support(s)));
        }
        // join pairs differing in one item, keep candidates whose every
        // subset one size down is frequent
        let prev: Vec<u32> = level.iter().copied().collect();
        let mut next = BTreeSet::new();
        for (i, &a) in prev.iter().enumerate() {
            for &b in &prev[i + 1..] {
                let c = a | b;
                if c.count_ones() != a.count_ones() + 1 || next.contains(&c) {
                    continue;
                }
                let closed = bits(c).iter().all(|&x| level.contains(&(c & !(1 << x))));
                if closed && frequent(support(c)) {
                    next.insert(c);
                }
            }
        }
        level = next;
    }
    Ok(super::finish(found, m))
}

fn bits(mask: u32) -> Vec<u32> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_singletons() {
        let db = TransactionDB::new(5, (0..5).map(|i| vec![i]).collect()).unwrap();
        let got = apriori_oracle(&db, 0.2).unwrap();
        assert_eq!(got.len(), 5);
        assert!(got.iter().all(|s| s.items.len() == 1 && s.frequency == 0.2));
    }

    #[test]
    fn size_cap() {
        let db = TransactionDB::new(13, vec![vec![0]]).unwrap();
        assert_eq!(apriori_oracle(&db, 0.5).unwrap_err().kind(), "SizeError");
    }
}
