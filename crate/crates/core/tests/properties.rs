mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use ctdistill::ctree::{
    build_computation_tree, canonical_label, decompose_dataset, parse_label, tree_isomorphic_oracle,
    LabelScheme,
};
use ctdistill::graph_io::{parse_jsonl, to_jsonl, FeatureDictionary};
use ctdistill::mining::{apriori_oracle, fpgrowth, TransactionDB, DEFAULT_MAX_ITEMSETS};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn labels_agree_with_oracle_on_random_trees() {
    let mut r = rng(1);
    let trees: Vec<_> = (0..200).map(|_| random_tree(&mut r, 12)).collect();
    for scheme in [LabelScheme::FeatureDegree, LabelScheme::FeatureOnly] {
        let labels: Vec<String> = trees.iter().map(|t| canonical_label(t, scheme)).collect();
        for i in 0..trees.len() {
            for j in i..trees.len() {
                let iso = tree_isomorphic_oracle(&trees[i], &trees[j], scheme).unwrap();
                assert_eq!(labels[i] == labels[j], iso, "{} vs {}", labels[i], labels[j]);
            }
        }
    }
}

#[test]
fn labels_survive_permutation_and_parse() {
    let mut r = rng(2);
    for _ in 0..300 {
        let t = random_tree(&mut r, 30);
        let p = permuted_tree(&mut r, &t);
        let label = canonical_label(&t, LabelScheme::FeatureDegree);
        assert_eq!(label, canonical_label(&p, LabelScheme::FeatureDegree));
        let back = parse_label(&label, t.depth()).unwrap();
        assert_eq!(back, t.canonicalized());
        assert_eq!(canonical_label(&back, LabelScheme::FeatureDegree), label);
    }
}

#[test]
fn truncation_nests_with_depth() {
    let mut r = rng(3);
    for i in 0..40 {
        let g = random_graph(&mut r, i, 0, 7);
        let mut dict = FeatureDictionary::new();
        let fids = dict.intern_graph(&g);
        for v in 0..g.num_nodes() {
            let t3 = build_computation_tree(&g, &fids, v, 3).unwrap();
            for l in 1..=3 {
                let tl = build_computation_tree(&g, &fids, v, l).unwrap();
                assert_eq!(t3.truncated(l), tl);
                assert!(tl.satisfies_degree_law());
            }
        }
    }
}

#[test]
fn dictionary_dedup_matches_pairwise_oracle() {
    let mut r = rng(4);
    let ds = random_dataset(&mut r, 50, 6);
    let td = decompose_dataset(&ds, 2, LabelScheme::FeatureDegree).unwrap();
    let mut dict = FeatureDictionary::new();
    let mut occurrences = Vec::new();
    for (gi, g) in ds.graphs().iter().enumerate() {
        let fids: Vec<u32> = g
            .features()
            .iter()
            .map(|x| {
                let f = td.features().get(x).unwrap();
                dict.intern(x);
                f
            })
            .collect();
        for v in 0..g.num_nodes() {
            let t = build_computation_tree(g, &fids, v, 2).unwrap();
            occurrences.push((td.node_trees(gi)[v], t));
        }
    }
    for a in 0..occurrences.len() {
        for b in a + 1..occurrences.len() {
            let (ia, ta) = &occurrences[a];
            let (ib, tb) = &occurrences[b];
            let iso = tree_isomorphic_oracle(ta, tb, LabelScheme::FeatureDegree).unwrap();
            assert_eq!(ia == ib, iso);
        }
    }
}

#[test]
fn degree_sum_is_twice_edge_count() {
    let mut r = rng(5);
    for i in 0..100 {
        let g = random_graph(&mut r, i, 0, 15);
        let total: usize = (0..g.num_nodes()).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.num_edges());
    }
}

fn as_map(sets: &[ctdistill::mining::FrequentItemset]) -> BTreeMap<Vec<u32>, usize> {
    sets.iter().map(|s| (s.items.clone(), s.support)).collect()
}

#[test]
fn fpgrowth_matches_apriori() {
    let mut r = rng(6);
    for _ in 0..150 {
        let db = random_db(&mut r);
        for k in 1..=9 {
            let theta = k as f64 / 10.0;
            let a = apriori_oracle(&db, theta).unwrap();
            let f = fpgrowth(&db, theta, DEFAULT_MAX_ITEMSETS).unwrap();
            assert_eq!(a, f);
        }
    }
}

#[test]
fn frequent_sets_are_downward_closed_and_theta_monotone() {
    let mut r = rng(7);
    for _ in 0..60 {
        let db = random_db(&mut r);
        let mut prev: Option<BTreeSet<Vec<u32>>> = None;
        for k in (1..=9).rev() {
            let sets = as_map(&fpgrowth(&db, k as f64 / 10.0, DEFAULT_MAX_ITEMSETS).unwrap());
            for items in sets.keys() {
                for skip in 0..items.len() {
                    let mut sub = items.clone();
                    sub.remove(skip);
                    if !sub.is_empty() {
                        assert!(sets[&sub] >= sets[items]);
                    }
                }
            }
            let keys: BTreeSet<Vec<u32>> = sets.keys().cloned().collect();
            if let Some(p) = &prev {
                assert!(p.is_subset(&keys));
            }
            prev = Some(keys);
        }
    }
}

#[test]
fn mining_is_invariant_to_item_and_row_order() {
    let mut r = rng(8);
    for _ in 0..60 {
        let db = random_db(&mut r);
        let n = db.num_items();
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut r);
        let mut rows: Vec<Vec<u32>> = db
            .transactions()
            .iter()
            .map(|t| t.iter().map(|&i| perm[i as usize]).collect())
            .collect();
        rows.shuffle(&mut r);
        let pdb = TransactionDB::from_unsorted(n, rows).unwrap();
        let a = as_map(&fpgrowth(&db, 0.3, DEFAULT_MAX_ITEMSETS).unwrap());
        let b: BTreeMap<Vec<u32>, usize> = as_map(&fpgrowth(&pdb, 0.3, DEFAULT_MAX_ITEMSETS).unwrap())
            .into_iter()
            .map(|(items, s)| {
                let mut back: Vec<u32> = items
                    .iter()
                    .map(|&i| perm.iter().position(|&p| p == i).unwrap() as u32)
                    .collect();
                back.sort_unstable();
                (back, s)
            })
            .collect();
        assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jsonl_round_trip(seed in any::<u64>(), graphs in 1usize..12) {
        let mut r = rng(seed);
        let ds = random_dataset(&mut r, graphs, 10);
        let text = to_jsonl(&ds);
        let back = parse_jsonl(&text).unwrap();
        prop_assert_eq!(back.graphs(), ds.graphs());
        prop_assert_eq!(to_jsonl(&back), text);
    }
}
