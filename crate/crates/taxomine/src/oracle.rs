//! Brute-force reference implementations: direct support counting over the
//! encoded table and level-wise Apriori enumeration.
//!
//! These are deliberately naive. They exist so the tree-based miner can be
//! checked against an independent computation, both in tests and through the
//! CLI `--verify` flag and `oracle` subcommand. Keep them free of any shared
//! code path with the fptree/cofi modules.

use std::collections::BTreeSet;

use num_rational::Ratio;

use crate::error::Result;
use crate::hierarchy::EncodedItem;
use crate::patterns::{ItemSet, PatternSet};
use crate::transactions::{EncodedTable, Transaction};

/// Result of one brute-force level run.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub level: usize,
    pub patterns: PatternSet,
}

impl OracleResult {
    /// Frequent single items of this level.
    pub fn frequent_items(&self) -> BTreeSet<EncodedItem> {
        self.patterns
            .singletons()
            .map(|(item, _)| item.clone())
            .collect()
    }
}

fn transaction_matches(t: &Transaction, items: &[EncodedItem]) -> bool {
    items
        .iter()
        .all(|i| t.contains(i) || t.items().iter().any(|x| i.is_ancestor_of(x)))
}

/// Number of transactions containing every item of the (possibly mixed-level)
/// itemset, where containing means holding the item itself or any descendant.
pub fn support_count(table: &EncodedTable, items: &[EncodedItem]) -> u64 {
    if items.is_empty() {
        return table.n() as u64;
    }
    table
        .transactions()
        .iter()
        .filter(|t| transaction_matches(t, items))
        .count() as u64
}

/// Level-wise exhaustive enumeration of frequent itemsets at one concept
/// level, optionally restricted to descendants of the given frequent parents.
pub fn apriori(
    table: &EncodedTable,
    level: usize,
    min_count: u64,
    frequent_parents: Option<&BTreeSet<EncodedItem>>,
) -> Result<OracleResult> {
    let generalized = table.generalize(level)?;
    let view = match frequent_parents {
        Some(parents) => generalized.filter_by_parents(parents)?,
        None => generalized,
    };

    let mut patterns = PatternSet::new();

    let mut universe: Vec<EncodedItem> = view
        .transactions()
        .iter()
        .flat_map(|t| t.items().iter().cloned())
        .collect();
    universe.sort();
    universe.dedup();

    let count_of = |items: &[EncodedItem]| -> u64 {
        view.transactions()
            .iter()
            .filter(|t| items.iter().all(|i| t.contains(i)))
            .count() as u64
    };

    let mut frontier: Vec<Vec<EncodedItem>> = Vec::new();
    for item in &universe {
        let candidate = vec![item.clone()];
        let count = count_of(&candidate);
        if count >= min_count {
            patterns.set(ItemSet::new(candidate.clone()), count);
            frontier.push(candidate);
        }
    }
    let singles: Vec<EncodedItem> = frontier.iter().map(|c| c[0].clone()).collect();

    while !frontier.is_empty() {
        let mut next = Vec::new();
        for base in &frontier {
            let last = base.last().expect("frontier itemsets are non-empty");
            for item in singles.iter().filter(|i| *i > last) {
                let mut candidate = base.clone();
                candidate.push(item.clone());
                let count = count_of(&candidate);
                if count >= min_count {
                    patterns.set(ItemSet::new(candidate.clone()), count);
                    next.push(candidate);
                }
            }
        }
        frontier = next;
    }

    Ok(OracleResult { level, patterns })
}

/// Exhaustive rule enumeration over a pattern set: every antecedent/consequent
/// split of every itemset of size two or more that meets the confidence bar.
/// Returned as (antecedent, consequent, support count, confidence).
pub fn enumerate_rules(
    patterns: &PatternSet,
    min_confidence: Ratio<u64>,
) -> Vec<(ItemSet, ItemSet, u64, Ratio<u64>)> {
    let mut out = Vec::new();
    for (itemset, support) in patterns.iter() {
        let k = itemset.len();
        if k < 2 {
            continue;
        }
        let items = itemset.items();
        for mask in 1..(1u32 << k) - 1 {
            let antecedent: ItemSet = items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, item)| item.clone())
                .collect();
            let consequent: ItemSet = items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) == 0)
                .map(|(_, item)| item.clone())
                .collect();
            let antecedent_support = patterns
                .support(&antecedent)
                .expect("subset of a frequent itemset is frequent");
            let confidence = Ratio::new(support, antecedent_support);
            if confidence >= min_confidence {
                out.push((antecedent, consequent, support, confidence));
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transactions::Transaction;

    fn item(s: &str) -> EncodedItem {
        s.parse().unwrap()
    }

    fn db5() -> EncodedTable {
        let rows: Vec<(&str, Vec<&str>)> = vec![
            ("T1", vec!["1.1.1", "2.1.1"]),
            ("T2", vec!["1.1.1", "1.2.1", "2.1.2"]),
            ("T3", vec!["1.1.2", "2.1.1"]),
            ("T4", vec!["1.1.1", "2.1.1", "3.1.1"]),
            ("T5", vec!["1.2.1"]),
        ];
        let transactions = rows
            .into_iter()
            .map(|(tid, items)| Transaction::new(tid, items.into_iter().map(item)))
            .collect();
        EncodedTable::from_transactions(transactions, 3)
    }

    #[test]
    fn support_counts_descendants() {
        let db = db5();
        assert_eq!(support_count(&db, &[]), 5);
        assert_eq!(support_count(&db, &[item("1.1.1"), item("2.1.1")]), 2);
        assert_eq!(support_count(&db, &[item("1.*.*"), item("3.1.1")]), 1);
        assert_eq!(support_count(&db, &[item("1.*.*")]), 5);
        assert_eq!(support_count(&db, &[item("2.*.*")]), 4);
        assert_eq!(support_count(&db, &[item("3.*.*")]), 1);
    }

    #[test]
    fn apriori_atomic_level_on_db5() {
        let result = apriori(&db5(), 3, 2, None).unwrap();
        let expected: Vec<(&str, &[&str], u64)> = vec![
            ("a", &["1.1.1"], 3),
            ("b", &["2.1.1"], 3),
            ("c", &["1.2.1"], 2),
            ("d", &["1.1.1", "2.1.1"], 2),
        ];
        assert_eq!(result.patterns.len(), expected.len());
        for (_, items, count) in expected {
            let set: ItemSet = items.iter().map(|s| item(s)).collect();
            assert_eq!(result.patterns.support(&set), Some(count), "{set}");
        }
    }

    #[test]
    fn apriori_level_one_on_db5() {
        let result = apriori(&db5(), 1, 2, None).unwrap();
        let expected: Vec<(&[&str], u64)> = vec![
            (&["1.*.*"], 5),
            (&["2.*.*"], 4),
            (&["1.*.*", "2.*.*"], 4),
        ];
        assert_eq!(result.patterns.len(), expected.len());
        for (items, count) in expected {
            let set: ItemSet = items.iter().map(|s| item(s)).collect();
            assert_eq!(result.patterns.support(&set), Some(count), "{set}");
        }
    }

    #[test]
    fn min_count_above_n_gives_nothing() {
        let result = apriori(&db5(), 3, 6, None).unwrap();
        assert!(result.patterns.is_empty());
    }

    // The oracle's own oracle: on tiny instances, enumerate every subset of
    // the item universe and count supports directly.
    #[test]
    fn apriori_agrees_with_full_subset_enumeration() {
        let tiny_rows: Vec<Vec<&str>> = vec![
            vec!["1.1.1", "2.1.1"],
            vec!["1.1.1", "1.2.1"],
            vec!["2.1.1"],
            vec!["1.1.1", "2.1.1", "1.2.1"],
        ];
        let transactions: Vec<Transaction> = tiny_rows
            .iter()
            .enumerate()
            .map(|(i, items)| {
                Transaction::new(format!("T{i}"), items.iter().map(|s| item(s)))
            })
            .collect();
        let table = EncodedTable::from_transactions(transactions, 3);

        for level in 1..=3 {
            for min_count in 1..=4 {
                let fast = apriori(&table, level, min_count, None).unwrap();

                let view = table.generalize(level).unwrap();
                let mut universe: Vec<EncodedItem> = view
                    .transactions()
                    .iter()
                    .flat_map(|t| t.items().iter().cloned())
                    .collect();
                universe.sort();
                universe.dedup();

                let mut slow = PatternSet::new();
                for mask in 1u32..(1 << universe.len()) {
                    let subset: Vec<EncodedItem> = universe
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, it)| it.clone())
                        .collect();
                    let count = view
                        .transactions()
                        .iter()
                        .filter(|t| subset.iter().all(|i| t.contains(i)))
                        .count() as u64;
                    if count >= min_count {
                        slow.set(ItemSet::new(subset), count);
                    }
                }
                assert_eq!(fast.patterns, slow, "level {level} min_count {min_count}");
            }
        }
    }
}
