//! Shared fixtures for unit tests.

use crate::hierarchy::EncodedItem;
use crate::transactions::{EncodedTable, Transaction};

pub(crate) fn item(s: &str) -> EncodedItem {
    s.parse().unwrap()
}

/// The five-transaction desk fixture used throughout the unit tests.
pub(crate) fn db5() -> EncodedTable {
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
