//! Itemsets and support-counted pattern collections shared by the miner, the
//! COFI machinery, the rule generator and the oracle.

use std::collections::BTreeMap;
use std::fmt;

use crate::hierarchy::EncodedItem;

/// A set of encoded items, kept sorted in canonical order and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemSet(Vec<EncodedItem>);

impl ItemSet {
    pub fn new(items: impl IntoIterator<Item = EncodedItem>) -> Self {
        let mut items: Vec<EncodedItem> = items.into_iter().collect();
        items.sort();
        items.dedup();
        ItemSet(items)
    }

    pub fn singleton(item: EncodedItem) -> Self {
        ItemSet(vec![item])
    }

    pub fn items(&self) -> &[EncodedItem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: &EncodedItem) -> bool {
        self.0.binary_search(item).is_ok()
    }

    pub fn union(&self, other: &ItemSet) -> ItemSet {
        ItemSet::new(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn is_subset_of(&self, other: &ItemSet) -> bool {
        self.0.iter().all(|i| other.contains(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = &EncodedItem> {
        self.0.iter()
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

impl FromIterator<EncodedItem> for ItemSet {
    fn from_iter<T: IntoIterator<Item = EncodedItem>>(iter: T) -> Self {
        ItemSet::new(iter)
    }
}

/// Frequent itemsets with their absolute support counts. Iteration order is
/// the itemsets' canonical order, so reports are deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PatternSet {
    map: BTreeMap<ItemSet, u64>,
}

impl PatternSet {
    pub fn new() -> Self {
        PatternSet::default()
    }

    /// Adds `count` to the itemset's accumulated support.
    pub fn add(&mut self, itemset: ItemSet, count: u64) {
        *self.map.entry(itemset).or_insert(0) += count;
    }

    /// Sets the support outright, replacing any accumulated value.
    pub fn set(&mut self, itemset: ItemSet, count: u64) {
        self.map.insert(itemset, count);
    }

    pub fn support(&self, itemset: &ItemSet) -> Option<u64> {
        self.map.get(itemset).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ItemSet, u64)> {
        self.map.iter().map(|(k, &v)| (k, v))
    }

    /// Drops itemsets below the threshold; returns how many were removed.
    pub fn retain_at_least(&mut self, min_count: u64) -> usize {
        let before = self.map.len();
        self.map.retain(|_, &mut count| count >= min_count);
        before - self.map.len()
    }

    /// Merges pattern sets that must not overlap (each itemset is owned by
    /// exactly one producer).
    pub fn merge_disjoint(&mut self, other: PatternSet) {
        for (itemset, count) in other.map {
            let previous = self.map.insert(itemset, count);
            debug_assert!(previous.is_none(), "pattern emitted by two producers");
        }
    }

    /// The single items recorded, with their supports.
    pub fn singletons(&self) -> impl Iterator<Item = (&EncodedItem, u64)> {
        self.map
            .iter()
            .filter(|(k, _)| k.len() == 1)
            .map(|(k, &v)| (&k.items()[0], v))
    }
}

impl FromIterator<(ItemSet, u64)> for PatternSet {
    fn from_iter<T: IntoIterator<Item = (ItemSet, u64)>>(iter: T) -> Self {
        PatternSet {
            map: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(texts: &[&str]) -> ItemSet {
        texts.iter().map(|t| t.parse().unwrap()).collect()
    }

    #[test]
    fn itemset_sorts_and_dedups() {
        let s = set(&["2.1.1", "1.1.1", "2.1.1"]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_string(), "1.1.1,2.1.1");
    }

    #[test]
    fn subset_and_union() {
        let a = set(&["1.1.1"]);
        let b = set(&["1.1.1", "2.1.1"]);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert_eq!(a.union(&b), b);
    }

    #[test]
    fn pattern_set_threshold() {
        let mut p = PatternSet::new();
        p.add(set(&["1.1.1"]), 3);
        p.add(set(&["2.1.1"]), 1);
        assert_eq!(p.retain_at_least(2), 1);
        assert_eq!(p.support(&set(&["1.1.1"])), Some(3));
        assert_eq!(p.support(&set(&["2.1.1"])), None);
    }
}
