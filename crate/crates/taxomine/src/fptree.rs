//! Counted prefix tree over support-ordered frequent items, with a header
//! table and bidirectional per-item node chains, plus the transform that
//! re-expresses a tree at a higher concept level.
//!
//! The transform is implemented by re-inserting generalized paths rather than
//! by in-place node surgery. Its contract is semantic: the resulting tree must
//! be indistinguishable (header supports and mined patterns) from a tree built
//! directly on the generalized transaction table. The property suite checks
//! exactly that.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hierarchy::EncodedItem;
use crate::transactions::EncodedTable;

pub(crate) type NodeId = usize;

const ROOT: NodeId = 0;

#[derive(Debug, Clone)]
pub struct FPNode {
    item: Option<EncodedItem>,
    count: u64,
    parent: Option<NodeId>,
    children: BTreeMap<EncodedItem, NodeId>,
    next_same: Option<NodeId>,
    prev_same: Option<NodeId>,
}

/// One header table row: the item, its tree-wide support, and the ends of its
/// node chain.
#[derive(Debug, Clone)]
pub struct HeaderEntry {
    pub item: EncodedItem,
    pub support: u64,
    head: Option<NodeId>,
    tail: Option<NodeId>,
}

#[derive(Debug, Clone)]
pub struct FPTree {
    nodes: Vec<FPNode>,
    header: Vec<HeaderEntry>,
    rank: HashMap<EncodedItem, usize>,
    level: usize,
    min_count: u64,
    n: usize,
}

/// Two scans: the first counts item supports and fixes the header order
/// (descending support, ties by canonical text), the second inserts each
/// transaction's frequent items in header order, sharing prefixes.
pub fn build_fptree(table: &EncodedTable, min_count: u64) -> FPTree {
    let weighted: Vec<(Vec<EncodedItem>, u64)> = table
        .transactions()
        .iter()
        .map(|t| (t.items().to_vec(), 1))
        .collect();
    FPTree::from_weighted_paths(&weighted, table.level(), min_count, table.n())
}

impl FPTree {
    fn empty(level: usize, min_count: u64, n: usize) -> FPTree {
        FPTree {
            nodes: vec![FPNode {
                item: None,
                count: 0,
                parent: None,
                children: BTreeMap::new(),
                next_same: None,
                prev_same: None,
            }],
            header: Vec::new(),
            rank: HashMap::new(),
            level,
            min_count,
            n,
        }
    }

    /// Shared builder: a weighted multiset of item sets goes in, a tree comes
    /// out. Items below `min_count` in aggregate are dropped.
    fn from_weighted_paths(
        paths: &[(Vec<EncodedItem>, u64)],
        level: usize,
        min_count: u64,
        n: usize,
    ) -> FPTree {
        let mut supports: BTreeMap<&EncodedItem, u64> = BTreeMap::new();
        for (items, weight) in paths {
            for item in items {
                *supports.entry(item).or_insert(0) += weight;
            }
        }

        let mut tree = FPTree::empty(level, min_count, n);
        let mut entries: Vec<(EncodedItem, u64)> = supports
            .into_iter()
            .filter(|&(_, s)| s >= min_count)
            .map(|(item, s)| (item.clone(), s))
            .collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        for (idx, (item, support)) in entries.into_iter().enumerate() {
            tree.rank.insert(item.clone(), idx);
            tree.header.push(HeaderEntry {
                item,
                support,
                head: None,
                tail: None,
            });
        }

        for (items, weight) in paths {
            let mut sorted: Vec<&EncodedItem> = items
                .iter()
                .filter(|i| tree.rank.contains_key(*i))
                .collect();
            sorted.sort_by_key(|i| tree.rank[*i]);
            tree.insert_path(&sorted, *weight);
        }
        tree
    }

    fn insert_path(&mut self, items: &[&EncodedItem], weight: u64) {
        let mut current = ROOT;
        for &item in items {
            current = match self.nodes[current].children.get(item) {
                Some(&child) => {
                    self.nodes[child].count += weight;
                    child
                }
                None => {
                    let id = self.nodes.len();
                    self.nodes.push(FPNode {
                        item: Some(item.clone()),
                        count: weight,
                        parent: Some(current),
                        children: BTreeMap::new(),
                        next_same: None,
                        prev_same: None,
                    });
                    self.nodes[current].children.insert(item.clone(), id);
                    self.link_into_chain(item, id);
                    id
                }
            };
        }
    }

    /// Appends a fresh node to its item's chain (insertion order).
    fn link_into_chain(&mut self, item: &EncodedItem, id: NodeId) {
        let entry = &mut self.header[self.rank[item]];
        match entry.tail {
            None => {
                entry.head = Some(id);
                entry.tail = Some(id);
            }
            Some(tail) => {
                entry.tail = Some(id);
                self.nodes[tail].next_same = Some(id);
                self.nodes[id].prev_same = Some(tail);
            }
        }
    }

    /// Re-expresses the tree at the more general `target_level`: node and
    /// header items are relabeled by wildcarding the deeper tokens, items that
    /// end up below `min_count` are removed, duplicates that a relabeled path
    /// would contain are collapsed so each original transaction still counts
    /// once, and the header is re-sorted with all chains rebuilt.
    pub fn transform_fpl(&self, target_level: usize, min_count: u64) -> Result<FPTree> {
        if target_level == 0 || target_level >= self.level {
            return Err(Error::LevelOutOfRange {
                level: target_level,
                depth: self.level,
            });
        }
        let mut weighted = Vec::new();
        for (items, weight) in self.extract_paths() {
            let mut relabeled = items
                .iter()
                .map(|i| i.generalize(target_level))
                .collect::<Result<Vec<_>>>()?;
            relabeled.sort();
            relabeled.dedup();
            weighted.push((relabeled, weight));
        }
        Ok(FPTree::from_weighted_paths(
            &weighted,
            target_level,
            min_count,
            self.n,
        ))
    }

    /// Rebuilds the tree keeping only the listed items, re-applying the
    /// support threshold. Supports of kept items are unchanged.
    pub fn restrict_items(&self, keep: &BTreeSet<EncodedItem>, min_count: u64) -> FPTree {
        let weighted: Vec<(Vec<EncodedItem>, u64)> = self
            .extract_paths()
            .into_iter()
            .map(|(items, weight)| {
                (
                    items.into_iter().filter(|i| keep.contains(i)).collect(),
                    weight,
                )
            })
            .collect();
        FPTree::from_weighted_paths(&weighted, self.level, min_count, self.n)
    }

    /// Recovers the weighted multiset of item paths stored in the tree: each
    /// node whose count exceeds the sum of its children's counts ends that
    /// many transactions.
    pub fn extract_paths(&self) -> Vec<(Vec<EncodedItem>, u64)> {
        let mut out = Vec::new();
        let mut stack: Vec<EncodedItem> = Vec::new();
        self.extract_into(ROOT, &mut stack, &mut out);
        out
    }

    fn extract_into(
        &self,
        id: NodeId,
        stack: &mut Vec<EncodedItem>,
        out: &mut Vec<(Vec<EncodedItem>, u64)>,
    ) {
        let node = &self.nodes[id];
        if let Some(item) = &node.item {
            stack.push(item.clone());
        }
        if id != ROOT {
            let child_sum: u64 = node.children.values().map(|&c| self.nodes[c].count).sum();
            debug_assert!(node.count >= child_sum, "child counts exceed parent");
            let residual = node.count - child_sum;
            if residual > 0 {
                out.push((stack.clone(), residual));
            }
        }
        for &child in node.children.values() {
            self.extract_into(child, stack, out);
        }
        if node.item.is_some() {
            stack.pop();
        }
    }

    /// Header support of an item, cross-checked against its chain in debug
    /// builds.
    pub fn item_support(&self, item: &EncodedItem) -> Result<u64> {
        let idx = *self
            .rank
            .get(item)
            .ok_or_else(|| Error::ItemNotFound(item.to_string()))?;
        let entry = &self.header[idx];
        debug_assert_eq!(
            self.chain(idx).map(|id| self.nodes[id].count).sum::<u64>(),
            entry.support,
            "chain sum disagrees with header support for {item}"
        );
        Ok(entry.support)
    }

    pub fn header(&self) -> &[HeaderEntry] {
        &self.header
    }

    pub fn contains_item(&self, item: &EncodedItem) -> bool {
        self.rank.contains_key(item)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn non_root_node_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Header items, most frequent first.
    pub fn header_items(&self) -> impl Iterator<Item = &EncodedItem> {
        self.header.iter().map(|e| &e.item)
    }

    pub(crate) fn chain(&self, header_idx: usize) -> ChainIter<'_> {
        ChainIter {
            tree: self,
            next: self.header[header_idx].head,
        }
    }

    pub(crate) fn node_count_of(&self, id: NodeId) -> u64 {
        self.nodes[id].count
    }

    /// Items on the path from a node's parent up to the root, nearest first.
    pub(crate) fn ancestor_items(&self, id: NodeId) -> Vec<&EncodedItem> {
        let mut out = Vec::new();
        let mut current = self.nodes[id].parent;
        while let Some(pid) = current {
            if let Some(item) = &self.nodes[pid].item {
                out.push(item);
            }
            current = self.nodes[pid].parent;
        }
        out
    }

    pub(crate) fn rank_of(&self, item: &EncodedItem) -> Option<usize> {
        self.rank.get(item).copied()
    }

    /// Counts transactions whose full item path covers every required item,
    /// where a path item covers a required item if it equals it or descends
    /// from it. Counting is anchored on the chain of `anchor`, which must be
    /// one of the required items at this tree's level.
    pub fn count_paths_matching(
        &self,
        anchor: &EncodedItem,
        required: &[EncodedItem],
    ) -> Result<u64> {
        if anchor.level() != self.level {
            return Err(Error::LevelOutOfRange {
                level: anchor.level(),
                depth: self.level,
            });
        }
        let idx = match self.rank.get(anchor) {
            Some(&idx) => idx,
            None => return Ok(0),
        };
        let covers = |path_item: &EncodedItem, wanted: &EncodedItem| {
            path_item == wanted || wanted.is_ancestor_of(path_item)
        };
        let mut total = 0;
        for node_id in self.chain(idx) {
            // Which required items the upward part of the path satisfies.
            let mut matched: Vec<bool> = required
                .iter()
                .map(|r| covers(anchor, r))
                .collect();
            for item in self.ancestor_items(node_id) {
                for (slot, r) in matched.iter_mut().zip(required.iter()) {
                    *slot = *slot || covers(item, r);
                }
            }
            // The downward subtree splits the node's count among extensions;
            // each residual is one group of transactions with a fixed path.
            total += self.count_subtree_matches(node_id, &mut matched, required);
        }
        Ok(total)
    }

    fn count_subtree_matches(
        &self,
        id: NodeId,
        matched: &mut [bool],
        required: &[EncodedItem],
    ) -> u64 {
        let node = &self.nodes[id];
        let child_sum: u64 = node.children.values().map(|&c| self.nodes[c].count).sum();
        let residual = node.count - child_sum;
        let mut total = 0;
        if residual > 0 && matched.iter().all(|&m| m) {
            total += residual;
        }
        for &child in node.children.values() {
            let child_item = self.nodes[child]
                .item
                .as_ref()
                .expect("non-root nodes carry an item");
            let newly: Vec<usize> = required
                .iter()
                .enumerate()
                .filter(|(i, r)| {
                    !matched[*i] && (child_item == *r || r.is_ancestor_of(child_item))
                })
                .map(|(i, _)| i)
                .collect();
            for &i in &newly {
                matched[i] = true;
            }
            total += self.count_subtree_matches(child, matched, required);
            for &i in &newly {
                matched[i] = false;
            }
        }
        total
    }

    /// Structural self-check used by tests: chain sums, chain links, header
    /// order along every path, and parent/child consistency.
    pub fn check_integrity(&self) -> std::result::Result<(), String> {
        for (idx, entry) in self.header.iter().enumerate() {
            let mut sum = 0;
            let mut prev: Option<NodeId> = None;
            let mut current = entry.head;
            while let Some(id) = current {
                let node = &self.nodes[id];
                if node.item.as_ref() != Some(&entry.item) {
                    return Err(format!("chain of {} holds a foreign node", entry.item));
                }
                if node.prev_same != prev {
                    return Err(format!("broken back link in chain of {}", entry.item));
                }
                sum += node.count;
                prev = current;
                current = node.next_same;
            }
            if entry.tail != prev {
                return Err(format!("chain tail of {} is stale", entry.item));
            }
            if sum != entry.support {
                return Err(format!(
                    "chain sum {sum} != header support {} for {}",
                    entry.support, entry.item
                ));
            }
            if entry.support < self.min_count {
                return Err(format!("header item {} below min_count", entry.item));
            }
            if idx > 0 {
                let above = &self.header[idx - 1];
                let ordered = above.support > entry.support
                    || (above.support == entry.support && above.item < entry.item);
                if !ordered {
                    return Err("header order violated".into());
                }
            }
        }
        for (id, node) in self.nodes.iter().enumerate() {
            if id == ROOT {
                continue;
            }
            if node.count == 0 {
                return Err("non-root node with zero count".into());
            }
            let item = node.item.as_ref().ok_or("non-root node without item")?;
            let parent = node.parent.ok_or("non-root node without parent")?;
            if let Some(parent_item) = &self.nodes[parent].item {
                if parent_item == item {
                    return Err(format!("node item {item} equals its parent's"));
                }
                let (pr, nr) = (self.rank[parent_item], self.rank[item]);
                if pr >= nr {
                    return Err(format!("path order violated at {item}"));
                }
            }
            if self.nodes[parent].children.get(item) != Some(&id) {
                return Err("child index out of sync".into());
            }
        }
        Ok(())
    }

    /// Debug dump: header rows `item support`, then one `item:count` line per
    /// node, indented two spaces per tree depth, children in canonical order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "level {} min_count {} n {}",
            self.level, self.min_count, self.n
        );
        let _ = writeln!(out, "header");
        for entry in &self.header {
            let _ = writeln!(out, "{} {}", entry.item, entry.support);
        }
        let _ = writeln!(out, "tree");
        self.dump_node(ROOT, 0, &mut out);
        out
    }

    fn dump_node(&self, id: NodeId, depth: usize, out: &mut String) {
        let node = &self.nodes[id];
        if let Some(item) = &node.item {
            for _ in 0..depth - 1 {
                out.push_str("  ");
            }
            let _ = writeln!(out, "{}:{}", item, node.count);
        }
        for &child in node.children.values() {
            self.dump_node(child, depth + 1, out);
        }
    }
}

pub(crate) struct ChainIter<'a> {
    tree: &'a FPTree,
    next: Option<NodeId>,
}

impl Iterator for ChainIter<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        let id = self.next?;
        self.next = self.tree.nodes[id].next_same;
        Some(id)
    }
}
