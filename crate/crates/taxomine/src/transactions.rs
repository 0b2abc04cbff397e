//! Transaction ingestion and the encoded transaction table.
//!
//! The table stores each transaction as a sorted, deduplicated set of encoded
//! items, all expressed at one concept level. `n` is the original database
//! size and stays fixed through generalization and filtering so that support
//! fractions keep one denominator across levels.

use std::collections::BTreeSet;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::hierarchy::{ConceptHierarchy, EncodedItem};

/// What to do when a transaction references a barcode missing from the
/// hierarchy dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownBarcode {
    #[default]
    Abort,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub tid: String,
    items: Vec<EncodedItem>,
}

impl Transaction {
    pub fn new(tid: impl Into<String>, items: impl IntoIterator<Item = EncodedItem>) -> Self {
        let mut items: Vec<EncodedItem> = items.into_iter().collect();
        items.sort();
        items.dedup();
        Transaction {
            tid: tid.into(),
            items,
        }
    }

    /// Items in canonical order, without duplicates.
    pub fn items(&self) -> &[EncodedItem] {
        &self.items
    }

    pub fn contains(&self, item: &EncodedItem) -> bool {
        self.items.binary_search(item).is_ok()
    }
}

#[derive(Debug, Clone)]
pub struct EncodedTable {
    transactions: Vec<Transaction>,
    n: usize,
    level: usize,
}

impl EncodedTable {
    /// Wraps already-encoded transactions. `n` is the number given, which may
    /// exceed `transactions.len()` when empty transactions were dropped.
    pub fn from_parts(transactions: Vec<Transaction>, n: usize, level: usize) -> Self {
        debug_assert!(n >= transactions.len());
        EncodedTable {
            transactions,
            n,
            level,
        }
    }

    /// Convenience constructor for tests and examples: every transaction is
    /// kept and counted, level is taken as given.
    pub fn from_transactions(transactions: Vec<Transaction>, level: usize) -> Self {
        let n = transactions.len();
        EncodedTable {
            transactions,
            n,
            level,
        }
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    /// Total transaction count of the original database (the support
    /// denominator), including transactions that became empty.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Concept level every item in this table is expressed at.
    pub fn level(&self) -> usize {
        self.level
    }

    /// Re-expresses the table at a more general level. Items that collapse to
    /// the same code within one transaction are deduplicated; `n` is kept.
    pub fn generalize(&self, level: usize) -> Result<EncodedTable> {
        if level == 0 || level > self.level {
            return Err(Error::LevelOutOfRange {
                level,
                depth: self.level,
            });
        }
        if level == self.level {
            return Ok(self.clone());
        }
        let transactions = self
            .transactions
            .iter()
            .map(|t| {
                let items: Result<Vec<EncodedItem>> =
                    t.items.iter().map(|i| i.generalize(level)).collect();
                Ok(Transaction::new(t.tid.clone(), items?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EncodedTable {
            transactions,
            n: self.n,
            level,
        })
    }

    /// Keeps only items whose ancestor at the parents' level is listed.
    /// Transactions left empty are dropped from storage; `n` is unchanged.
    pub fn filter_by_parents(&self, parents: &BTreeSet<EncodedItem>) -> Result<EncodedTable> {
        let parent_level = match parents.iter().next() {
            Some(p) => p.level(),
            // An empty parent set annihilates every item.
            None => {
                return Ok(EncodedTable {
                    transactions: Vec::new(),
                    n: self.n,
                    level: self.level,
                });
            }
        };
        if parents.iter().any(|p| p.level() != parent_level) {
            return Err(Error::Config(
                "frequent parent items must all sit at one level".into(),
            ));
        }
        if parent_level >= self.level {
            return Err(Error::LevelOutOfRange {
                level: parent_level,
                depth: self.level,
            });
        }
        let mut transactions = Vec::new();
        for t in &self.transactions {
            let kept: Vec<EncodedItem> = t
                .items
                .iter()
                .filter(|i| {
                    i.generalize(parent_level)
                        .map(|a| parents.contains(&a))
                        .unwrap_or(false)
                })
                .cloned()
                .collect();
            if !kept.is_empty() {
                transactions.push(Transaction::new(t.tid.clone(), kept));
            }
        }
        Ok(EncodedTable {
            transactions,
            n: self.n,
            level: self.level,
        })
    }
}

/// Reads `tid<TAB>barcode,barcode,...` lines and encodes them against the
/// hierarchy. Duplicate encodings within one transaction collapse to one
/// item; empty transactions are kept (they count toward `n`).
pub fn ingest(
    reader: impl BufRead,
    hierarchy: &ConceptHierarchy,
    on_unknown: UnknownBarcode,
) -> Result<EncodedTable> {
    let mut transactions = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io("<transactions>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let (tid, rest) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: line_no,
            message: "expected tid<TAB>barcode list".into(),
        })?;
        let tid = tid.trim();
        if tid.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty transaction id".into(),
            });
        }
        let mut items = Vec::new();
        for barcode in rest.split(',').map(str::trim).filter(|b| !b.is_empty()) {
            match hierarchy.encode(barcode) {
                Ok(item) => items.push(item),
                Err(Error::UnknownBarcode(b)) => match on_unknown {
                    UnknownBarcode::Skip => continue,
                    UnknownBarcode::Abort => return Err(Error::UnknownBarcode(b)),
                },
                Err(other) => return Err(other),
            }
        }
        transactions.push(Transaction::new(tid, items));
    }
    let n = transactions.len();
    Ok(EncodedTable {
        transactions,
        n,
        level: hierarchy.depth(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::ConceptHierarchy;
    use std::io::Cursor;

    fn hierarchy() -> ConceptHierarchy {
        let csv = "\
barcode,category,brand,content
10001,c1,b1,v1
10002,c1,b1,v1
10010,c1,b1,v2
10020,c1,b2,v1
20001,c2,b1,v1
20002,c2,b1,v2
30001,c3,b1,v1
";
        ConceptHierarchy::load(Cursor::new(csv)).unwrap()
    }

    fn item(s: &str) -> EncodedItem {
        s.parse().unwrap()
    }

    #[test]
    fn duplicate_barcodes_collapse_to_one_item() {
        let h = hierarchy();
        let table = ingest(Cursor::new("1001\t10001,10001\n"), &h, UnknownBarcode::Abort).unwrap();
        assert_eq!(table.transactions()[0].items(), &[item("1.1.1")]);
    }

    #[test]
    fn merged_gid_barcodes_collapse_too() {
        let h = hierarchy();
        let table = ingest(Cursor::new("1001\t10001,10002\n"), &h, UnknownBarcode::Abort).unwrap();
        assert_eq!(table.transactions()[0].items(), &[item("1.1.1")]);
    }

    #[test]
    fn empty_input_gives_empty_table() {
        let h = hierarchy();
        let table = ingest(Cursor::new(""), &h, UnknownBarcode::Abort).unwrap();
        assert_eq!(table.n(), 0);
        assert!(table.transactions().is_empty());
    }

    #[test]
    fn unknown_barcode_policy() {
        let h = hierarchy();
        let err = ingest(Cursor::new("1\t99999\n"), &h, UnknownBarcode::Abort).unwrap_err();
        assert!(matches!(err, Error::UnknownBarcode(b) if b == "99999"));

        let table = ingest(Cursor::new("1\t99999,10001\n"), &h, UnknownBarcode::Skip).unwrap();
        assert_eq!(table.transactions()[0].items(), &[item("1.1.1")]);
    }

    #[test]
    fn malformed_row_reports_line() {
        let h = hierarchy();
        let err = ingest(Cursor::new("1001 10001\n"), &h, UnknownBarcode::Abort).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn generalize_dedups_and_keeps_n() {
        let t = Transaction::new("T2", [item("1.1.1"), item("1.2.1"), item("2.1.2")]);
        let table = EncodedTable::from_transactions(vec![t], 3);
        let level1 = table.generalize(1).unwrap();
        assert_eq!(level1.n(), 1);
        assert_eq!(
            level1.transactions()[0].items(),
            &[item("1.*.*"), item("2.*.*")]
        );
        let same = table.generalize(3).unwrap();
        assert_eq!(same.transactions(), table.transactions());
    }

    #[test]
    fn filter_drops_items_without_frequent_parent() {
        let t = Transaction::new("T4", [item("1.1.1"), item("2.1.1"), item("3.1.1")]);
        let table = EncodedTable::from_transactions(vec![t], 3);
        let parents: BTreeSet<_> = [item("1.*.*"), item("2.*.*")].into_iter().collect();
        let filtered = table.filter_by_parents(&parents).unwrap();
        assert_eq!(
            filtered.transactions()[0].items(),
            &[item("1.1.1"), item("2.1.1")]
        );
        assert_eq!(filtered.n(), 1);
    }

    #[test]
    fn empty_parent_set_empties_the_table_but_keeps_n() {
        let t = Transaction::new("T1", [item("1.1.1")]);
        let table = EncodedTable::from_transactions(vec![t], 3);
        let filtered = table.filter_by_parents(&BTreeSet::new()).unwrap();
        assert!(filtered.transactions().is_empty());
        assert_eq!(filtered.n(), 1);
    }
}
