//! Item taxonomy: barcode dictionary, positional item encoding and level
//! generalization.
//!
//! Every item is encoded as one token per taxonomy level, most general level
//! first. A generalized item replaces the tokens below its level with a
//! wildcard, so `1.2.1` (an atomic item) generalizes to `1.2.*` and `1.*.*`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One position of an encoded item: a 1-based index at its level, or the
/// wildcard standing for "any value below this level".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Token {
    Index(u32),
    Wildcard,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Index(i) => write!(f, "{i}"),
            Token::Wildcard => write!(f, "*"),
        }
    }
}

/// Compares two positive integers by their decimal text, which is the order
/// canonical item texts sort in ("10" < "2").
fn cmp_decimal(a: u32, b: u32) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let (da, db) = (digits(a), digits(b));
    da.iter().cmp(db.iter())
}

fn digits(mut v: u32) -> Vec<u8> {
    let mut out = Vec::with_capacity(10);
    loop {
        out.push((v % 10) as u8);
        v /= 10;
        if v == 0 {
            break;
        }
    }
    out.reverse();
    out
}

impl Token {
    fn cmp_text(&self, other: &Token) -> Ordering {
        match (self, other) {
            (Token::Wildcard, Token::Wildcard) => Ordering::Equal,
            // '*' sorts before any digit in the canonical text form.
            (Token::Wildcard, Token::Index(_)) => Ordering::Less,
            (Token::Index(_), Token::Wildcard) => Ordering::Greater,
            (Token::Index(a), Token::Index(b)) => cmp_decimal(*a, *b),
        }
    }
}

/// A node of the concept hierarchy: fixed-depth token vector whose wildcard
/// suffix marks how far the item has been generalized.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncodedItem {
    tokens: Vec<Token>,
}

impl EncodedItem {
    /// Builds an item from tokens, enforcing the wildcard-suffix shape and a
    /// non-wildcard leading token.
    pub fn new(tokens: Vec<Token>) -> Result<Self> {
        let text = || {
            tokens
                .iter()
                .map(Token::to_string)
                .collect::<Vec<_>>()
                .join(".")
        };
        if tokens.is_empty() {
            return Err(Error::InvalidItem {
                text: String::new(),
                message: "no tokens".into(),
            });
        }
        let mut seen_wildcard = false;
        for tok in &tokens {
            match tok {
                Token::Wildcard => seen_wildcard = true,
                Token::Index(i) => {
                    if seen_wildcard {
                        return Err(Error::InvalidItem {
                            text: text(),
                            message: "wildcards must form a suffix".into(),
                        });
                    }
                    if *i == 0 {
                        return Err(Error::InvalidItem {
                            text: text(),
                            message: "token indices start at 1".into(),
                        });
                    }
                }
            }
        }
        if tokens[0] == Token::Wildcard {
            return Err(Error::InvalidItem {
                text: text(),
                message: "a fully generalized item needs at least one concrete token".into(),
            });
        }
        Ok(EncodedItem { tokens })
    }

    /// Builds an atomic (full-depth) item from 1-based indices.
    pub fn atomic(indices: &[u32]) -> Result<Self> {
        EncodedItem::new(indices.iter().map(|&i| Token::Index(i)).collect())
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Number of taxonomy levels this item is encoded against.
    pub fn depth(&self) -> usize {
        self.tokens.len()
    }

    /// Count of leading non-wildcard tokens; level 1 is the most general.
    pub fn level(&self) -> usize {
        self.tokens
            .iter()
            .take_while(|t| !matches!(t, Token::Wildcard))
            .count()
    }

    /// Replaces every token below `level` with the wildcard. Idempotent when
    /// the item is already at or above `level`.
    pub fn generalize(&self, level: usize) -> Result<EncodedItem> {
        if level == 0 || level > self.depth() {
            return Err(Error::LevelOutOfRange {
                level,
                depth: self.depth(),
            });
        }
        let tokens = self
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| if i < level { *t } else { Token::Wildcard })
            .collect();
        Ok(EncodedItem { tokens })
    }

    /// True iff `self` is a strict ancestor of `other` in the hierarchy.
    pub fn is_ancestor_of(&self, other: &EncodedItem) -> bool {
        if self.depth() != other.depth() {
            return false;
        }
        let level = self.level();
        if level >= other.level() {
            return false;
        }
        self.tokens[..level] == other.tokens[..level]
    }
}

/// Canonical text order. Header tie-breaks and report ordering both rely on
/// this matching the `Display` form exactly.
impl Ord for EncodedItem {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.tokens.iter().zip(other.tokens.iter()) {
            match a.cmp_text(b) {
                Ordering::Equal => continue,
                non_eq => return non_eq,
            }
        }
        self.tokens.len().cmp(&other.tokens.len())
    }
}

impl PartialOrd for EncodedItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EncodedItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tok) in self.tokens.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{tok}")?;
        }
        Ok(())
    }
}

impl FromStr for EncodedItem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        for part in s.split('.') {
            match part {
                "*" => tokens.push(Token::Wildcard),
                _ => {
                    let idx: u32 = part.parse().map_err(|_| Error::InvalidItem {
                        text: s.to_string(),
                        message: format!("bad token {part:?}"),
                    })?;
                    tokens.push(Token::Index(idx));
                }
            }
        }
        EncodedItem::new(tokens)
    }
}

/// The loaded taxonomy: barcode dictionary plus per-level token labels.
///
/// Immutable after `load`; shared freely across mining workers.
#[derive(Debug, Clone)]
pub struct ConceptHierarchy {
    depth: usize,
    level_names: Vec<String>,
    dictionary: HashMap<String, EncodedItem>,
    labels: HashMap<(usize, u32), String>,
}

impl ConceptHierarchy {
    /// Loads the item table from CSV rows `barcode,level1,...,levelD`.
    ///
    /// Rows sharing the same level-value tuple merge into one encoded item
    /// (one group id), so several barcodes may map to the same code. Token
    /// indices are handed out per level in first-appearance order.
    pub fn load(reader: impl BufRead) -> Result<ConceptHierarchy> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing header row".into(),
        })?;
        let header = header.map_err(|e| Error::io("<hierarchy>", e))?;
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        if columns.len() < 2 {
            return Err(Error::Parse {
                line: 1,
                message: "header must name a barcode column and at least one level".into(),
            });
        }
        let depth = columns.len() - 1;
        let level_names = columns[1..].to_vec();

        let mut token_index: Vec<HashMap<String, u32>> = vec![HashMap::new(); depth];
        let mut labels = HashMap::new();
        let mut dictionary: HashMap<String, EncodedItem> = HashMap::new();

        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::io("<hierarchy>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != depth + 1 {
                return Err(Error::RaggedRow {
                    line: line_no,
                    expected: depth + 1,
                    found: fields.len(),
                });
            }
            let barcode = fields[0].to_string();
            if barcode.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "empty barcode".into(),
                });
            }
            let mut indices = Vec::with_capacity(depth);
            for (lvl, value) in fields[1..].iter().enumerate() {
                if value.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("empty value for level {}", lvl + 1),
                    });
                }
                let next = token_index[lvl].len() as u32 + 1;
                let index = *token_index[lvl].entry(value.to_string()).or_insert(next);
                labels.entry((lvl + 1, index)).or_insert_with(|| value.to_string());
                indices.push(index);
            }
            let item = EncodedItem::atomic(&indices)?;
            match dictionary.get(&barcode) {
                Some(existing) if *existing != item => {
                    return Err(Error::ConflictingBarcode {
                        barcode,
                        line: line_no,
                    });
                }
                _ => {
                    dictionary.insert(barcode, item);
                }
            }
        }

        Ok(ConceptHierarchy {
            depth,
            level_names,
            dictionary,
            labels,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level_names(&self) -> &[String] {
        &self.level_names
    }

    /// Leaf encoding for a barcode.
    pub fn encode(&self, barcode: &str) -> Result<EncodedItem> {
        self.dictionary
            .get(barcode)
            .cloned()
            .ok_or_else(|| Error::UnknownBarcode(barcode.to_string()))
    }

    /// Human-readable label of one token, if the level value was seen at load.
    pub fn label(&self, level: usize, index: u32) -> Option<&str> {
        self.labels.get(&(level, index)).map(String::as_str)
    }

    pub fn barcode_count(&self) -> usize {
        self.dictionary.len()
    }

    /// Distinct leaf items (group ids), sorted canonically.
    pub fn leaf_items(&self) -> Vec<EncodedItem> {
        let mut items: Vec<EncodedItem> = self.dictionary.values().cloned().collect();
        items.sort();
        items.dedup();
        items
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(s: &str) -> EncodedItem {
        s.parse().unwrap()
    }

    #[test]
    fn load_assigns_indices_in_first_appearance_order() {
        let csv = "barcode,category,brand,content\n20005,milk,fatfree,organic\n";
        let h = ConceptHierarchy::load(Cursor::new(csv)).unwrap();
        assert_eq!(h.depth(), 3);
        assert_eq!(h.encode("20005").unwrap(), parse("1.1.1"));
        assert_eq!(h.label(1, 1), Some("milk"));
    }

    #[test]
    fn identical_tuples_share_one_encoded_item() {
        let csv = "barcode,a,b,c\n1,x,y,z\n2,x,y,z\n3,x,y,w\n";
        let h = ConceptHierarchy::load(Cursor::new(csv)).unwrap();
        assert_eq!(h.encode("1").unwrap(), h.encode("2").unwrap());
        assert_ne!(h.encode("1").unwrap(), h.encode("3").unwrap());
        assert_eq!(h.barcode_count(), 3);
        assert_eq!(h.leaf_items().len(), 2);
    }

    #[test]
    fn empty_table_loads_but_cannot_encode() {
        let csv = "barcode,a,b\n";
        let h = ConceptHierarchy::load(Cursor::new(csv)).unwrap();
        assert_eq!(h.barcode_count(), 0);
        assert!(matches!(h.encode("1"), Err(Error::UnknownBarcode(_))));
    }

    #[test]
    fn conflicting_barcode_is_an_error() {
        let csv = "barcode,a,b\n1,x,y\n1,x,z\n";
        let err = ConceptHierarchy::load(Cursor::new(csv)).unwrap_err();
        assert!(matches!(err, Error::ConflictingBarcode { .. }));
    }

    #[test]
    fn duplicate_row_with_same_values_is_fine() {
        let csv = "barcode,a,b\n1,x,y\n1,x,y\n";
        let h = ConceptHierarchy::load(Cursor::new(csv)).unwrap();
        assert_eq!(h.barcode_count(), 1);
    }

    #[test]
    fn ragged_row_reports_line_number() {
        let csv = "barcode,a,b\n1,x\n";
        let err = ConceptHierarchy::load(Cursor::new(csv)).unwrap_err();
        match err {
            Error::RaggedRow { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn values_are_trimmed_but_not_case_folded() {
        let csv = "barcode,a,b\n1, x ,y\n2,x,y\n3,X,y\n";
        let h = ConceptHierarchy::load(Cursor::new(csv)).unwrap();
        assert_eq!(h.encode("1").unwrap(), h.encode("2").unwrap());
        assert_ne!(h.encode("1").unwrap(), h.encode("3").unwrap());
    }

    #[test]
    fn generalize_truncates_to_level() {
        assert_eq!(parse("1.2.1").generalize(1).unwrap(), parse("1.*.*"));
        assert_eq!(parse("1.2.1").generalize(3).unwrap(), parse("1.2.1"));
        assert_eq!(parse("1.*.*").generalize(2).unwrap(), parse("1.*.*"));
        assert!(parse("1.2.1").generalize(0).is_err());
        assert!(parse("1.2.1").generalize(4).is_err());
    }

    #[test]
    fn ancestor_is_strict_and_directional() {
        assert!(parse("1.*.*").is_ancestor_of(&parse("1.2.1")));
        assert!(!parse("1.2.1").is_ancestor_of(&parse("1.*.*")));
        assert!(!parse("2.*.*").is_ancestor_of(&parse("1.2.1")));
        assert!(!parse("1.2.1").is_ancestor_of(&parse("1.2.1")));
    }

    #[test]
    fn item_text_roundtrip() {
        for text in ["1.2.1", "1.*.*", "10.2.*", "3.1.1"] {
            assert_eq!(parse(text).to_string(), text);
        }
    }

    #[test]
    fn rejects_malformed_items() {
        assert!("*.1.1".parse::<EncodedItem>().is_err());
        assert!("1.*.1".parse::<EncodedItem>().is_err());
        assert!("0.1.1".parse::<EncodedItem>().is_err());
        assert!("1.x.1".parse::<EncodedItem>().is_err());
    }

    #[test]
    fn ordering_matches_canonical_text() {
        let mut items = vec![parse("2.1.1"), parse("10.1.1"), parse("1.*.*"), parse("1.1.1")];
        items.sort();
        let texts: Vec<String> = items.iter().map(|i| i.to_string()).collect();
        let mut by_text = texts.clone();
        by_text.sort();
        assert_eq!(texts, by_text);
    }

    #[test]
    fn level_counts_concrete_tokens() {
        assert_eq!(parse("1.2.1").level(), 3);
        assert_eq!(parse("1.2.*").level(), 2);
        assert_eq!(parse("1.*.*").level(), 1);
    }
}
