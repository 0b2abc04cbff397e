use thiserror::Error;

/// Errors produced by loading, encoding, mining and rule confirmation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("barcode {barcode} appears twice with conflicting level values (line {line})")]
    ConflictingBarcode { barcode: String, line: usize },

    #[error("line {line}: expected {expected} columns, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown barcode: {0}")]
    UnknownBarcode(String),

    #[error("invalid level {level}: must be between 1 and {depth}")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error("invalid encoded item {text}: {message}")]
    InvalidItem { text: String, message: String },

    #[error("item not found: {0}")]
    ItemNotFound(String),

    #[error("no mining result available for level {0}")]
    MissingLevelResult(usize),

    #[error("rule item {0} is absent from every level tree")]
    UnknownRuleItem(String),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("verification mismatch: {0}")]
    VerifyMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
