use thiserror::Error;

/// A value, identifier or configuration broke one of its invariants.
///
/// Paths use `.` between record keys and `[i]` for list indices; the empty
/// path is the root.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("non-finite number at `{path}`")]
    NonFinite { path: String },
    #[error("empty record key in `{path}`")]
    EmptyKey { path: String },
    #[error("duplicate record key at `{path}`")]
    DuplicateKey { path: String },
    #[error("cyclic reference at `{path}`")]
    Cycle { path: String },
    #[error("expected a record at `{path}`")]
    NotARecord { path: String },
    #[error("{0} must not be empty")]
    EmptyId(&'static str),
    #[error("duplicate agent id `{0}`")]
    DuplicateAgent(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Malformed JSON text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at line {line} column {column}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<serde_json::Error> for ParseError {
    fn from(err: serde_json::Error) -> Self {
        let full = err.to_string();
        // serde_json appends " at line L column C"; keep only the message
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_owned(),
            None => full,
        };
        ParseError {
            line: err.line(),
            column: err.column(),
            message,
        }
    }
}
