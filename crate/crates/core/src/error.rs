use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WorldError {
    #[error("invalid world configuration: {0}")]
    InvalidConfig(String),
    #[error("could not place objects without contact after {attempts} attempts")]
    Placement { attempts: usize },
}

#[derive(Debug, Error, PartialEq)]
pub enum BotError {
    #[error("no feasible scenario in this world")]
    Infeasible,
    #[error("no feasible world found after {0} attempts")]
    RetriesExhausted(usize),
    #[error(transparent)]
    World(#[from] WorldError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("unknown token id {0}")]
    UnknownTokenId(u32),
    #[error("sentence has {0} tokens, the maximum is 8")]
    TooLong(usize),
    #[error("malformed sentence: {0}")]
    Malformed(String),
    #[error("invalid combination: {0}")]
    InvalidCombination(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("feature buffer has {got} values, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("object {object} has no valid one-hot type encoding")]
    BadType { object: usize },
    #[error("episode length {0} is outside 2..=64")]
    Length(usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("no hard negative exists for `{0}` in this trace")]
    NoHardNegative(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("vocabulary hash mismatch: file has {found}, this build has {expected}")]
    VocabularyMismatch { found: String, expected: String },
    #[error("corrupt record at line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error("checksum mismatch: recorded {recorded}, computed {computed}")]
    Checksum { recorded: String, computed: String },
    #[error("file is truncated: {0}")]
    Truncated(String),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Bot(#[from] BotError),
}

impl DatasetError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DatasetError::Io { path: path.into(), source }
    }
}
