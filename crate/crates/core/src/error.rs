use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: invalid UTF-8")]
    InvalidUtf8 { path: PathBuf, line: usize },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("line {line}: malformed annotation: {reason}")]
    MalformedAnnotation { line: usize, reason: String },

    #[error("empty corpus{0}")]
    EmptyCorpus(&'static str),

    #[error("vocab size {requested} is smaller than the base alphabet ({alphabet} symbols)")]
    VocabTooSmall { requested: usize, alphabet: usize },

    #[error("character {ch:?} in word {word:?} is not in the tokenizer alphabet")]
    UnknownSymbol { ch: char, word: String },

    #[error("word {0:?} contains the reserved beginning-of-word marker")]
    ReservedMarker(String),

    #[error("invalid tokenizer model: {0}")]
    InvalidModel(String),

    #[error("id {id} out of range (vocabulary of {size})")]
    IdOutOfRange { id: u32, size: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frequency must be at least 1, got {0}")]
    InvalidFrequency(u64),

    #[error("lexicon validation failed: {0}")]
    Lexicon(String),

    #[error("benchmark generation: {0}")]
    Generation(String),

    #[error("score record {pair_id}/{variant}: {reason}")]
    InvalidRecord {
        pair_id: String,
        variant: String,
        reason: String,
    },

    #[error("missing score record for {pair_id}/{variant}")]
    MissingVariant { pair_id: String, variant: String },

    #[error("empty result set")]
    EmptyResults,

    #[error("missing frequency for {0:?}")]
    MissingFrequency(String),

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("need {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("manifest: {0}")]
    Manifest(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}
