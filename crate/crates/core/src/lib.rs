//! Frequency-controlled subject–verb agreement evaluation.
//!
//! The crate covers the whole evaluation loop:
//!
//! - [`corpus`] and [`stats`]: load sentence-per-line corpora, count words, and
//!   compute type/token ratios, sentence lengths and interrogative proportions.
//! - [`tokenizer`]: a character-level BPE with beginning-of-word marking.
//! - [`ngram`]: an interpolated Kneser–Ney model used as the built-in scorer.
//! - [`annotation`] and [`lexicon`]: shared vocabulary, morphological candidate
//!   filtering, logarithmic frequency binning and validation of curated picks.
//! - [`benchgen`]: template-driven generation of the seven agreement paradigms.
//! - [`scoring`]: word scores from token records (BOW-corrected causal and
//!   within-word PLL), ΔP per pair and accuracy reports.
//! - [`analysis`]: z-scored OLS of ΔP on log frequencies and the R²/accuracy
//!   correlation.

pub mod analysis;
pub mod annotation;
pub mod benchgen;
pub mod corpus;
pub mod error;
pub mod jsonl;
pub mod lexicon;
pub mod manifest;
pub mod ngram;
pub mod scoring;
pub mod stats;
pub mod tokenizer;

pub use analysis::{CorrelationResult, RegressionFit, RegressionRow};
pub use benchgen::{AuxLex, MinimalPair, Paradigm};
pub use corpus::{CaseMode, Corpus, FreqTable, Language, Sentence};
pub use error::{Error, Result};
pub use lexicon::{BinSpec, LexEntry, Lexicon};
pub use ngram::NgramModel;
pub use scoring::{EvalReport, PairResult, Region, ScoreMode, ScoreRecord};
pub use stats::{CorpusStats, PunctuationPolicy, PunctuationSet};
pub use tokenizer::{BpeModel, TokenizedSentence};
