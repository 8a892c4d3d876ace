//! Sentence-per-line corpora and surface word counts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Language {
    En,
    Fr,
    De,
    Other(String),
}

impl Language {
    pub fn code(&self) -> &str {
        match self {
            Language::En => "en",
            Language::Fr => "fr",
            Language::De => "de",
            Language::Other(code) => code,
        }
    }
}

impl FromStr for Language {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.to_lowercase().as_str() {
            "en" => Language::En,
            "fr" => Language::Fr,
            "de" => Language::De,
            other => Language::Other(other.to_string()),
        })
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for Language {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for Language {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(s.parse().unwrap_or_else(|never| match never {}))
    }
}

/// How surface forms are case-folded at load time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseMode {
    #[default]
    Lower,
    Preserve,
}

impl CaseMode {
    pub fn apply(self, token: &str) -> String {
        match self {
            CaseMode::Lower => token.to_lowercase(),
            CaseMode::Preserve => token.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<String>,
    pub is_interrogative: bool,
}

impl Sentence {
    /// Builds a sentence from a raw line. Returns `None` for blank lines.
    pub fn from_line(line: &str, case: CaseMode) -> Option<Sentence> {
        let trimmed = line.trim_end();
        let is_interrogative = trimmed.ends_with('?');
        let tokens: Vec<String> = trimmed.split_whitespace().map(|t| case.apply(t)).collect();
        if tokens.is_empty() {
            return None;
        }
        Some(Sentence {
            tokens,
            is_interrogative,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub id: String,
    pub language: Language,
    pub sentences: Vec<Sentence>,
}

impl Corpus {
    pub fn from_text(id: impl Into<String>, language: Language, text: &str, case: CaseMode) -> Corpus {
        Corpus {
            id: id.into(),
            language,
            sentences: text.lines().filter_map(|l| Sentence::from_line(l, case)).collect(),
        }
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Loads a UTF-8 corpus with one sentence per line. Blank lines are skipped and
/// invalid UTF-8 is reported with its 1-based line number.
pub fn load_corpus(
    path: impl AsRef<Path>,
    id: impl Into<String>,
    language: Language,
    case: CaseMode,
) -> Result<Corpus> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut sentences = Vec::new();
    for (idx, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line = std::str::from_utf8(raw).map_err(|_| Error::InvalidUtf8 {
            path: path.to_path_buf(),
            line: idx + 1,
        })?;
        if let Some(s) = Sentence::from_line(line, case) {
            sentences.push(s);
        }
    }
    Ok(Corpus {
        id: id.into(),
        language,
        sentences,
    })
}

/// Exact surface-form counts, iterated in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FreqTable(BTreeMap<String, u64>);

impl FreqTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, form: &str, n: u64) {
        *self.0.entry(form.to_string()).or_default() += n;
    }

    pub fn get(&self, form: &str) -> u64 {
        self.0.get(form).copied().unwrap_or(0)
    }

    pub fn contains(&self, form: &str) -> bool {
        self.get(form) > 0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn merge(&mut self, other: &FreqTable) {
        for (form, n) in other.iter() {
            self.add(form, n);
        }
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&str) -> bool) {
        self.0.retain(|k, _| keep(k));
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (form, n) in self.iter() {
            out.push_str(form);
            out.push('\t');
            out.push_str(&n.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<FreqTable> {
        let mut table = FreqTable::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (form, count) = line.split_once('\t').ok_or_else(|| {
                Error::InvalidParameter(format!("frequency line {}: expected form<TAB>count", idx + 1))
            })?;
            let count: u64 = count.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("frequency line {}: bad count {count:?}", idx + 1))
            })?;
            table.add(form, count);
        }
        Ok(table)
    }

    pub fn load_tsv(path: impl AsRef<Path>) -> Result<FreqTable> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        FreqTable::from_tsv(&text)
    }
}

impl FromIterator<(String, u64)> for FreqTable {
    fn from_iter<I: IntoIterator<Item = (String, u64)>>(iter: I) -> Self {
        let mut t = FreqTable::new();
        for (k, v) in iter {
            t.add(&k, v);
        }
        t
    }
}

pub fn word_frequencies(corpus: &Corpus) -> FreqTable {
    let mut table = FreqTable::new();
    for s in &corpus.sentences {
        for t in &s.tokens {
            table.add(t, 1);
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(bytes: &[u8]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(bytes).unwrap();
        f
    }

    #[test]
    fn loads_single_sentence() {
        let f = write_tmp(b"The cat runs .\n");
        let c = load_corpus(f.path(), "t", Language::En, CaseMode::Lower).unwrap();
        assert_eq!(c.sentences.len(), 1);
        assert_eq!(c.sentences[0].tokens, ["the", "cat", "runs", "."]);
        assert!(!c.sentences[0].is_interrogative);
    }

    #[test]
    fn blank_lines_skipped_and_questions_flagged() {
        let f = write_tmp(b"Is it ?\n\nok .\n");
        let c = load_corpus(f.path(), "t", Language::En, CaseMode::Lower).unwrap();
        assert_eq!(c.sentences.len(), 2);
        assert!(c.sentences[0].is_interrogative);
        assert!(!c.sentences[1].is_interrogative);
    }

    #[test]
    fn no_deduplication() {
        let f = write_tmp(b"a b\na b\na b\n");
        let c = load_corpus(f.path(), "t", Language::En, CaseMode::Lower).unwrap();
        assert_eq!(c.sentences.len(), 3);
        assert!(c.sentences.iter().all(|s| s.tokens == ["a", "b"]));
    }

    #[test]
    fn trailing_whitespace_after_question_mark() {
        let s = Sentence::from_line("where is it?  \t", CaseMode::Lower).unwrap();
        assert!(s.is_interrogative);
        assert_eq!(s.tokens, ["where", "is", "it?"]);
    }

    #[test]
    fn invalid_utf8_reports_line() {
        let f = write_tmp(b"ok .\nfine .\nbad \xff\n");
        let err = load_corpus(f.path(), "t", Language::En, CaseMode::Lower).unwrap_err();
        match err {
            Error::InvalidUtf8 { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_corpus("/nonexistent/corpus.txt", "t", Language::En, CaseMode::Lower).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn preserve_case() {
        let c = Corpus::from_text("t", Language::De, "Der Hund bellt .", CaseMode::Preserve);
        assert_eq!(c.sentences[0].tokens[1], "Hund");
    }

    #[test]
    fn counts_words() {
        let c = Corpus::from_text("t", Language::En, "the cat the", CaseMode::Lower);
        let f = word_frequencies(&c);
        assert_eq!(f.get("the"), 2);
        assert_eq!(f.get("cat"), 1);
        assert_eq!(f.len(), 2);
        assert_eq!(f.to_tsv(), "cat\t1\nthe\t2\n");
    }

    #[test]
    fn tsv_roundtrip() {
        let c = Corpus::from_text("t", Language::En, "b a c a\nd", CaseMode::Lower);
        let f = word_frequencies(&c);
        assert_eq!(FreqTable::from_tsv(&f.to_tsv()).unwrap(), f);
        assert!(FreqTable::from_tsv("x\tnope\n").is_err());
    }

    #[test]
    fn language_codes() {
        assert_eq!("DE".parse::<Language>().unwrap(), Language::De);
        assert_eq!("nl".parse::<Language>().unwrap(), Language::Other("nl".into()));
        assert_eq!(serde_json::to_string(&Language::Fr).unwrap(), "\"fr\"");
    }
}
