//! Character-level byte-pair encoding with beginning-of-word (BOW) marking.
//!
//! Every word starts as a sequence of characters whose first symbol carries the
//! BOW marker (`▁c`, `a`, `t`). Training greedily merges the most frequent
//! adjacent pair, breaking ties by the lexicographically smaller pair, so the
//! merge list is fully determined by the corpus and the vocabulary size. There
//! is no byte fallback: characters outside the trained alphabet are an error.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Sentence};
use crate::error::{Error, Result};

pub const DEFAULT_VOCAB_SIZE: usize = 8192;
pub const BOW_MARKER: &str = "\u{2581}";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subword {
    pub id: u32,
    pub is_bow: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedSentence {
    pub subwords: Vec<Subword>,
    /// Half-open subword ranges, one per word.
    pub word_spans: Vec<(usize, usize)>,
}

impl TokenizedSentence {
    pub fn ids(&self) -> Vec<u32> {
        self.subwords.iter().map(|s| s.id).collect()
    }

    pub fn word_count(&self) -> usize {
        self.word_spans.len()
    }
}

/// On-disk JSON layout of a trained model.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelFile {
    vocab: Vec<String>,
    merges: Vec<(String, String)>,
    bow_marker: String,
    vocab_size: usize,
}

#[derive(Debug, Clone)]
pub struct BpeModel {
    vocab: Vec<String>,
    merges: Vec<(String, String)>,
    bow_marker: String,
    ids: HashMap<String, u32>,
    /// (left, right) -> (rank, merged id)
    ranks: HashMap<(u32, u32), (usize, u32)>,
    bow: Vec<bool>,
}

impl PartialEq for BpeModel {
    fn eq(&self, other: &Self) -> bool {
        self.vocab == other.vocab && self.merges == other.merges && self.bow_marker == other.bow_marker
    }
}

#[derive(PartialEq, Eq)]
struct Candidate {
    count: u64,
    left: String,
    right: String,
    pair: (u32, u32),
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap: higher count first, then the lexicographically smaller pair
        self.count
            .cmp(&other.count)
            .then_with(|| (&other.left, &other.right).cmp(&(&self.left, &self.right)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn word_pairs(symbols: &[u32]) -> impl Iterator<Item = (u32, u32)> + '_ {
    symbols.windows(2).map(|w| (w[0], w[1]))
}

fn merge_in_place(symbols: &mut Vec<u32>, pair: (u32, u32), merged: u32) {
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == pair.0 && symbols[i + 1] == pair.1 {
            out.push(merged);
            i += 2;
        } else {
            out.push(symbols[i]);
            i += 1;
        }
    }
    *symbols = out;
}

impl BpeModel {
    /// Trains on every token of `corpus` until the vocabulary reaches
    /// `vocab_size` symbols or no adjacent pair is left.
    pub fn train(corpus: &Corpus, vocab_size: usize) -> Result<BpeModel> {
        let mut word_counts: BTreeMap<&str, u64> = BTreeMap::new();
        for s in &corpus.sentences {
            for t in &s.tokens {
                *word_counts.entry(t.as_str()).or_default() += 1;
            }
        }
        Self::train_from_counts(&word_counts, vocab_size)
    }

    pub fn train_from_counts(word_counts: &BTreeMap<&str, u64>, vocab_size: usize) -> Result<BpeModel> {
        let marker = BOW_MARKER.to_string();
        let mut alphabet = BTreeSet::new();
        for word in word_counts.keys() {
            if word.contains(BOW_MARKER) {
                return Err(Error::ReservedMarker(word.to_string()));
            }
            for ch in word.chars() {
                alphabet.insert(ch.to_string());
                alphabet.insert(format!("{marker}{ch}"));
            }
        }
        if vocab_size < alphabet.len() {
            return Err(Error::VocabTooSmall {
                requested: vocab_size,
                alphabet: alphabet.len(),
            });
        }

        let mut vocab: Vec<String> = alphabet.into_iter().collect();
        let mut ids: HashMap<String, u32> =
            vocab.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();

        let mut words: Vec<(Vec<u32>, u64)> = word_counts
            .iter()
            .map(|(w, &n)| {
                let syms = w
                    .chars()
                    .enumerate()
                    .map(|(i, ch)| {
                        let key = if i == 0 { format!("{marker}{ch}") } else { ch.to_string() };
                        ids[&key]
                    })
                    .collect();
                (syms, n)
            })
            .collect();

        let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
        let mut locations: HashMap<(u32, u32), BTreeSet<usize>> = HashMap::new();
        for (idx, (syms, n)) in words.iter().enumerate() {
            for p in word_pairs(syms) {
                *pair_counts.entry(p).or_default() += n;
                locations.entry(p).or_default().insert(idx);
            }
        }

        let candidate = |pair: (u32, u32), count: u64, vocab: &[String]| Candidate {
            count,
            left: vocab[pair.0 as usize].clone(),
            right: vocab[pair.1 as usize].clone(),
            pair,
        };
        let mut heap: BinaryHeap<Candidate> = pair_counts
            .iter()
            .map(|(&p, &c)| candidate(p, c, &vocab))
            .collect();

        let mut merges = Vec::new();
        while vocab.len() < vocab_size {
            let Some(top) = heap.pop() else { break };
            let current = pair_counts.get(&top.pair).copied().unwrap_or(0);
            if current == 0 {
                continue;
            }
            if current != top.count {
                heap.push(candidate(top.pair, current, &vocab));
                continue;
            }

            let merged_str = format!("{}{}", top.left, top.right);
            let merged = match ids.get(&merged_str) {
                Some(&id) => id,
                None => {
                    let id = vocab.len() as u32;
                    vocab.push(merged_str.clone());
                    ids.insert(merged_str, id);
                    id
                }
            };
            merges.push((top.left.clone(), top.right.clone()));

            let affected: Vec<usize> = locations
                .get(&top.pair)
                .map(|s| s.iter().copied().collect())
                .unwrap_or_default();
            let mut touched: BTreeSet<(u32, u32)> = BTreeSet::new();
            for idx in affected {
                let (syms, n) = &mut words[idx];
                if !word_pairs(syms).any(|p| p == top.pair) {
                    continue;
                }
                for p in word_pairs(syms) {
                    let c = pair_counts.get_mut(&p).expect("pair was counted");
                    *c -= *n;
                    touched.insert(p);
                }
                merge_in_place(syms, top.pair, merged);
                for p in word_pairs(syms) {
                    *pair_counts.entry(p).or_default() += *n;
                    locations.entry(p).or_default().insert(idx);
                    touched.insert(p);
                }
            }
            for p in touched {
                let c = pair_counts.get(&p).copied().unwrap_or(0);
                if c > 0 {
                    heap.push(candidate(p, c, &vocab));
                }
            }
        }

        let file = ModelFile {
            vocab_size: vocab.len(),
            vocab,
            merges,
            bow_marker: marker,
        };
        Self::from_file(file)
    }

    fn from_file(file: ModelFile) -> Result<BpeModel> {
        if file.vocab.len() != file.vocab_size {
            return Err(Error::InvalidModel(format!(
                "vocab_size {} but {} vocab entries",
                file.vocab_size,
                file.vocab.len()
            )));
        }
        if file.bow_marker.is_empty() {
            return Err(Error::InvalidModel("empty bow_marker".into()));
        }
        let mut ids = HashMap::with_capacity(file.vocab.len());
        for (i, s) in file.vocab.iter().enumerate() {
            if ids.insert(s.clone(), i as u32).is_some() {
                return Err(Error::InvalidModel(format!("duplicate vocab entry {s:?}")));
            }
        }
        let mut ranks = HashMap::with_capacity(file.merges.len());
        for (rank, (l, r)) in file.merges.iter().enumerate() {
            let lookup = |s: &str| {
                ids.get(s)
                    .copied()
                    .ok_or_else(|| Error::InvalidModel(format!("merge symbol {s:?} not in vocab")))
            };
            let pair = (lookup(l)?, lookup(r)?);
            let merged = lookup(&format!("{l}{r}"))?;
            ranks.entry(pair).or_insert((rank, merged));
        }
        let bow = file.vocab.iter().map(|s| s.starts_with(&file.bow_marker)).collect();
        Ok(BpeModel {
            vocab: file.vocab,
            merges: file.merges,
            bow_marker: file.bow_marker,
            ids,
            ranks,
            bow,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn bow_marker(&self) -> &str {
        &self.bow_marker
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.vocab.get(id as usize).map(String::as_str)
    }

    pub fn id(&self, symbol: &str) -> Option<u32> {
        self.ids.get(symbol).copied()
    }

    /// BOW flag for every id, indexed by id.
    pub fn bow_flags(&self) -> &[bool] {
        &self.bow
    }

    pub fn encode_word(&self, word: &str) -> Result<Vec<u32>> {
        if word.contains(self.bow_marker.as_str()) {
            return Err(Error::ReservedMarker(word.to_string()));
        }
        let mut syms = Vec::with_capacity(word.len());
        for (i, ch) in word.chars().enumerate() {
            let key = if i == 0 {
                format!("{}{ch}", self.bow_marker)
            } else {
                ch.to_string()
            };
            let id = self.ids.get(&key).ok_or_else(|| Error::UnknownSymbol {
                ch,
                word: word.to_string(),
            })?;
            syms.push(*id);
        }
        loop {
            let best = word_pairs(&syms)
                .filter_map(|p| self.ranks.get(&p).map(|&(rank, merged)| (rank, p, merged)))
                .min_by_key(|&(rank, _, _)| rank);
            match best {
                Some((_, pair, merged)) => merge_in_place(&mut syms, pair, merged),
                None => break,
            }
        }
        Ok(syms)
    }

    pub fn encode_words<S: AsRef<str>>(&self, words: &[S]) -> Result<TokenizedSentence> {
        let mut subwords = Vec::new();
        for w in words {
            for id in self.encode_word(w.as_ref())? {
                subwords.push(Subword {
                    id,
                    is_bow: self.bow[id as usize],
                });
            }
        }
        let word_spans = spans_from_bow(subwords.iter().map(|s| s.is_bow));
        Ok(TokenizedSentence { subwords, word_spans })
    }

    pub fn encode(&self, sentence: &Sentence) -> Result<TokenizedSentence> {
        self.encode_words(&sentence.tokens)
    }

    /// Reassembles the words of a tokenized sentence.
    pub fn decode(&self, tokenized: &TokenizedSentence) -> Vec<String> {
        tokenized
            .word_spans
            .iter()
            .map(|&(s, e)| {
                let joined: String = tokenized.subwords[s..e]
                    .iter()
                    .map(|sw| self.vocab[sw.id as usize].as_str())
                    .collect();
                joined
                    .strip_prefix(self.bow_marker.as_str())
                    .map(str::to_string)
                    .unwrap_or(joined)
            })
            .collect()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ModelFile {
            vocab: self.vocab.clone(),
            merges: self.merges.clone(),
            bow_marker: self.bow_marker.clone(),
            vocab_size: self.vocab.len(),
        })
        .expect("model serializes")
    }

    pub fn from_json_str(text: &str) -> Result<BpeModel> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::json("tokenizer model", e))?;
        Self::from_file(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<BpeModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }
}

/// Word spans from a sequence of BOW flags: a new span opens at every BOW subword.
pub fn spans_from_bow(flags: impl IntoIterator<Item = bool>) -> Vec<(usize, usize)> {
    let mut spans: Vec<(usize, usize)> = Vec::new();
    for (i, bow) in flags.into_iter().enumerate() {
        match spans.last_mut() {
            Some(last) if !bow => last.1 = i + 1,
            _ => spans.push((i, i + 1)),
        }
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CaseMode, Language};
    use proptest::prelude::*;

    fn corpus(text: &str) -> Corpus {
        Corpus::from_text("t", Language::En, text, CaseMode::Lower)
    }

    fn alphabet_size(text: &str) -> usize {
        let chars: BTreeSet<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        chars.len() * 2
    }

    fn m(l: &str, r: &str) -> (String, String) {
        (l.to_string(), r.to_string())
    }

    #[test]
    fn single_candidate_pair_merged_first() {
        let text = "aa aa aa";
        let model = BpeModel::train(&corpus(text), alphabet_size(text) + 1).unwrap();
        assert_eq!(model.merges(), &[m("▁a", "a")]);
        assert_eq!(model.vocab_size(), alphabet_size(text) + 1);
    }

    #[test]
    fn higher_count_wins() {
        // adjacent pairs: (▁a,b) x2, (▁b,a) x1
        let text = "ab ab ba";
        let model = BpeModel::train(&corpus(text), alphabet_size(text) + 1).unwrap();
        assert_eq!(model.merges(), &[m("▁a", "b")]);
    }

    #[test]
    fn ties_break_lexicographically() {
        // (▁a,b) and (▁c,d) both occur once
        let text = "cd ab";
        let model = BpeModel::train(&corpus(text), alphabet_size(text) + 1).unwrap();
        assert_eq!(model.merges(), &[m("▁a", "b")]);
    }

    #[test]
    fn vocab_smaller_than_alphabet_rejected() {
        let err = BpeModel::train(&corpus("abc"), 3).unwrap_err();
        assert!(matches!(err, Error::VocabTooSmall { requested: 3, alphabet: 6 }));
    }

    #[test]
    fn one_char_word_is_single_bow_span() {
        let model = BpeModel::train(&corpus("a b"), 100).unwrap();
        let t = model.encode_words(&["a"]).unwrap();
        assert_eq!(t.subwords.len(), 1);
        assert!(t.subwords[0].is_bow);
        assert_eq!(t.word_spans, vec![(0, 1)]);
    }

    #[test]
    fn three_subword_word() {
        // Only the merges needed for "▁ab" + "cd" + "e" to appear, never the full word.
        let text = "ab ab ab ab cd cd cd xe";
        let model = BpeModel::train(&corpus(text), alphabet_size(text) + 2).unwrap();
        assert_eq!(model.merges(), &[m("▁a", "b"), m("▁c", "d")]);
        // "abcde": ▁a b c d e -> ▁ab c d e; (c,d) is not a merge ((▁c,d) is)
        let t = model.encode_words(&["x", "abcde"]).unwrap();
        assert_eq!(t.word_spans, vec![(0, 1), (1, 5)]);
        let t = model.encode_words(&["abe"]).unwrap();
        assert_eq!(t.word_spans, vec![(0, 2)]);
        assert_eq!(model.decode(&t), vec!["abe"]);
    }

    #[test]
    fn unknown_character_is_error() {
        let model = BpeModel::train(&corpus("abc"), 100).unwrap();
        let err = model.encode_words(&["abz"]).unwrap_err();
        assert!(matches!(err, Error::UnknownSymbol { ch: 'z', .. }));
    }

    #[test]
    fn marker_in_input_rejected() {
        assert!(matches!(
            BpeModel::train(&corpus("a\u{2581}b"), 100),
            Err(Error::ReservedMarker(_))
        ));
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let model = BpeModel::train(&corpus("the cat sat on the mat"), 40).unwrap();
        let text = serde_json::to_string(&model.to_json_value()).unwrap();
        let back = BpeModel::from_json_str(&text).unwrap();
        assert_eq!(back, model);
        let bad = r#"{"vocab":["a"],"merges":[["a","b"]],"bow_marker":"▁","vocab_size":1}"#;
        assert!(matches!(BpeModel::from_json_str(bad), Err(Error::InvalidModel(_))));
        let bad = r#"{"vocab":["a"],"merges":[],"bow_marker":"▁","vocab_size":2}"#;
        assert!(matches!(BpeModel::from_json_str(bad), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn spans_from_flags() {
        assert_eq!(spans_from_bow([true, false, true, true, false, false]), vec![(0, 2), (2, 3), (3, 6)]);
    }

    fn arb_text() -> impl Strategy<Value = String> {
        prop::collection::vec(
            prop::collection::vec("[abcdé]{1,6}", 1..6).prop_map(|w| w.join(" ")),
            1..12,
        )
        .prop_map(|lines| lines.join("\n"))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn roundtrip_and_bow_structure(text in arb_text(), extra in 0usize..40) {
            let c = corpus(&text);
            let model = BpeModel::train(&c, alphabet_size(&text) + extra).unwrap();
            for s in &c.sentences {
                let t = model.encode(s).unwrap();
                prop_assert_eq!(model.decode(&t), s.tokens.clone());
                prop_assert_eq!(t.word_spans.len(), s.tokens.len());
                prop_assert_eq!(t.subwords.iter().filter(|w| w.is_bow).count(), s.tokens.len());
                let mut expected = 0;
                for &(a, b) in &t.word_spans {
                    prop_assert_eq!(a, expected);
                    prop_assert!(t.subwords[a].is_bow);
                    prop_assert!(t.subwords[a + 1..b].iter().all(|w| !w.is_bow));
                    expected = b;
                }
                prop_assert_eq!(expected, t.subwords.len());
            }
        }

        #[test]
        fn deterministic_training(text in arb_text(), extra in 0usize..40) {
            let c = corpus(&text);
            let a = BpeModel::train(&c, alphabet_size(&text) + extra).unwrap();
            let b = BpeModel::train(&c, alphabet_size(&text) + extra).unwrap();
            prop_assert_eq!(a.to_json_value().to_string(), b.to_json_value().to_string());
        }

        #[test]
        fn larger_vocab_never_longer(text in arb_text(), small in 0usize..20, more in 0usize..20) {
            let c = corpus(&text);
            let base = alphabet_size(&text);
            let a = BpeModel::train(&c, base + small).unwrap();
            let b = BpeModel::train(&c, base + small + more).unwrap();
            prop_assert!(b.merges().starts_with(a.merges()));
            for s in &c.sentences {
                prop_assert!(b.encode(s).unwrap().subwords.len() <= a.encode(s).unwrap().subwords.len());
            }
        }
    }
}
