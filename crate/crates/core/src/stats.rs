//! Descriptive corpus statistics: token counts, sentence length, n-gram
//! type/token ratios and the share of interrogative sentences.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, FreqTable};
use crate::error::{Error, Result};

/// Orders reported by [`compute_stats`].
pub const TTR_ORDERS: [usize; 3] = [1, 2, 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PunctuationPolicy {
    Include,
    #[default]
    Exclude,
}

/// Which tokens count as punctuation.
#[derive(Debug, Clone, Default)]
pub enum PunctuationSet {
    /// Tokens made up entirely of characters in the Unicode `P*` categories.
    #[default]
    Unicode,
    Custom(BTreeSet<String>),
}

fn unicode_punct() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\p{P}+$").expect("static regex"))
}

impl PunctuationSet {
    pub fn custom<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        PunctuationSet::Custom(tokens.into_iter().map(Into::into).collect())
    }

    pub fn is_punct(&self, token: &str) -> bool {
        match self {
            PunctuationSet::Unicode => unicode_punct().is_match(token),
            PunctuationSet::Custom(set) => set.contains(token),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub token_count: u64,
    pub sentence_count: u64,
    pub avg_sentence_length: f64,
    /// Keyed by n; an order is absent when the corpus has no n-gram of that length.
    pub ttr: BTreeMap<usize, f64>,
    pub interrogative_fraction: f64,
}

/// Flat JSON shape of [`CorpusStats`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsJson {
    pub token_count: u64,
    pub avg_sentence_length: f64,
    pub ttr_1: Option<f64>,
    pub ttr_2: Option<f64>,
    pub ttr_3: Option<f64>,
    pub interrogative_fraction: f64,
}

impl CorpusStats {
    pub fn to_json(&self) -> StatsJson {
        StatsJson {
            token_count: self.token_count,
            avg_sentence_length: self.avg_sentence_length,
            ttr_1: self.ttr.get(&1).copied(),
            ttr_2: self.ttr.get(&2).copied(),
            ttr_3: self.ttr.get(&3).copied(),
            interrogative_fraction: self.interrogative_fraction,
        }
    }
}

/// Integer tallies that merge associatively; ratios are derived once at the end.
#[derive(Debug, Default)]
struct Tally<'a> {
    tokens: u64,
    sentences: u64,
    interrogative: u64,
    all_sentences: u64,
    ngram_totals: [u64; 3],
    ngram_types: [HashSet<&'a [String]>; 3],
}

pub fn compute_stats(
    corpus: &Corpus,
    policy: PunctuationPolicy,
    punct: &PunctuationSet,
) -> Result<CorpusStats> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus(""));
    }
    let kept: Vec<Vec<String>> = corpus
        .sentences
        .iter()
        .map(|s| match policy {
            PunctuationPolicy::Include => s.tokens.clone(),
            PunctuationPolicy::Exclude => {
                s.tokens.iter().filter(|t| !punct.is_punct(t)).cloned().collect()
            }
        })
        .collect();

    let mut tally = Tally::default();
    for (sentence, tokens) in corpus.sentences.iter().zip(&kept) {
        tally.all_sentences += 1;
        tally.interrogative += u64::from(sentence.is_interrogative);
        if tokens.is_empty() {
            continue;
        }
        tally.sentences += 1;
        tally.tokens += tokens.len() as u64;
        for (slot, n) in TTR_ORDERS.iter().enumerate() {
            for gram in tokens.windows(*n) {
                tally.ngram_totals[slot] += 1;
                tally.ngram_types[slot].insert(gram);
            }
        }
    }
    if tally.tokens == 0 {
        return Err(Error::EmptyCorpus(" after punctuation removal"));
    }

    let mut ttr = BTreeMap::new();
    for (slot, n) in TTR_ORDERS.iter().enumerate() {
        if tally.ngram_totals[slot] > 0 {
            ttr.insert(
                *n,
                tally.ngram_types[slot].len() as f64 / tally.ngram_totals[slot] as f64,
            );
        }
    }
    Ok(CorpusStats {
        token_count: tally.tokens,
        sentence_count: tally.sentences,
        avg_sentence_length: tally.tokens as f64 / tally.sentences as f64,
        ttr,
        interrogative_fraction: tally.interrogative as f64 / tally.all_sentences as f64,
    })
}

/// Word frequencies with the same punctuation handling as [`compute_stats`].
pub fn content_frequencies(freqs: &FreqTable, policy: PunctuationPolicy, punct: &PunctuationSet) -> FreqTable {
    let mut out = freqs.clone();
    if policy == PunctuationPolicy::Exclude {
        out.retain(|t| !punct.is_punct(t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{word_frequencies, CaseMode, Language};
    use proptest::prelude::*;

    fn corpus(text: &str) -> Corpus {
        Corpus::from_text("t", Language::En, text, CaseMode::Lower)
    }

    fn stats(text: &str) -> CorpusStats {
        compute_stats(&corpus(text), PunctuationPolicy::Exclude, &PunctuationSet::Unicode).unwrap()
    }

    #[test]
    fn abab_ttr() {
        let s = stats("a b a b");
        assert_eq!(s.ttr[&1], 0.5);
        assert_eq!(s.ttr[&2], 2.0 / 3.0);
        assert_eq!(s.ttr[&3], 1.0);
        assert_eq!(s.token_count, 4);
        assert_eq!(s.avg_sentence_length, 4.0);
    }

    #[test]
    fn single_token_has_no_bigrams() {
        let s = stats("x");
        assert_eq!(s.ttr[&1], 1.0);
        assert!(!s.ttr.contains_key(&2));
        assert!(!s.ttr.contains_key(&3));
        let j = s.to_json();
        assert_eq!(j.ttr_2, None);
    }

    #[test]
    fn ngrams_stay_inside_sentences() {
        // Cross-sentence bigrams would add (b, c); within-sentence counting has 2 bigrams.
        let s = stats("a b\nc d");
        assert_eq!(s.ttr[&2], 1.0);
        assert!(!s.ttr.contains_key(&3));
    }

    #[test]
    fn punctuation_excluded_by_default() {
        let s = stats("hello , world !\nwhat ?");
        assert_eq!(s.token_count, 3);
        assert_eq!(s.interrogative_fraction, 0.5);
        let inc = compute_stats(
            &corpus("hello , world !\nwhat ?"),
            PunctuationPolicy::Include,
            &PunctuationSet::Unicode,
        )
        .unwrap();
        assert_eq!(inc.token_count, 6);
    }

    #[test]
    fn unicode_punctuation_category() {
        let p = PunctuationSet::Unicode;
        for t in [".", "«", "»", "—", "¿", "...", "„"] {
            assert!(p.is_punct(t), "{t}");
        }
        for t in ["a", "l'", "3", "+"] {
            assert!(!p.is_punct(t), "{t}");
        }
    }

    #[test]
    fn custom_punctuation_set() {
        let c = corpus("a x b");
        let s = compute_stats(&c, PunctuationPolicy::Exclude, &PunctuationSet::custom(["x"])).unwrap();
        assert_eq!(s.token_count, 2);
    }

    #[test]
    fn all_punctuation_is_error() {
        let err = compute_stats(&corpus(". ?\n!"), PunctuationPolicy::Exclude, &PunctuationSet::Unicode);
        assert!(matches!(err, Err(Error::EmptyCorpus(_))));
        let err = compute_stats(&corpus(""), PunctuationPolicy::Exclude, &PunctuationSet::Unicode);
        assert!(matches!(err, Err(Error::EmptyCorpus(_))));
    }

    #[test]
    fn all_questions() {
        let s = stats("is it ?\nwho is that ?\nreally ?");
        assert_eq!(s.interrogative_fraction, 1.0);
    }

    fn arb_corpus() -> impl Strategy<Value = Vec<Vec<String>>> {
        prop::collection::vec(
            prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", ".", "?"]), 1..8)
                .prop_map(|v| v.into_iter().map(String::from).collect::<Vec<_>>())
                .prop_filter("needs a word", |v| v.iter().any(|t| t != "." && t != "?")),
            1..20,
        )
    }

    fn to_text(sents: &[Vec<String>]) -> String {
        sents.iter().map(|s| s.join(" ")).collect::<Vec<_>>().join("\n")
    }

    proptest! {
        #[test]
        fn duplicating_halves_ttr(sents in arb_corpus()) {
            let once = stats(&to_text(&sents));
            let mut doubled = sents.clone();
            doubled.extend(sents.iter().cloned());
            let twice = stats(&to_text(&doubled));
            for (n, v) in &once.ttr {
                prop_assert!((twice.ttr[n] - v / 2.0).abs() < 1e-15);
            }
            prop_assert_eq!(twice.avg_sentence_length, once.avg_sentence_length);
        }

        #[test]
        fn permutation_invariant(sents in arb_corpus(), seed in any::<u64>()) {
            let a = stats(&to_text(&sents));
            let mut shuffled = sents.clone();
            let len = shuffled.len();
            for i in (1..len).rev() {
                let j = (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) % (i as u64 + 1)) as usize;
                shuffled.swap(i, j);
            }
            let b = stats(&to_text(&shuffled));
            prop_assert_eq!(a, b);
        }

        #[test]
        fn frequencies_sum_to_token_count(sents in arb_corpus()) {
            let c = corpus(&to_text(&sents));
            let s = compute_stats(&c, PunctuationPolicy::Exclude, &PunctuationSet::Unicode).unwrap();
            let f = content_frequencies(&word_frequencies(&c), PunctuationPolicy::Exclude, &PunctuationSet::Unicode);
            prop_assert_eq!(f.total(), s.token_count);
            let s = compute_stats(&c, PunctuationPolicy::Include, &PunctuationSet::Unicode).unwrap();
            prop_assert_eq!(word_frequencies(&c).total(), s.token_count);
        }

        #[test]
        fn ttr_in_unit_interval(sents in arb_corpus()) {
            let s = stats(&to_text(&sents));
            for v in s.ttr.values() {
                prop_assert!(*v > 0.0 && *v <= 1.0);
            }
        }
    }
}
