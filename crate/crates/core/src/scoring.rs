//! Word scores from per-token records, ΔP per minimal pair and accuracy reports.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchgen::{MinimalPair, Paradigm};
use crate::error::{Error, Result};
use crate::jsonl;
use crate::ngram::NgramModel;
use crate::tokenizer::BpeModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Gram,
    Ungram,
}

impl Variant {
    pub const BOTH: [Variant; 2] = [Variant::Gram, Variant::Ungram];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Gram => "gram",
            Variant::Ungram => "ungram",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScoreMode {
    /// Left-to-right conditionals with boundary-mass terms.
    #[serde(rename = "causal")]
    Causal,
    /// Masked-model pseudo-log-likelihood, each token predicted with itself and
    /// the rest of its word masked.
    #[serde(rename = "mlm_pll_word_l2r")]
    MlmPllWordL2r,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Sequence,
    #[default]
    Critical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenRecord {
    pub t: String,
    pub bow: bool,
    /// Natural-log conditional probability.
    pub lp: f64,
    /// log of the probability that the next token starts a word or ends the sentence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bow_mass_after: Option<f64>,
}

/// Per-token scores for one sentence variant under one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub pair_id: String,
    pub variant: Variant,
    pub mode: ScoreMode,
    pub tokens: Vec<TokenRecord>,
    /// Half-open token ranges, one per word.
    pub word_spans: Vec<[usize; 2]>,
}

impl ScoreRecord {
    fn invalid(&self, reason: impl Into<String>) -> Error {
        Error::InvalidRecord {
            pair_id: self.pair_id.clone(),
            variant: self.variant.to_string(),
            reason: reason.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tokens.is_empty() {
            return Err(self.invalid("no tokens"));
        }
        for (i, tok) in self.tokens.iter().enumerate() {
            if !tok.lp.is_finite() || tok.lp > 0.0 {
                return Err(self.invalid(format!("token {i}: logprob {} is not a finite value <= 0", tok.lp)));
            }
            match (self.mode, tok.bow_mass_after) {
                (ScoreMode::Causal, None) => {
                    return Err(self.invalid(format!("token {i}: causal records need bow_mass_after")));
                }
                (_, Some(m)) if !m.is_finite() || m > 0.0 => {
                    return Err(self.invalid(format!("token {i}: bow_mass_after {m} is not a finite value <= 0")));
                }
                _ => {}
            }
        }
        let mut next = 0;
        for [s, e] in &self.word_spans {
            if *s != next || e <= s {
                return Err(self.invalid("word spans do not partition the tokens"));
            }
            next = *e;
        }
        if next != self.tokens.len() {
            return Err(self.invalid("word spans do not partition the tokens"));
        }
        Ok(())
    }

    pub fn word_count(&self) -> usize {
        self.word_spans.len()
    }

    /// Token range covered by the half-open word range `words`.
    fn token_range(&self, words: (usize, usize)) -> Result<(usize, usize)> {
        let (ws, we) = words;
        if ws >= we {
            return Err(self.invalid("empty word span"));
        }
        if we > self.word_spans.len() {
            return Err(self.invalid(format!(
                "word span [{ws}, {we}) exceeds {} words",
                self.word_spans.len()
            )));
        }
        Ok((self.word_spans[ws][0], self.word_spans[we - 1][1]))
    }
}

/// BOW-corrected log-probability of the words in `span`: the span's token
/// log-probabilities, plus the boundary mass after its last token, minus the
/// boundary mass after the token preceding it (zero at sentence start).
pub fn word_score_causal(r: &ScoreRecord, span: (usize, usize)) -> Result<f64> {
    if r.mode != ScoreMode::Causal {
        return Err(r.invalid("boundary-corrected scoring needs a causal record"));
    }
    let (ts, te) = r.token_range(span)?;
    let mass = |i: usize| r.tokens[i].bow_mass_after.ok_or_else(|| r.invalid(format!("token {i}: missing bow_mass_after")));
    let sum: f64 = r.tokens[ts..te].iter().map(|t| t.lp).sum();
    let leading = if ts == 0 { 0.0 } else { mass(ts - 1)? };
    Ok(sum + mass(te - 1)? - leading)
}

/// Sum of the span's within-word left-to-right pseudo-log-likelihood terms.
pub fn word_score_pll(r: &ScoreRecord, span: (usize, usize)) -> Result<f64> {
    if r.mode != ScoreMode::MlmPllWordL2r {
        return Err(r.invalid("pseudo-log-likelihood scoring needs an mlm_pll_word_l2r record"));
    }
    let (ts, te) = r.token_range(span)?;
    Ok(r.tokens[ts..te].iter().map(|t| t.lp).sum())
}

pub fn word_score(r: &ScoreRecord, span: (usize, usize)) -> Result<f64> {
    match r.mode {
        ScoreMode::Causal => word_score_causal(r, span),
        ScoreMode::MlmPllWordL2r => word_score_pll(r, span),
    }
}

/// Builds a causal record for `words` from the built-in n-gram model.
pub fn ngram_record(
    tokenizer: &BpeModel,
    model: &NgramModel,
    pair_id: &str,
    variant: Variant,
    words: &[String],
) -> Result<ScoreRecord> {
    let tokenized = tokenizer.encode_words(words)?;
    if tokenized.word_count() != words.len() {
        return Err(Error::InvalidRecord {
            pair_id: pair_id.to_string(),
            variant: variant.to_string(),
            reason: format!("{} words tokenized into {} word spans", words.len(), tokenized.word_count()),
        });
    }
    let scores = model.score_tokens(&tokenized.ids())?;
    let tokens = tokenized
        .subwords
        .iter()
        .zip(scores)
        .map(|(sw, sc)| TokenRecord {
            t: tokenizer.token(sw.id).unwrap_or_default().to_string(),
            bow: sw.is_bow,
            // interpolation can overshoot 1 by an ulp
            lp: sc.logprob.min(0.0),
            bow_mass_after: Some(sc.bow_mass_after.min(0.0)),
        })
        .collect();
    Ok(ScoreRecord {
        pair_id: pair_id.to_string(),
        variant,
        mode: ScoreMode::Causal,
        tokens,
        word_spans: tokenized.word_spans.iter().map(|&(s, e)| [s, e]).collect(),
    })
}

/// Provides a score record for each sentence variant of a pair.
pub trait ScoreSource: Sync {
    fn record(&self, pair: &MinimalPair, variant: Variant) -> Result<Cow<'_, ScoreRecord>>;
}

pub struct NgramScorer<'a> {
    pub tokenizer: &'a BpeModel,
    pub model: &'a NgramModel,
}

impl ScoreSource for NgramScorer<'_> {
    fn record(&self, pair: &MinimalPair, variant: Variant) -> Result<Cow<'_, ScoreRecord>> {
        let words = match variant {
            Variant::Gram => &pair.grammatical,
            Variant::Ungram => &pair.ungrammatical,
        };
        ngram_record(self.tokenizer, self.model, &pair.pair_id, variant, words).map(Cow::Owned)
    }
}

/// Score records read from a file, keyed by pair id and variant.
#[derive(Debug, Default)]
pub struct ScoreFile {
    records: HashMap<(String, Variant), ScoreRecord>,
}

impl ScoreFile {
    pub fn from_records(records: impl IntoIterator<Item = ScoreRecord>) -> Result<ScoreFile> {
        let mut map = HashMap::new();
        for r in records {
            r.validate()?;
            let key = (r.pair_id.clone(), r.variant);
            if map.contains_key(&key) {
                return Err(r.invalid("duplicate record"));
            }
            map.insert(key, r);
        }
        Ok(ScoreFile { records: map })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ScoreFile> {
        Self::from_records(jsonl::read_jsonl::<ScoreRecord>(path)?)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl ScoreSource for ScoreFile {
    fn record(&self, pair: &MinimalPair, variant: Variant) -> Result<Cow<'_, ScoreRecord>> {
        self.records
            .get(&(pair.pair_id.clone(), variant))
            .map(Cow::Borrowed)
            .ok_or_else(|| Error::MissingVariant {
                pair_id: pair.pair_id.clone(),
                variant: variant.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub records: usize,
    pub causal: usize,
    pub pll: usize,
}

/// Schema-checks every line of a score file without a benchmark.
pub fn validate_score_file(path: impl AsRef<Path>) -> Result<ValidationSummary> {
    let path = path.as_ref();
    let mut summary = ValidationSummary::default();
    let mut seen = std::collections::HashSet::new();
    jsonl::for_each_line(path, |line, r: ScoreRecord| {
        r.validate().map_err(|e| Error::InvalidRecord {
            pair_id: r.pair_id.clone(),
            variant: r.variant.to_string(),
            reason: format!("{}:{line}: {e}", path.display()),
        })?;
        if !seen.insert((r.pair_id.clone(), r.variant)) {
            return Err(r.invalid(format!("{}:{line}: duplicate record", path.display())));
        }
        summary.records += 1;
        match r.mode {
            ScoreMode::Causal => summary.causal += 1,
            ScoreMode::MlmPllWordL2r => summary.pll += 1,
        }
        Ok(())
    })?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub pair_id: String,
    pub paradigm: Paradigm,
    pub lexicon_source: String,
    pub delta_p: f64,
    pub correct: bool,
    pub mode: ScoreMode,
    pub region: Region,
}

impl PairResult {
    pub fn new(pair: &MinimalPair, delta_p: f64, mode: ScoreMode, region: Region) -> PairResult {
        PairResult {
            pair_id: pair.pair_id.clone(),
            paradigm: pair.paradigm,
            lexicon_source: pair.lexicon_source.clone(),
            delta_p,
            // ties count as failures
            correct: delta_p > 0.0,
            mode,
            region,
        }
    }
}

fn region_span(pair: &MinimalPair, words: usize, region: Region) -> (usize, usize) {
    match region {
        Region::Sequence => (0, words),
        Region::Critical => pair.critical_span(),
    }
}

pub fn score_pair(pair: &MinimalPair, source: &dyn ScoreSource, region: Region) -> Result<PairResult> {
    let mut scores = [0.0; 2];
    let mut mode = None;
    for (slot, variant) in Variant::BOTH.into_iter().enumerate() {
        let r = source.record(pair, variant)?;
        let words = match variant {
            Variant::Gram => pair.grammatical.len(),
            Variant::Ungram => pair.ungrammatical.len(),
        };
        if r.word_count() != words {
            return Err(r.invalid(format!("{} word spans for a {words}-word sentence", r.word_count())));
        }
        if mode.is_some_and(|m| m != r.mode) {
            return Err(r.invalid("variants scored in different modes"));
        }
        mode = Some(r.mode);
        scores[slot] = word_score(&r, region_span(pair, words, region))?;
    }
    Ok(PairResult::new(pair, scores[0] - scores[1], mode.expect("two variants scored"), region))
}

/// Scores every pair in parallel; output order follows `pairs`.
pub fn score_pairs(pairs: &[MinimalPair], source: &dyn ScoreSource, region: Region) -> Result<Vec<PairResult>> {
    pairs.par_iter().map(|p| score_pair(p, source, region)).collect()
}

/// Both variant records of every pair, in benchmark order.
pub fn export_records(pairs: &[MinimalPair], source: &dyn ScoreSource) -> Result<Vec<ScoreRecord>> {
    let per: Vec<[ScoreRecord; 2]> = pairs
        .par_iter()
        .map(|p| {
            Ok([
                source.record(p, Variant::Gram)?.into_owned(),
                source.record(p, Variant::Ungram)?.into_owned(),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and sample (n−1) standard deviation; the deviation is 0 for one value.
    pub fn of(values: &[f64]) -> MeanStd {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        MeanStd { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedReport {
    pub pairs: usize,
    pub correct: usize,
    pub overall: f64,
    pub per_paradigm: BTreeMap<Paradigm, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_paradigm: BTreeMap<Paradigm, MeanStd>,
    /// Mean across seeds of each seed's pair-weighted accuracy.
    pub overall: f64,
    pub seeds: Vec<SeedReport>,
    pub mean: f64,
    pub std: f64,
}

fn seed_report(results: &[PairResult]) -> SeedReport {
    let mut counts: BTreeMap<Paradigm, (usize, usize)> = BTreeMap::new();
    for r in results {
        let c = counts.entry(r.paradigm).or_default();
        c.0 += usize::from(r.correct);
        c.1 += 1;
    }
    let correct = counts.values().map(|c| c.0).sum();
    SeedReport {
        pairs: results.len(),
        correct,
        overall: correct as f64 / results.len() as f64,
        per_paradigm: counts.into_iter().map(|(p, (c, n))| (p, c as f64 / n as f64)).collect(),
    }
}

/// Per-seed accuracies and their cross-seed mean and sample deviation.
pub fn aggregate(seeds: &[Vec<PairResult>]) -> Result<EvalReport> {
    if seeds.is_empty() || seeds.iter().any(Vec::is_empty) {
        return Err(Error::EmptyResults);
    }
    let reports: Vec<SeedReport> = seeds.iter().map(|s| seed_report(s)).collect();
    let paradigms: Vec<Paradigm> = reports[0].per_paradigm.keys().copied().collect();
    if reports.iter().any(|r| !r.per_paradigm.keys().copied().eq(paradigms.iter().copied())) {
        return Err(Error::InvalidParameter("seeds cover different paradigms".into()));
    }
    let per_paradigm = paradigms
        .iter()
        .map(|p| {
            let values: Vec<f64> = reports.iter().map(|r| r.per_paradigm[p]).collect();
            (*p, MeanStd::of(&values))
        })
        .collect();
    let overall = MeanStd::of(&reports.iter().map(|r| r.overall).collect::<Vec<_>>());
    Ok(EvalReport {
        per_paradigm,
        overall: overall.mean,
        seeds: reports,
        mean: overall.mean,
        std: overall.std,
    })
}
