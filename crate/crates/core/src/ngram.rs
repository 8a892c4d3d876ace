//! Interpolated Kneser–Ney n-gram model over subword ids.
//!
//! Ids `0..vocab_size` are tokenizer subwords, `vocab_size` is EOS and
//! `vocab_size + 1` is BOS. BOS is only ever context: every sentence is padded
//! with `order - 1` BOS symbols and terminated by EOS. The highest order uses
//! raw counts, lower orders use continuation counts, and the recursion bottoms
//! out in the uniform distribution over subwords plus EOS, so every id gets
//! strictly positive probability. All logs are natural.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_DISCOUNT: f64 = 0.75;
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Default)]
struct ContextEntry {
    total: u64,
    /// (next id, count), sorted by id
    followers: Vec<(u32, u64)>,
}

impl ContextEntry {
    fn count(&self, next: u32) -> u64 {
        self.followers
            .binary_search_by_key(&next, |&(id, _)| id)
            .map(|i| self.followers[i].1)
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct NgramModel {
    order: usize,
    discount: f64,
    vocab_size: usize,
    bow: Vec<bool>,
    /// Raw highest-order counts; everything else is derived from these.
    counts: BTreeMap<Vec<u32>, u64>,
    /// `levels[k - 1]` maps a context of length `k - 1` to its followers.
    levels: Vec<HashMap<Vec<u32>, ContextEntry>>,
    /// Discounted unigram mass of BOW ids and EOS.
    unigram_boundary_sum: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    format_version: u32,
    order: usize,
    discount: f64,
    vocab_size: usize,
    bow_ids: Vec<u32>,
    /// Each entry is the n-gram ids followed by its count.
    ngrams: Vec<Vec<u64>>,
}

/// Log-probability of one token and the boundary mass right after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenScore {
    pub logprob: f64,
    pub bow_mass_after: f64,
}

impl NgramModel {
    /// Trains on tokenized sentences. `bow[i]` marks whether subword `i` begins a word.
    pub fn train(sentences: &[Vec<u32>], bow: Vec<bool>, order: usize, discount: f64) -> Result<NgramModel> {
        Self::check_params(order, discount)?;
        let vocab_size = bow.len();
        if sentences.iter().all(Vec::is_empty) {
            return Err(Error::EmptyCorpus(" (no tokenized sentences)"));
        }
        let bos = vocab_size as u32 + 1;
        let eos = vocab_size as u32;
        let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        let mut padded = Vec::new();
        for s in sentences.iter().filter(|s| !s.is_empty()) {
            if let Some(&bad) = s.iter().find(|&&id| id as usize >= vocab_size) {
                return Err(Error::IdOutOfRange { id: bad, size: vocab_size });
            }
            padded.clear();
            padded.extend(std::iter::repeat_n(bos, order - 1));
            padded.extend_from_slice(s);
            padded.push(eos);
            for gram in padded.windows(order) {
                *counts.entry(gram.to_vec()).or_default() += 1;
            }
        }
        Ok(Self::from_counts(order, discount, bow, counts))
    }

    fn check_params(order: usize, discount: f64) -> Result<()> {
        if order == 0 {
            return Err(Error::InvalidParameter("n-gram order must be at least 1".into()));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(Error::InvalidParameter(format!("discount {discount} not in (0, 1)")));
        }
        Ok(())
    }

    fn from_counts(order: usize, discount: f64, bow: Vec<bool>, counts: BTreeMap<Vec<u32>, u64>) -> NgramModel {
        let vocab_size = bow.len();
        let mut levels: Vec<HashMap<Vec<u32>, ContextEntry>> = vec![HashMap::new(); order];

        fn add(level: &mut HashMap<Vec<u32>, ContextEntry>, gram: &[u32], c: u64) {
            let (ctx, next) = gram.split_at(gram.len() - 1);
            let e = level.entry(ctx.to_vec()).or_default();
            e.total += c;
            e.followers.push((next[0], c));
        }

        for (gram, &c) in &counts {
            add(&mut levels[order - 1], gram, c);
        }
        // Continuation counts: a k-gram's count is the number of distinct
        // (k+1)-gram types it ends.
        let mut upper: Vec<Vec<u32>> = counts.keys().cloned().collect();
        for k in (1..order).rev() {
            let mut cont: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
            for g in &upper {
                *cont.entry(g[1..].to_vec()).or_default() += 1;
            }
            for (gram, &c) in &cont {
                add(&mut levels[k - 1], gram, c);
            }
            upper = cont.into_keys().collect();
        }
        for level in &mut levels {
            for e in level.values_mut() {
                e.followers.sort_unstable_by_key(|&(id, _)| id);
            }
        }

        let mut model = NgramModel {
            order,
            discount,
            vocab_size,
            bow,
            counts,
            levels,
            unigram_boundary_sum: 0.0,
        };
        model.unigram_boundary_sum = model
            .levels[0]
            .get(&[][..])
            .map(|e| model.boundary_sum(e))
            .unwrap_or(0.0);
        model
    }

    fn boundary_sum(&self, e: &ContextEntry) -> f64 {
        e.followers
            .iter()
            .filter(|&&(id, _)| self.is_boundary(id))
            .map(|&(_, c)| (c as f64 - self.discount).max(0.0))
            .sum()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Number of tokenizer subwords (EOS and BOS not included).
    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn eos(&self) -> u32 {
        self.vocab_size as u32
    }

    pub fn bos(&self) -> u32 {
        self.vocab_size as u32 + 1
    }

    /// Ids that can be predicted: every subword plus EOS.
    pub fn outcomes(&self) -> impl Iterator<Item = u32> {
        0..=self.vocab_size as u32
    }

    pub fn is_bow(&self, id: u32) -> bool {
        self.bow.get(id as usize).copied().unwrap_or(false)
    }

    /// BOW-marked subwords and EOS: the events that end the current word.
    pub fn is_boundary(&self, id: u32) -> bool {
        id == self.eos() || self.is_bow(id)
    }

    fn check_context(&self, context: &[u32]) -> Result<()> {
        match context.iter().find(|&&id| id as usize >= self.vocab_size) {
            Some(&id) => Err(Error::IdOutOfRange { id, size: self.vocab_size }),
            None => Ok(()),
        }
    }

    /// The last `order - 1` symbols of the BOS-padded history.
    fn padded_tail(&self, context: &[u32]) -> Vec<u32> {
        let want = self.order - 1;
        let take = want.min(context.len());
        let mut tail = vec![self.bos(); want - take];
        tail.extend_from_slice(&context[context.len() - take..]);
        tail
    }

    /// Interpolates `start` (the order-0 value) up through every order whose
    /// context has been observed, with `numer` giving the discounted count term.
    fn interpolate(&self, context: &[u32], start: f64, numer: impl Fn(usize, &ContextEntry) -> f64) -> f64 {
        let tail = self.padded_tail(context);
        let mut p = start;
        for k in 1..=self.order {
            let ctx = &tail[tail.len() - (k - 1)..];
            if let Some(e) = self.levels[k - 1].get(ctx) {
                let types = e.followers.len() as f64;
                p = (numer(k, e) + self.discount * types * p) / e.total as f64;
            }
        }
        p
    }

    /// P(next | context) where `context` is the sentence prefix (no BOS).
    pub fn prob(&self, context: &[u32], next: u32) -> Result<f64> {
        self.check_context(context)?;
        if next > self.eos() {
            return Err(Error::IdOutOfRange { id: next, size: self.vocab_size + 1 });
        }
        let uniform = 1.0 / (self.vocab_size + 1) as f64;
        Ok(self.interpolate(context, uniform, |_, e| {
            (e.count(next) as f64 - self.discount).max(0.0)
        }))
    }

    pub fn token_logprob(&self, context: &[u32], next: u32) -> Result<f64> {
        Ok(self.prob(context, next)?.ln())
    }

    /// log of the total probability that the next symbol is a BOW subword or EOS.
    pub fn bow_mass_logprob(&self, context: &[u32]) -> Result<f64> {
        self.check_context(context)?;
        let boundary = self.bow.iter().filter(|&&b| b).count() + 1;
        let start = boundary as f64 / (self.vocab_size + 1) as f64;
        let p = self.interpolate(context, start, |k, e| {
            if k == 1 {
                self.unigram_boundary_sum
            } else {
                self.boundary_sum(e)
            }
        });
        Ok(p.min(1.0).ln())
    }

    /// Per-token scores of a sentence, with the boundary mass after each token.
    /// The last token's boundary mass includes EOS.
    pub fn score_tokens(&self, ids: &[u32]) -> Result<Vec<TokenScore>> {
        self.check_context(ids)?;
        (0..ids.len())
            .map(|t| {
                Ok(TokenScore {
                    logprob: self.token_logprob(&ids[..t], ids[t])?,
                    bow_mass_after: self.bow_mass_logprob(&ids[..=t])?,
                })
            })
            .collect()
    }

    /// log P(sentence, EOS).
    pub fn sentence_logprob(&self, ids: &[u32]) -> Result<f64> {
        let mut total = 0.0;
        for t in 0..ids.len() {
            total += self.token_logprob(&ids[..t], ids[t])?;
        }
        Ok(total + self.token_logprob(ids, self.eos())?)
    }

    /// Word probability computed straight from the distribution: the word's
    /// subwords followed by a word boundary, given that a word starts after
    /// `prefix`. Boundary masses are summed by enumerating the whole outcome
    /// space rather than through the cached follower sums.
    pub fn word_logprob_direct(&self, prefix: &[u32], word: &[u32]) -> Result<f64> {
        let boundary = |ctx: &[u32]| -> Result<f64> {
            let mut mass = 0.0;
            for id in self.outcomes() {
                if self.is_boundary(id) {
                    mass += self.prob(ctx, id)?;
                }
            }
            Ok(mass)
        };
        let mut ctx = prefix.to_vec();
        let mut joint = 1.0;
        for &id in word {
            joint *= self.prob(&ctx, id)?;
            ctx.push(id);
        }
        let after = boundary(&ctx)?;
        let before = if prefix.is_empty() { 1.0 } else { boundary(prefix)? };
        Ok((joint * after / before).ln())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let file = ModelFile {
            format: "minpair-ngram".into(),
            format_version: FORMAT_VERSION,
            order: self.order,
            discount: self.discount,
            vocab_size: self.vocab_size,
            bow_ids: (0..self.vocab_size as u32).filter(|&i| self.is_bow(i)).collect(),
            ngrams: self
                .counts
                .iter()
                .map(|(g, &c)| g.iter().map(|&i| u64::from(i)).chain([c]).collect())
                .collect(),
        };
        serde_json::to_value(file).expect("model serializes")
    }

    pub fn from_json_str(text: &str) -> Result<NgramModel> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::json("n-gram model", e))?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported n-gram model format version {}",
                file.format_version
            )));
        }
        Self::check_params(file.order, file.discount)?;
        let mut bow = vec![false; file.vocab_size];
        for id in file.bow_ids {
            *bow.get_mut(id as usize).ok_or(Error::IdOutOfRange { id, size: file.vocab_size })? = true;
        }
        let max_id = file.vocab_size as u64 + 1;
        let mut counts = BTreeMap::new();
        for row in file.ngrams {
            if row.len() != file.order + 1 || row[..file.order].iter().any(|&i| i > max_id) {
                return Err(Error::InvalidParameter("malformed n-gram row".into()));
            }
            counts.insert(row[..file.order].iter().map(|&i| i as u32).collect(), row[file.order]);
        }
        Ok(Self::from_counts(file.order, file.discount, bow, counts))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<NgramModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// Vocab: 0=▁a 1=b 2=▁c 3=d
    fn toy() -> (Vec<Vec<u32>>, Vec<bool>) {
        let sents = vec![vec![0, 1, 2], vec![0, 2, 3], vec![2, 3, 0, 1], vec![0, 1], vec![2, 0, 1, 2, 3]];
        (sents, vec![true, false, true, false])
    }

    fn sum_over_outcomes(m: &NgramModel, ctx: &[u32]) -> f64 {
        m.outcomes().map(|v| m.prob(ctx, v).unwrap()).sum()
    }

    #[test]
    fn rejects_bad_params() {
        let (s, b) = toy();
        assert!(NgramModel::train(&s, b.clone(), 0, 0.75).is_err());
        assert!(NgramModel::train(&s, b.clone(), 3, 1.0).is_err());
        assert!(NgramModel::train(&s, b.clone(), 3, 0.0).is_err());
        assert!(matches!(NgramModel::train(&[], b.clone(), 3, 0.5), Err(Error::EmptyCorpus(_))));
        assert!(matches!(NgramModel::train(&[vec![9]], b, 3, 0.5), Err(Error::IdOutOfRange { .. })));
    }

    #[test]
    fn repeated_bigram_peaks() {
        let sents = vec![vec![0, 1]; 5];
        let m = NgramModel::train(&sents, vec![true, false, true], 2, 0.75).unwrap();
        let pb = m.prob(&[0], 1).unwrap();
        for v in m.outcomes().filter(|&v| v != 1) {
            assert!(m.prob(&[0], v).unwrap() < pb);
        }
    }

    #[test]
    fn unigram_model_matches_smoothed_relative_frequency() {
        let (s, b) = toy();
        let m = NgramModel::train(&s, b, 1, 0.5).unwrap();
        // raw counts incl. EOS: 0:5, 1:4, 2:5, 3:3, EOS:5 ; N = 22, 5 types, |outcomes| = 5
        let counts = [5.0, 4.0, 5.0, 3.0, 5.0];
        let n: f64 = counts.iter().sum();
        for (id, c) in counts.iter().enumerate() {
            let expected = (c - 0.5) / n + 0.5 * 5.0 / n * (1.0 / 5.0);
            assert!((m.prob(&[], id as u32).unwrap() - expected).abs() < 1e-15);
            assert_eq!(m.prob(&[1, 2], id as u32).unwrap(), m.prob(&[], id as u32).unwrap());
        }
    }

    #[test]
    fn single_outcome_has_log_zero() {
        // one subword, one outcome besides EOS... with vocab_size 0 only EOS is predictable
        let m = NgramModel::train(&[vec![0]], vec![true], 2, 0.5).unwrap();
        let total: f64 = m.outcomes().map(|v| m.prob(&[0], v).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let only = NgramModel::from_counts(1, 0.5, vec![], BTreeMap::from([(vec![0u32], 3u64)]));
        assert_eq!(only.token_logprob(&[], only.eos()).unwrap(), 0.0);
    }

    /// Continuation counts and interpolation written out by hand for a bigram model.
    fn oracle_bigram(sents: &[Vec<u32>], v: usize, d: f64, ctx: u32, next: u32) -> f64 {
        let bos = v as u32 + 1;
        let eos = v as u32;
        let mut bigrams: Vec<(u32, u32)> = Vec::new();
        for s in sents {
            let mut p = vec![bos];
            p.extend(s);
            p.push(eos);
            for w in p.windows(2) {
                bigrams.push((w[0], w[1]));
            }
        }
        let types: BTreeSet<(u32, u32)> = bigrams.iter().copied().collect();
        let n1_dot = types.len() as f64;
        let cont = |w: u32| types.iter().filter(|&&(_, b)| b == w).count() as f64;
        let uni_types = (0..=v as u32).filter(|&w| cont(w) > 0.0).count() as f64;
        let p_uni = |w: u32| (cont(w) - d).max(0.0) / n1_dot + d * uni_types / n1_dot / (v as f64 + 1.0);
        let c_ctx = bigrams.iter().filter(|&&(a, _)| a == ctx).count() as f64;
        if c_ctx == 0.0 {
            return p_uni(next);
        }
        let c = bigrams.iter().filter(|&&b| b == (ctx, next)).count() as f64;
        let followers = types.iter().filter(|&&(a, _)| a == ctx).count() as f64;
        (c - d).max(0.0) / c_ctx + d * followers / c_ctx * p_uni(next)
    }

    #[test]
    fn matches_hand_built_backoff() {
        // vocab 0..5; id 4 never appears, so context [.., 4] is unseen
        let sents = vec![vec![0, 1, 2], vec![0, 2, 3], vec![2, 3, 0, 1], vec![0, 1], vec![2, 0, 1, 2, 3]];
        let bow = vec![true, false, true, false, true];
        let m = NgramModel::train(&sents, bow, 2, 0.75).unwrap();
        for ctx in [0u32, 1, 2, 3, 4] {
            for next in 0..=5u32 {
                let got = m.prob(&[ctx], next).unwrap();
                let want = oracle_bigram(&sents, 5, 0.75, ctx, next);
                assert!((got - want).abs() < 1e-14, "ctx {ctx} next {next}: {got} vs {want}");
            }
        }
        // unseen context [4]: exactly the unigram level
        for next in 0..=5u32 {
            let unigram_only = m.levels[0][&Vec::new()].clone();
            let expected = ((unigram_only.count(next) as f64 - 0.75).max(0.0)
                + 0.75 * unigram_only.followers.len() as f64 / 6.0)
                / unigram_only.total as f64;
            assert!((expected - oracle_bigram(&sents, 5, 0.75, 4, next)).abs() < 1e-15);
            assert_eq!(m.prob(&[4], next).unwrap(), expected);
        }
    }

    #[test]
    fn unseen_trigram_context_equals_bigram_value() {
        let (s, b) = toy();
        let m3 = NgramModel::train(&s, b, 3, 0.75).unwrap();
        // (d, d) never occurs as a context, so the trigram level is skipped entirely
        for next in m3.outcomes() {
            let direct = m3.prob(&[3, 3], next).unwrap();
            let tail_only = m3.interpolate(&[3], 1.0 / 5.0, |_, e| (e.count(next) as f64 - 0.75).max(0.0));
            assert_eq!(direct, tail_only);
        }
    }

    #[test]
    fn boundary_mass_cases() {
        // all subwords BOW-marked: the boundary set is every outcome
        let m = NgramModel::train(&[vec![0, 1], vec![1]], vec![true, true], 2, 0.5).unwrap();
        assert!(m.bow_mass_logprob(&[0]).unwrap().abs() < 1e-15);
        // no BOW subwords: boundary mass is P(EOS)
        let m = NgramModel::train(&[vec![0, 1], vec![1]], vec![false, false], 2, 0.5).unwrap();
        let p_eos = m.prob(&[0, 1], m.eos()).unwrap();
        assert!((m.bow_mass_logprob(&[0, 1]).unwrap() - p_eos.ln()).abs() < 1e-15);
    }

    #[test]
    fn boundary_mass_matches_enumeration() {
        let (s, b) = toy();
        let m = NgramModel::train(&s, b, 3, 0.75).unwrap();
        for ctx in [&[][..], &[0], &[0, 1], &[2, 3, 0], &[3, 3], &[1, 1, 1]] {
            let brute: f64 = m.outcomes().filter(|&v| m.is_boundary(v)).map(|v| m.prob(ctx, v).unwrap()).sum();
            assert!((m.bow_mass_logprob(ctx).unwrap() - brute.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn out_of_range_ids() {
        let (s, b) = toy();
        let m = NgramModel::train(&s, b, 3, 0.75).unwrap();
        assert!(matches!(m.prob(&[], 5), Err(Error::IdOutOfRange { .. })));
        assert!(m.prob(&[], 4).is_ok()); // EOS
        assert!(matches!(m.prob(&[4], 0), Err(Error::IdOutOfRange { .. })));
    }

    #[test]
    fn joint_mass_over_all_short_sequences() {
        // Σ P(complete sentences of length ≤ L) + Σ P(unfinished prefixes of length L+1) = 1
        let (s, b) = toy();
        let m = NgramModel::train(&s, b, 3, 0.75).unwrap();
        let mut frontier: Vec<(Vec<u32>, f64)> = vec![(vec![], 1.0)];
        let mut finished = 0.0;
        for _ in 0..4 {
            let mut next_frontier = Vec::new();
            for (prefix, p) in &frontier {
                finished += p * m.prob(prefix, m.eos()).unwrap();
                for id in 0..4u32 {
                    let mut ext = prefix.clone();
                    ext.push(id);
                    next_frontier.push((ext, p * m.prob(prefix, id).unwrap()));
                }
            }
            frontier = next_frontier;
        }
        let open: f64 = frontier.iter().map(|(_, p)| p).sum();
        assert!((finished + open - 1.0).abs() < 1e-12);
        // telescoping: the product along each path equals exp of the summed log-probs
        for (prefix, p) in frontier.iter().take(50) {
            let lp: f64 = (0..prefix.len()).map(|t| m.token_logprob(&prefix[..t], prefix[t]).unwrap()).sum();
            assert!((lp - p.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn serialization_is_deterministic_and_lossless() {
        let (s, b) = toy();
        let m = NgramModel::train(&s, b.clone(), 3, 0.75).unwrap();
        let again = NgramModel::train(&s, b, 3, 0.75).unwrap();
        let text = m.to_json_value().to_string();
        assert_eq!(text, again.to_json_value().to_string());
        let back = NgramModel::from_json_str(&text).unwrap();
        for ctx in [&[][..], &[0], &[2, 3]] {
            for v in m.outcomes() {
                assert_eq!(m.prob(ctx, v).unwrap(), back.prob(ctx, v).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn normalized_and_positive(
            order in 1usize..5,
            d in 0.05f64..0.95,
            ctx in prop::collection::vec(0u32..4, 0..6),
        ) {
            let (s, b) = toy();
            let m = NgramModel::train(&s, b, order, d).unwrap();
            let total = sum_over_outcomes(&m, &ctx);
            prop_assert!((total - 1.0).abs() < 1e-9);
            for v in m.outcomes() {
                let lp = m.token_logprob(&ctx, v).unwrap();
                prop_assert!(lp.is_finite() && lp <= 0.0);
            }
            prop_assert!(m.bow_mass_logprob(&ctx).unwrap() <= 0.0);
        }
    }
}
