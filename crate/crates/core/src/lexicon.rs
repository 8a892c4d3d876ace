//! Lexicon construction: shared vocabulary, morphological candidate filtering,
//! logarithmic frequency binning and validation of curated picks.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotation::{AnnotatedToken, Feature, Upos};
use crate::corpus::{FreqTable, Language};
use crate::error::{Error, Result};

pub const DEFAULT_NUM_BINS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Number {
    Sg,
    Pl,
}

impl Number {
    pub const BOTH: [Number; 2] = [Number::Sg, Number::Pl];

    pub fn flip(self) -> Number {
        match self {
            Number::Sg => Number::Pl,
            Number::Pl => Number::Sg,
        }
    }
}

/// Words attested at least once in both tables.
pub fn shared_vocabulary(a: &FreqTable, b: &FreqTable) -> BTreeSet<String> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .filter(|(form, n)| *n > 0 && large.contains(form))
        .map(|(form, _)| form.to_string())
        .collect()
}

/// Log-spaced frequency bins between `f_min` and `f_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub num_bins: u32,
    pub f_min: u64,
    pub f_max: u64,
}

impl BinSpec {
    pub fn new(num_bins: u32, f_min: u64, f_max: u64) -> Result<BinSpec> {
        let spec = BinSpec { num_bins, f_min, f_max };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_bins == 0 {
            return Err(Error::InvalidParameter("bin count must be positive".into()));
        }
        if self.f_min < 1 || self.f_max <= self.f_min {
            return Err(Error::InvalidParameter(format!(
                "bin range needs 1 <= f_min < f_max, got [{}, {}]",
                self.f_min, self.f_max
            )));
        }
        Ok(())
    }

    /// Spans the singular-form frequencies of `pool` in `corpus`.
    pub fn from_pool(pool: &[Candidate], corpus: &str, num_bins: u32) -> Result<BinSpec> {
        let freqs: Vec<u64> = pool.iter().filter_map(|c| c.freq_sg(corpus)).filter(|&f| f > 0).collect();
        let (Some(&lo), Some(&hi)) = (freqs.iter().min(), freqs.iter().max()) else {
            return Err(Error::Lexicon(format!("no candidates attested in {corpus}")));
        };
        BinSpec::new(num_bins, lo, hi)
    }

    /// Lower edges of every bin plus the upper edge of the last one.
    pub fn edges(&self) -> Vec<f64> {
        let (lo, hi) = ((self.f_min as f64).ln(), (self.f_max as f64).ln());
        (0..=self.num_bins)
            .map(|k| (lo + (hi - lo) * k as f64 / self.num_bins as f64).exp())
            .collect()
    }
}

pub fn bin_of(f: u64, spec: &BinSpec) -> Result<u32> {
    if f < 1 {
        return Err(Error::InvalidFrequency(f));
    }
    let top = spec.num_bins - 1;
    if f <= spec.f_min {
        return Ok(0);
    }
    if f >= spec.f_max {
        return Ok(top);
    }
    let (lo, hi) = ((spec.f_min as f64).ln(), (spec.f_max as f64).ln());
    let raw = (spec.num_bins as f64 * ((f as f64).ln() - lo) / (hi - lo)).floor();
    Ok((raw.max(0.0) as u32).min(top))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormFreq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sg: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pl: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combined: Option<u64>,
}

impl FormFreq {
    pub fn known(sg: u64, pl: u64) -> FormFreq {
        FormFreq {
            sg: Some(sg),
            pl: Some(pl),
            combined: Some(sg + pl),
        }
    }
}

/// A noun or verb that passed morphological filtering but has not been binned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub lemma: String,
    pub form_sg: String,
    pub form_pl: String,
    pub pos: Pos,
    pub freq: BTreeMap<String, FormFreq>,
}

impl Candidate {
    pub fn freq_sg(&self, corpus: &str) -> Option<u64> {
        self.freq.get(corpus).and_then(|f| f.sg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexEntry {
    pub lemma: String,
    pub form_sg: String,
    pub form_pl: String,
    pub pos: Pos,
    /// Per corpus id.
    pub freq: BTreeMap<String, FormFreq>,
    pub bin: u32,
    pub source_corpus: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub animate: Option<bool>,
    /// Grammatical gender key used to pick determiners; unused for English.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<String>,
}

impl LexEntry {
    pub fn form(&self, n: Number) -> &str {
        match n {
            Number::Sg => &self.form_sg,
            Number::Pl => &self.form_pl,
        }
    }
}

fn verb_number(tok: &AnnotatedToken, language: &Language) -> Option<Number> {
    if tok.upos != Upos::Verb {
        return None;
    }
    if tok.feat(Feature::Mood).is_some_and(|m| m != "Ind") {
        return None;
    }
    let tense = tok.feat(Feature::Tense);
    let verb_form = tok.feat(Feature::VerbForm);
    let number = tok.feat(Feature::Number);
    let person = tok.feat(Feature::Person);
    let finite = matches!(verb_form, None | Some("Fin"));
    match language {
        // VBZ carries Number=Sing|Person=3; VBP and VB carry no number.
        Language::En => {
            if number == Some("Sing") && matches!(person, None | Some("3")) && tense == Some("Pres") && finite {
                Some(Number::Sg)
            } else if (verb_form == Some("Inf") && tense.is_none())
                || (tense == Some("Pres") && finite && number != Some("Sing"))
            {
                Some(Number::Pl)
            } else {
                None
            }
        }
        _ => {
            if person != Some("3") || tense != Some("Pres") || !finite {
                return None;
            }
            match number {
                Some("Sing") => Some(Number::Sg),
                Some("Plur") => Some(Number::Pl),
                _ => None,
            }
        }
    }
}

fn noun_number(tok: &AnnotatedToken, language: &Language) -> Option<Number> {
    if tok.upos != Upos::Noun {
        return None;
    }
    if *language == Language::De && tok.feat(Feature::Case) != Some("Nom") {
        return None;
    }
    match tok.feat(Feature::Number) {
        Some("Sing") => Some(Number::Sg),
        Some("Plur") => Some(Number::Pl),
        _ => None,
    }
}

/// Filters an annotation stream down to noun or verb candidates.
///
/// Nouns must be allowlisted (animate) lemmas; German nouns must be nominative.
/// Verbs must be 3rd-person present indicative (English also admits the
/// untagged-number present and infinitive classes as the plural form). For each
/// lemma the most frequently annotated form of each number is kept, and only if
/// both forms are in `shared`.
pub fn filter_candidates<'a>(
    tokens: impl IntoIterator<Item = &'a AnnotatedToken>,
    pos: Pos,
    language: &Language,
    animacy_allowlist: &BTreeSet<String>,
    shared: &BTreeSet<String>,
    freqs: &[(&str, &FreqTable)],
) -> Vec<Candidate> {
    let mut by_lemma: BTreeMap<&str, [BTreeMap<&str, u64>; 2]> = BTreeMap::new();
    for tok in tokens {
        let number = match pos {
            Pos::Noun => noun_number(tok, language),
            Pos::Verb => verb_number(tok, language),
        };
        let Some(number) = number else { continue };
        if pos == Pos::Noun && !animacy_allowlist.contains(&tok.lemma) {
            continue;
        }
        if !shared.contains(&tok.form) {
            continue;
        }
        let slot = &mut by_lemma.entry(tok.lemma.as_str()).or_default()[number as usize];
        *slot.entry(tok.form.as_str()).or_default() += 1;
    }

    fn most_frequent<'b>(forms: &BTreeMap<&'b str, u64>) -> Option<&'b str> {
        // BTreeMap iteration is lexicographic, so max_by_key on (count, Reverse(form)) is stable
        forms
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(f, _)| *f)
    }

    by_lemma
        .into_iter()
        .filter_map(|(lemma, [sg, pl])| {
            let (form_sg, form_pl) = (most_frequent(&sg)?, most_frequent(&pl)?);
            if form_sg == form_pl {
                return None;
            }
            let freq = freqs
                .iter()
                .map(|(id, t)| (id.to_string(), FormFreq::known(t.get(form_sg), t.get(form_pl))))
                .collect();
            Some(Candidate {
                lemma: lemma.to_string(),
                form_sg: form_sg.to_string(),
                form_pl: form_pl.to_string(),
                pos,
                freq,
            })
        })
        .collect()
}

/// Bins candidates by their singular-form frequency in `corpus`.
pub fn bin_candidates(pool: &[Candidate], corpus: &str, spec: &BinSpec) -> Result<Vec<LexEntry>> {
    pool.iter()
        .map(|c| {
            let f = c
                .freq_sg(corpus)
                .ok_or_else(|| Error::MissingFrequency(format!("{} in {corpus}", c.form_sg)))?;
            Ok(LexEntry {
                lemma: c.lemma.clone(),
                form_sg: c.form_sg.clone(),
                form_pl: c.form_pl.clone(),
                pos: c.pos,
                freq: c.freq.clone(),
                bin: bin_of(f, spec)?,
                source_corpus: corpus.to_string(),
                animate: (c.pos == Pos::Noun).then_some(true),
                gender: None,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pick {
    pub lemma: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickSource {
    /// Benchmark label, e.g. `C` or `W`.
    pub label: String,
    /// Corpus id whose frequency distribution the picks are drawn from.
    pub corpus: String,
    pub nouns: Vec<Pick>,
    pub verbs: Vec<Pick>,
    #[serde(default)]
    pub object_nouns: Vec<Pick>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noun_bins: Option<BinSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verb_bins: Option<BinSpec>,
}

/// The human-curated selection file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Picks {
    pub language: Language,
    pub sources: Vec<PickSource>,
}

impl Picks {
    pub fn load(path: impl AsRef<Path>) -> Result<Picks> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Frozen from corpus counts; every invariant is re-checked on load.
    #[default]
    Built,
    /// Transcribed from published tables; counts may be partial, so only the
    /// structure is checked.
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconSource {
    pub label: String,
    pub corpus: String,
    pub noun_bins: BinSpec,
    pub verb_bins: BinSpec,
    pub nouns: Vec<LexEntry>,
    pub verbs: Vec<LexEntry>,
    #[serde(default)]
    pub object_nouns: Vec<LexEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    pub language: Language,
    /// Ids of the two corpora whose shared vocabulary the lexicon draws from.
    pub corpora: Vec<String>,
    #[serde(default)]
    pub provenance: Provenance,
    pub sources: Vec<LexiconSource>,
}

impl Lexicon {
    pub fn source(&self, label: &str) -> Result<&LexiconSource> {
        self.sources
            .iter()
            .find(|s| s.label == label)
            .ok_or_else(|| Error::Lexicon(format!("no lexicon source labelled {label:?}")))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Lexicon(msg));
        let mut labels = BTreeSet::new();
        for src in &self.sources {
            if !labels.insert(&src.label) {
                return fail(format!("duplicate source label {:?}", src.label));
            }
            src.noun_bins.validate()?;
            src.verb_bins.validate()?;
            let groups = [
                (&src.nouns, Pos::Noun, &src.noun_bins),
                (&src.verbs, Pos::Verb, &src.verb_bins),
                (&src.object_nouns, Pos::Noun, &src.noun_bins),
            ];
            for (entries, pos, spec) in groups {
                for e in entries {
                    self.validate_entry(e, pos, spec, src)?;
                }
            }
        }
        Ok(())
    }

    fn validate_entry(&self, e: &LexEntry, pos: Pos, spec: &BinSpec, src: &LexiconSource) -> Result<()> {
        let name = format!("{}:{}", src.label, e.lemma);
        let fail = |msg: String| Err(Error::Lexicon(format!("{name}: {msg}")));
        if e.pos != pos {
            return fail(format!("expected a {pos:?} entry"));
        }
        if e.form_sg.is_empty() || e.form_pl.is_empty() || e.form_sg.contains(char::is_whitespace) {
            return fail("forms must be non-empty single words".into());
        }
        if e.source_corpus != src.corpus {
            return fail(format!("source corpus {} differs from {}", e.source_corpus, src.corpus));
        }
        if e.bin >= spec.num_bins {
            return fail(format!("bin {} outside 0..{}", e.bin, spec.num_bins));
        }
        if self.provenance == Provenance::Reference {
            return Ok(());
        }
        for corpus in &self.corpora {
            let f = e.freq.get(corpus);
            let (sg, pl) = (f.and_then(|f| f.sg).unwrap_or(0), f.and_then(|f| f.pl).unwrap_or(0));
            if sg < 1 || pl < 1 {
                return fail(format!("forms not attested in both numbers in {corpus}"));
            }
        }
        let f = e.freq.get(&src.corpus).and_then(|f| f.sg).unwrap_or(0);
        let expected = bin_of(f, spec)?;
        if expected != e.bin {
            return fail(format!("recorded bin {} but frequency {f} falls in bin {expected}", e.bin));
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Lexicon> {
        let lex: Lexicon = serde_json::from_str(text).map_err(|e| Error::json("lexicon", e))?;
        lex.validate()?;
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }
}

/// Candidate pools for one frequency distribution.
#[derive(Debug, Clone)]
pub struct CandidatePool<'a> {
    pub nouns: &'a [Candidate],
    pub verbs: &'a [Candidate],
}

/// Validates the curated picks against the candidate pools and freezes them.
/// Returns the lexicon plus human-readable warnings (empty or crowded bins).
pub fn select_per_bin(
    language: Language,
    corpora: [&str; 2],
    pool: CandidatePool<'_>,
    picks: &Picks,
    num_bins: u32,
) -> Result<(Lexicon, Vec<String>)> {
    let mut warnings = Vec::new();
    let mut sources = Vec::new();
    for ps in &picks.sources {
        if !corpora.contains(&ps.corpus.as_str()) {
            return Err(Error::Lexicon(format!(
                "picks source {} refers to unknown corpus {}",
                ps.label, ps.corpus
            )));
        }
        let noun_bins = match ps.noun_bins {
            Some(s) => s,
            None => BinSpec::from_pool(pool.nouns, &ps.corpus, num_bins)?,
        };
        let verb_bins = match ps.verb_bins {
            Some(s) => s,
            None => BinSpec::from_pool(pool.verbs, &ps.corpus, num_bins)?,
        };
        let nouns_binned = bin_candidates(pool.nouns, &ps.corpus, &noun_bins)?;
        let verbs_binned = bin_candidates(pool.verbs, &ps.corpus, &verb_bins)?;

        let resolve = |picks: &[Pick], binned: &[LexEntry], what: &str| -> Result<Vec<LexEntry>> {
            let mut seen = BTreeSet::new();
            picks
                .iter()
                .map(|p| {
                    if !seen.insert(&p.lemma) {
                        return Err(Error::Lexicon(format!("{}: {what} {} picked twice", ps.label, p.lemma)));
                    }
                    let mut e = binned
                        .iter()
                        .find(|e| e.lemma == p.lemma)
                        .cloned()
                        .ok_or_else(|| {
                            Error::Lexicon(format!("{}: {what} {:?} is not a candidate", ps.label, p.lemma))
                        })?;
                    if let Some(b) = p.bin {
                        if b != e.bin {
                            return Err(Error::Lexicon(format!(
                                "{}: {what} {} recorded in bin {b} but falls in bin {}",
                                ps.label, p.lemma, e.bin
                            )));
                        }
                    }
                    e.gender = p.gender.clone();
                    Ok(e)
                })
                .collect()
        };
        let nouns = resolve(&ps.nouns, &nouns_binned, "noun")?;
        let verbs = resolve(&ps.verbs, &verbs_binned, "verb")?;
        let object_nouns = resolve(&ps.object_nouns, &nouns_binned, "object noun")?;

        for (entries, what) in [(&nouns, "noun"), (&verbs, "verb")] {
            let mut per_bin = vec![0usize; num_bins.max(1) as usize];
            for e in entries {
                if let Some(slot) = per_bin.get_mut(e.bin as usize) {
                    *slot += 1;
                }
            }
            for (b, n) in per_bin.iter().enumerate() {
                match n {
                    0 => warnings.push(format!("{}: no {what} picked for bin {b}", ps.label)),
                    1 => {}
                    n => warnings.push(format!("{}: {n} {what}s picked for bin {b}", ps.label)),
                }
            }
        }
        sources.push(LexiconSource {
            label: ps.label.clone(),
            corpus: ps.corpus.clone(),
            noun_bins,
            verb_bins,
            nouns,
            verbs,
            object_nouns,
        });
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let lex = Lexicon {
        language,
        corpora: corpora.iter().map(|s| s.to_string()).collect(),
        provenance: Provenance::Built,
        sources,
    };
    lex.validate()?;
    Ok((lex, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::parse_annotations;
    use crate::corpus::{word_frequencies, CaseMode, Corpus};
    use proptest::prelude::*;

    fn table(text: &str) -> FreqTable {
        word_frequencies(&Corpus::from_text("x", Language::En, text, CaseMode::Lower))
    }

    #[test]
    fn bin_boundaries() {
        let spec = BinSpec::new(10, 2, 7027).unwrap();
        assert_eq!(bin_of(2, &spec).unwrap(), 0);
        assert_eq!(bin_of(1, &spec).unwrap(), 0);
        assert_eq!(bin_of(7027, &spec).unwrap(), 9);
        assert_eq!(bin_of(100_000, &spec).unwrap(), 9);
        assert_eq!(bin_of(264, &spec).unwrap(), 5);
        assert!(matches!(bin_of(0, &spec), Err(Error::InvalidFrequency(0))));
    }

    #[test]
    fn bin_spec_validation() {
        assert!(BinSpec::new(10, 0, 5).is_err());
        assert!(BinSpec::new(10, 5, 5).is_err());
        assert!(BinSpec::new(0, 1, 5).is_err());
        let e = BinSpec::new(4, 1, 16).unwrap().edges();
        assert_eq!(e.len(), 5);
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert!((e[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn shared_vocabulary_cases() {
        let a = table("the cat runs");
        let b = table("the dog runs fast");
        let shared = shared_vocabulary(&a, &b);
        assert_eq!(shared.into_iter().collect::<Vec<_>>(), ["runs", "the"]);
        assert!(shared_vocabulary(&table("a b"), &table("c d")).is_empty());
        let own: BTreeSet<String> = a.forms().map(String::from).collect();
        assert_eq!(shared_vocabulary(&a, &a), own);
    }

    const ANN: &str = "\
resident\tresident\tNOUN\tNumber=Sing
residents\tresident\tNOUN\tNumber=Plur
pilot\tpilot\tNOUN\tNumber=Sing
table\ttable\tNOUN\tNumber=Sing
tables\ttable\tNOUN\tNumber=Plur
awaits\tawait\tVERB\tMood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin
await\tawait\tVERB\tTense=Pres|VerbForm=Fin
sing\tsing\tVERB\tVerbForm=Inf
sings\tsing\tVERB\tNumber=Sing|Person=3|Tense=Pres|VerbForm=Fin
ran\trun\tVERB\tTense=Past|VerbForm=Fin
run\trun\tVERB\tVerbForm=Inf
";

    #[test]
    fn english_candidates() {
        let toks = parse_annotations(ANN, CaseMode::Lower).unwrap();
        let a = table("resident residents resident pilot pilots table tables awaits await sings sing ran run");
        let b = table("resident residents residents pilot table tables awaits await await sings sing ran run");
        let shared = shared_vocabulary(&a, &b);
        let allow: BTreeSet<String> = ["resident", "pilot"].map(String::from).into();
        let freqs = [("a", &a), ("b", &b)];
        let nouns = filter_candidates(&toks, Pos::Noun, &Language::En, &allow, &shared, &freqs);
        // pilot has no plural annotation; table is not allowlisted
        assert_eq!(nouns.len(), 1);
        assert_eq!(nouns[0].form_pl, "residents");
        assert_eq!(nouns[0].freq["a"], FormFreq::known(2, 1));
        assert_eq!(nouns[0].freq["b"], FormFreq::known(1, 2));
        let verbs = filter_candidates(&toks, Pos::Verb, &Language::En, &allow, &shared, &freqs);
        let lemmas: Vec<_> = verbs.iter().map(|v| (v.form_sg.as_str(), v.form_pl.as_str())).collect();
        assert_eq!(lemmas, [("awaits", "await"), ("sings", "sing")]);
    }

    #[test]
    fn mood_and_person_filters() {
        let ann = "\
vienne\tvenir\tVERB\tMood=Sub|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin
viennent\tvenir\tVERB\tMood=Sub|Number=Plur|Person=3|Tense=Pres|VerbForm=Fin
chante\tchanter\tVERB\tMood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin
chantent\tchanter\tVERB\tMood=Ind|Number=Plur|Person=3|Tense=Pres|VerbForm=Fin
chantons\tchanter\tVERB\tMood=Ind|Number=Plur|Person=1|Tense=Pres|VerbForm=Fin
mange\tmanger\tVERB\tMood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin
";
        let toks = parse_annotations(ann, CaseMode::Lower).unwrap();
        let t = table("vienne viennent chante chantent chantons mange");
        let shared = shared_vocabulary(&t, &t);
        let verbs = filter_candidates(&toks, Pos::Verb, &Language::Fr, &BTreeSet::new(), &shared, &[("a", &t)]);
        assert_eq!(verbs.len(), 1);
        assert_eq!((verbs[0].form_sg.as_str(), verbs[0].form_pl.as_str()), ("chante", "chantent"));
    }

    #[test]
    fn german_nouns_must_be_nominative() {
        let ann = "\
arzt\tarzt\tNOUN\tCase=Nom|Number=Sing
ärzte\tarzt\tNOUN\tCase=Nom|Number=Plur
mann\tmann\tNOUN\tCase=Nom|Number=Sing
männern\tmann\tNOUN\tCase=Dat|Number=Plur
";
        let toks = parse_annotations(ann, CaseMode::Lower).unwrap();
        let t = table("arzt ärzte mann männern");
        let shared = shared_vocabulary(&t, &t);
        let allow: BTreeSet<String> = ["arzt", "mann"].map(String::from).into();
        let nouns = filter_candidates(&toks, Pos::Noun, &Language::De, &allow, &shared, &[("a", &t)]);
        assert_eq!(nouns.len(), 1);
        assert_eq!(nouns[0].lemma, "arzt");
    }

    #[test]
    fn plural_missing_from_second_corpus_excludes() {
        let toks = parse_annotations(ANN, CaseMode::Lower).unwrap();
        let a = table("resident residents");
        let b = table("resident");
        let shared = shared_vocabulary(&a, &b);
        let allow: BTreeSet<String> = ["resident"].map(String::from).into();
        let nouns = filter_candidates(&toks, Pos::Noun, &Language::En, &allow, &shared, &[("a", &a), ("b", &b)]);
        assert!(nouns.is_empty());
    }

    fn cand(lemma: &str, sg: u64, pos: Pos) -> Candidate {
        Candidate {
            lemma: lemma.into(),
            form_sg: format!("{lemma}"),
            form_pl: format!("{lemma}s"),
            pos,
            freq: [("a".to_string(), FormFreq::known(sg, 3)), ("b".to_string(), FormFreq::known(4, 5))].into(),
        }
    }

    fn pick(lemma: &str, bin: Option<u32>) -> Pick {
        Pick { lemma: lemma.into(), bin, gender: None }
    }

    #[test]
    fn select_validates_picks() {
        let nouns = vec![cand("cat", 1, Pos::Noun), cand("dog", 10, Pos::Noun), cand("cow", 100, Pos::Noun)];
        let verbs = vec![cand("run", 2, Pos::Verb), cand("sit", 200, Pos::Verb)];
        let pool = CandidatePool { nouns: &nouns, verbs: &verbs };
        let mut picks = Picks {
            language: Language::En,
            sources: vec![PickSource {
                label: "A".into(),
                corpus: "a".into(),
                nouns: vec![pick("cat", Some(0)), pick("cow", Some(1))],
                verbs: vec![pick("run", None), pick("sit", Some(1))],
                object_nouns: vec![pick("dog", None)],
                noun_bins: None,
                verb_bins: None,
            }],
        };
        let (lex, warnings) = select_per_bin(Language::En, ["a", "b"], pool.clone(), &picks, 2).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        let src = lex.source("A").unwrap();
        assert_eq!(src.noun_bins, BinSpec::new(2, 1, 100).unwrap());
        assert_eq!(src.nouns.len(), 2);
        assert_eq!(src.object_nouns[0].bin, 1);

        picks.sources[0].nouns[1].bin = Some(0);
        assert!(matches!(select_per_bin(Language::En, ["a", "b"], pool.clone(), &picks, 2), Err(Error::Lexicon(_))));
        picks.sources[0].nouns[1] = pick("horse", None);
        assert!(matches!(select_per_bin(Language::En, ["a", "b"], pool.clone(), &picks, 2), Err(Error::Lexicon(_))));
        picks.sources[0].nouns.truncate(1);
        let (_, warnings) = select_per_bin(Language::En, ["a", "b"], pool, &picks, 2).unwrap();
        assert_eq!(warnings, ["A: no noun picked for bin 1"]);
    }

    #[test]
    fn frozen_lexicon_revalidated_on_load() {
        let nouns = vec![cand("cat", 1, Pos::Noun), cand("cow", 100, Pos::Noun)];
        let verbs = vec![cand("run", 2, Pos::Verb), cand("sit", 200, Pos::Verb)];
        let picks = Picks {
            language: Language::En,
            sources: vec![PickSource {
                label: "A".into(),
                corpus: "a".into(),
                nouns: vec![pick("cat", None)],
                verbs: vec![pick("run", None)],
                object_nouns: vec![],
                noun_bins: None,
                verb_bins: None,
            }],
        };
        let (lex, _) = select_per_bin(Language::En, ["a", "b"], CandidatePool { nouns: &nouns, verbs: &verbs }, &picks, 10).unwrap();
        let text = serde_json::to_string(&lex).unwrap();
        assert_eq!(Lexicon::from_json_str(&text).unwrap(), lex);
        let mut broken = lex.clone();
        broken.sources[0].nouns[0].bin = 3;
        let text = serde_json::to_string(&broken).unwrap();
        assert!(matches!(Lexicon::from_json_str(&text), Err(Error::Lexicon(_))));
        let mut broken = lex;
        broken.sources[0].verbs[0].freq.get_mut("b").unwrap().pl = Some(0);
        let text = serde_json::to_string(&broken).unwrap();
        assert!(matches!(Lexicon::from_json_str(&text), Err(Error::Lexicon(_))));
    }

    proptest! {
        #[test]
        fn bin_of_monotone(f_min in 1u64..100, span in 1u64..10_000, b in 1u32..20, f in 1u64..20_000, g in 1u64..20_000) {
            let spec = BinSpec::new(b, f_min, f_min + span).unwrap();
            let (lo, hi) = (f.min(g), f.max(g));
            prop_assert!(bin_of(lo, &spec).unwrap() <= bin_of(hi, &spec).unwrap());
            prop_assert!(bin_of(hi, &spec).unwrap() < b);
        }

        #[test]
        fn shared_vocabulary_commutes(a in "[a-e ]{0,40}", b in "[a-e ]{0,40}") {
            let (ta, tb) = (table(&a), table(&b));
            prop_assert_eq!(shared_vocabulary(&ta, &tb), shared_vocabulary(&tb, &ta));
        }
    }
}
