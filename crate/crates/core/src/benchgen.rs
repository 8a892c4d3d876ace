//! Template-driven generation of subject–verb agreement minimal pairs.
//!
//! Each paradigm has a language-specific template in the auxiliary config. A
//! template is a whitespace-separated sequence of literal words and slots:
//!
//! | slot | expands to |
//! |------|------------|
//! | `{det:ROLE:CASE}` | determiner for the role's noun |
//! | `{noun:ROLE:CASE}` | the role's noun (case overrides from `noun_forms`) |
//! | `{pro:ROLE:CASE}` | relative pronoun agreeing with the role's noun |
//! | `{verb}` | the critical verb |
//! | `{verb1}` | first conjunct of a coordination |
//! | `{main}` | main-clause verb when the critical verb is inside the relative clause |
//! | `{rel}` | relative-clause verb |
//! | `{prep}` | preposition |
//! | `{filler1}`, `{filler2}` | long-VP fillers of the first and second verb |
//!
//! `ROLE` is `subj` (the noun whose number varies across the pair) or `attr`
//! (the other noun: prepositional object, relative-clause participant or head).
//! `CASE` names a key in the determiner/pronoun tables, or `prep` for the case
//! governed by the current preposition. Only the `subj` determiner and noun
//! change between the two sentences of a pair.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Language;
use crate::error::{Error, Result};
use crate::jsonl;
use crate::lexicon::{LexEntry, LexiconSource, Number};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Paradigm {
    SimpleAgreement,
    AgreementPrepPhrase,
    AgreementSubjRelClause,
    AgreementObjRelClauseAcross,
    AgreementObjRelClauseWithin,
    AgreementVpCoord,
    AgreementLongVpCoord,
}

impl Paradigm {
    pub const ALL: [Paradigm; 7] = [
        Paradigm::SimpleAgreement,
        Paradigm::AgreementPrepPhrase,
        Paradigm::AgreementSubjRelClause,
        Paradigm::AgreementObjRelClauseAcross,
        Paradigm::AgreementObjRelClauseWithin,
        Paradigm::AgreementVpCoord,
        Paradigm::AgreementLongVpCoord,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Paradigm::SimpleAgreement => "simple_agreement",
            Paradigm::AgreementPrepPhrase => "agreement_prep_phrase",
            Paradigm::AgreementSubjRelClause => "agreement_subj_rel_clause",
            Paradigm::AgreementObjRelClauseAcross => "agreement_obj_rel_clause_across",
            Paradigm::AgreementObjRelClauseWithin => "agreement_obj_rel_clause_within",
            Paradigm::AgreementVpCoord => "agreement_vp_coord",
            Paradigm::AgreementLongVpCoord => "agreement_long_vp_coord",
        }
    }
}

impl fmt::Display for Paradigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Paradigm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Paradigm> {
        Paradigm::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown paradigm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preposition {
    pub form: String,
    /// Case governed by the preposition; `{det:attr:prep}` resolves to it.
    #[serde(default = "default_case")]
    pub case: String,
}

fn default_case() -> String {
    "nom".to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelVerb {
    pub lemma: String,
    pub sg: String,
    pub pl: String,
}

impl RelVerb {
    fn form(&self, n: Number) -> &str {
        match n {
            Number::Sg => &self.sg,
            Number::Pl => &self.pl,
        }
    }
}

/// Case → gender → `[singular, plural]`. The gender key `*` is the fallback.
pub type AgreementTable = BTreeMap<String, BTreeMap<String, [String; 2]>>;

/// Function words, auxiliary lexical material and templates for one language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxLex {
    pub language: Language,
    pub determiners: AgreementTable,
    #[serde(default)]
    pub relative_pronouns: AgreementTable,
    /// Lemma → case → `[singular, plural]` for nouns whose oblique forms differ.
    #[serde(default)]
    pub noun_forms: BTreeMap<String, BTreeMap<String, [String; 2]>>,
    #[serde(default)]
    pub prepositions: Vec<Preposition>,
    #[serde(default)]
    pub rel_verbs: Vec<RelVerb>,
    /// Verb lemma → filler phrase.
    #[serde(default)]
    pub long_vp_fillers: BTreeMap<String, String>,
    pub templates: BTreeMap<Paradigm, String>,
    /// Applied word by word after lowercasing.
    #[serde(default)]
    pub casing: BTreeMap<String, String>,
}

impl AuxLex {
    pub fn from_json_str(text: &str) -> Result<AuxLex> {
        let aux: AuxLex = serde_json::from_str(text).map_err(|e| Error::json("aux lexicon", e))?;
        for (p, t) in &aux.templates {
            Template::parse(*p, t)?;
        }
        Ok(aux)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<AuxLex> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Words of the auxiliary material (templates' literals excluded) missing from `vocab`.
    pub fn missing_from(&self, vocab: &BTreeSet<String>) -> Vec<String> {
        let mut words = BTreeSet::new();
        for p in &self.prepositions {
            words.extend(p.form.split_whitespace().map(str::to_lowercase));
        }
        for r in &self.rel_verbs {
            words.insert(r.sg.to_lowercase());
            words.insert(r.pl.to_lowercase());
        }
        for f in self.long_vp_fillers.values() {
            words.extend(f.split_whitespace().map(str::to_lowercase));
        }
        words.into_iter().filter(|w| !vocab.contains(w)).collect()
    }

    fn agreeing(table: &AgreementTable, what: &str, case: &str, gender: Option<&str>, n: Number) -> Result<String> {
        let by_gender = table
            .get(case)
            .ok_or_else(|| Error::Generation(format!("no {what} for case {case:?}")))?;
        let forms = gender
            .and_then(|g| by_gender.get(g))
            .or_else(|| by_gender.get("*"))
            .ok_or_else(|| Error::Generation(format!("no {what} for case {case:?}, gender {gender:?}")))?;
        Ok(forms[n as usize].clone())
    }

    fn noun_form(&self, e: &LexEntry, case: &str, n: Number) -> String {
        self.noun_forms
            .get(&e.lemma)
            .and_then(|m| m.get(case))
            .map(|f| f[n as usize].clone())
            .unwrap_or_else(|| e.form(n).to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Subj,
    Attr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum CaseRef {
    Named(String),
    Prep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Word {
    Det,
    Noun,
    Pro,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Slot {
    Lit(String),
    Nominal(Word, Role, CaseRef),
    Verb,
    Verb1,
    Main,
    Rel,
    Prep,
    Filler1,
    Filler2,
}

#[derive(Debug, Clone)]
struct Template {
    slots: Vec<Slot>,
}

impl Template {
    fn parse(paradigm: Paradigm, text: &str) -> Result<Template> {
        let bad = |msg: String| Error::Generation(format!("template for {paradigm}: {msg}"));
        let mut slots = Vec::new();
        for item in text.split_whitespace() {
            let Some(inner) = item.strip_prefix('{').and_then(|s| s.strip_suffix('}')) else {
                slots.push(Slot::Lit(item.to_string()));
                continue;
            };
            let parts: Vec<&str> = inner.split(':').collect();
            let slot = match parts.as_slice() {
                ["verb"] => Slot::Verb,
                ["verb1"] => Slot::Verb1,
                ["main"] => Slot::Main,
                ["rel"] => Slot::Rel,
                ["prep"] => Slot::Prep,
                ["filler1"] => Slot::Filler1,
                ["filler2"] => Slot::Filler2,
                [word, role, case] => {
                    let word = match *word {
                        "det" => Word::Det,
                        "noun" => Word::Noun,
                        "pro" => Word::Pro,
                        other => return Err(bad(format!("unknown slot kind {other:?}"))),
                    };
                    let role = match *role {
                        "subj" => Role::Subj,
                        "attr" => Role::Attr,
                        other => return Err(bad(format!("unknown role {other:?}"))),
                    };
                    let case = match *case {
                        "prep" => CaseRef::Prep,
                        c => CaseRef::Named(c.to_string()),
                    };
                    Slot::Nominal(word, role, case)
                }
                _ => return Err(bad(format!("unknown slot {item:?}"))),
            };
            slots.push(slot);
        }
        let count = |pred: &dyn Fn(&Slot) -> bool| slots.iter().filter(|s| pred(s)).count();
        if count(&|s| *s == Slot::Verb) != 1 {
            return Err(bad("needs exactly one {verb}".into()));
        }
        if count(&|s| matches!(s, Slot::Nominal(Word::Noun, Role::Subj, _))) != 1 {
            return Err(bad("needs exactly one {noun:subj:…}".into()));
        }
        let subj: Vec<usize> = slots
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Slot::Nominal(Word::Det | Word::Noun, Role::Subj, _)))
            .map(|(i, _)| i)
            .collect();
        if subj.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(bad("subject determiner and noun must be adjacent".into()));
        }
        Ok(Template { slots })
    }
}

/// Lexical choices for one sentence.
struct Fill<'a> {
    subj: &'a LexEntry,
    subj_num: Number,
    gram_num: Number,
    attr: Option<(&'a LexEntry, Number)>,
    verb: &'a str,
    verb1: Option<&'a str>,
    main: Option<&'a str>,
    rel: Option<&'a str>,
    prep: Option<&'a Preposition>,
    filler1: Option<&'a str>,
    filler2: Option<&'a str>,
}

struct Rendered {
    words: Vec<String>,
    subject: (usize, usize),
    critical: (usize, usize),
}

fn render(aux: &AuxLex, paradigm: Paradigm, t: &Template, f: &Fill<'_>) -> Result<Rendered> {
    let missing = |what: &str| Error::Generation(format!("{paradigm}: template uses {what} but none is available"));
    let mut words = Vec::new();
    let mut subject: Option<(usize, usize)> = None;
    let mut critical = (0, 0);
    for slot in &t.slots {
        let start = words.len();
        let text: String = match slot {
            Slot::Lit(w) => w.clone(),
            Slot::Verb => f.verb.to_string(),
            Slot::Verb1 => f.verb1.ok_or_else(|| missing("{verb1}"))?.to_string(),
            Slot::Main => f.main.ok_or_else(|| missing("{main}"))?.to_string(),
            Slot::Rel => f.rel.ok_or_else(|| missing("{rel}"))?.to_string(),
            Slot::Prep => f.prep.ok_or_else(|| missing("{prep}"))?.form.clone(),
            Slot::Filler1 => f.filler1.ok_or_else(|| missing("{filler1}"))?.to_string(),
            Slot::Filler2 => f.filler2.ok_or_else(|| missing("{filler2}"))?.to_string(),
            Slot::Nominal(word, role, case) => {
                let case = match case {
                    CaseRef::Named(c) => c.as_str(),
                    CaseRef::Prep => f.prep.ok_or_else(|| missing("{prep}"))?.case.as_str(),
                };
                let (entry, n) = match role {
                    Role::Subj => (f.subj, f.subj_num),
                    Role::Attr => f.attr.ok_or_else(|| missing("an attractor noun"))?,
                };
                let gender = entry.gender.as_deref();
                match word {
                    Word::Det => AuxLex::agreeing(&aux.determiners, "determiner", case, gender, n)?,
                    Word::Noun => aux.noun_form(entry, case, n),
                    // A subject-referring pronoun keeps the grammatical number so
                    // that only the subject phrase differs across the pair.
                    Word::Pro => {
                        let n = if *role == Role::Subj { f.gram_num } else { n };
                        AuxLex::agreeing(&aux.relative_pronouns, "relative pronoun", case, gender, n)?
                    }
                }
            }
        };
        words.extend(text.split_whitespace().map(|w| {
            let lower = w.to_lowercase();
            aux.casing.get(&lower).cloned().unwrap_or(lower)
        }));
        let end = words.len();
        match slot {
            Slot::Verb => critical = (start, end),
            Slot::Nominal(Word::Det | Word::Noun, Role::Subj, _) => {
                subject = Some(match subject {
                    None => (start, end),
                    Some((s, _)) => (s, end),
                });
            }
            _ => {}
        }
    }
    Ok(Rendered {
        words,
        subject: subject.expect("template validated to contain a subject noun"),
        critical,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attractor {
    pub lemma: String,
    pub form: String,
    pub number: Number,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFreq {
    pub verb: Option<u64>,
    pub subj_gram: Option<u64>,
    pub subj_ungram: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMetadata {
    pub subject_lemma: String,
    pub subject_gram: String,
    pub subject_ungram: String,
    pub number: Number,
    pub verb_lemma: String,
    pub verb_form: String,
    /// Word index range `[start, end)` of the subject phrase.
    pub subject_span: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attractor: Option<Attractor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preposition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_verb: Option<String>,
    /// Lemma of the non-critical verb (first conjunct or main verb).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_verb: Option<String>,
    /// Corpus id → frequencies of the verb and both subject forms.
    pub freq: BTreeMap<String, PairFreq>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalPair {
    pub pair_id: String,
    pub paradigm: Paradigm,
    pub lexicon_source: String,
    pub grammatical: Vec<String>,
    pub ungrammatical: Vec<String>,
    pub critical_start: usize,
    /// Exclusive.
    pub critical_end: usize,
    pub metadata: PairMetadata,
}

impl MinimalPair {
    pub fn critical_span(&self) -> (usize, usize) {
        (self.critical_start, self.critical_end)
    }

    /// Checks the pair-difference and agreement invariants.
    pub fn check(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Generation(format!("pair {}: {msg}", self.pair_id)));
        let (g, u) = (&self.grammatical, &self.ungrammatical);
        if g.len() != u.len() {
            return fail("sentences differ in length");
        }
        let [ss, se] = self.metadata.subject_span;
        let (cs, ce) = self.critical_span();
        if ss >= se || se > g.len() || cs >= ce || ce > g.len() {
            return fail("span out of range");
        }
        if cs < se && ss < ce {
            return fail("critical span overlaps the subject");
        }
        if g[cs..ce] != u[cs..ce] {
            return fail("critical spans differ");
        }
        let mut differs = false;
        for (i, (a, b)) in g.iter().zip(u).enumerate() {
            if a != b {
                if !(ss..se).contains(&i) {
                    return fail("sentences differ outside the subject");
                }
                differs = true;
            }
        }
        if !differs {
            return fail("sentences are identical");
        }
        if g[cs..ce].join(" ") != self.metadata.verb_form {
            return fail("critical span is not the verb");
        }
        Ok(())
    }
}

fn pair_id(key: &str) -> String {
    hex::encode(&Sha256::digest(key.as_bytes())[..8])
}

fn pair_freq(subj: &LexEntry, verb: Option<&LexEntry>, n: Number) -> BTreeMap<String, PairFreq> {
    let pick = |e: &LexEntry, corpus: &str, n: Number| {
        e.freq.get(corpus).and_then(|f| match n {
            Number::Sg => f.sg,
            Number::Pl => f.pl,
        })
    };
    let mut corpora: BTreeSet<&String> = subj.freq.keys().collect();
    if let Some(v) = verb {
        corpora.extend(v.freq.keys());
    }
    corpora
        .into_iter()
        .map(|corpus| {
            (
                corpus.clone(),
                PairFreq {
                    verb: verb.and_then(|v| pick(v, corpus, n)),
                    subj_gram: pick(subj, corpus, n),
                    subj_ungram: pick(subj, corpus, n.flip()),
                },
            )
        })
        .collect()
}

/// Verb in the critical slot: either a lexicon verb or a relative-clause verb.
enum Critical<'a> {
    Lex(&'a LexEntry),
    Rel(&'a RelVerb),
}

impl Critical<'_> {
    fn lemma(&self) -> &str {
        match self {
            Critical::Lex(e) => &e.lemma,
            Critical::Rel(r) => &r.lemma,
        }
    }

    fn form(&self, n: Number) -> &str {
        match self {
            Critical::Lex(e) => e.form(n),
            Critical::Rel(r) => r.form(n),
        }
    }
}

struct Choice<'a> {
    subj: &'a LexEntry,
    critical: Critical<'a>,
    gram: Number,
    attr: Option<(&'a LexEntry, Number)>,
    prep: Option<&'a Preposition>,
    rel: Option<&'a RelVerb>,
    other: Option<&'a LexEntry>,
    fillers: Option<(&'a str, &'a str)>,
}

fn build_pair(
    aux: &AuxLex,
    src: &LexiconSource,
    paradigm: Paradigm,
    template: &Template,
    c: &Choice<'_>,
) -> Result<MinimalPair> {
    let gram = c.gram;
    let verb = c.critical.form(gram);
    // Relative-clause verb agreement: with the subject in subject relatives,
    // with the attractor in object relatives.
    let rel_num = match paradigm {
        Paradigm::AgreementObjRelClauseAcross => c.attr.map(|(_, n)| n).unwrap_or(gram),
        _ => gram,
    };
    let main_num = c.attr.map(|(_, n)| n).unwrap_or(gram);
    let fill = |subj_num| Fill {
        subj: c.subj,
        subj_num,
        gram_num: gram,
        attr: c.attr,
        verb,
        verb1: c.other.filter(|_| paradigm != Paradigm::AgreementObjRelClauseWithin).map(|v| v.form(gram)),
        main: c.other.filter(|_| paradigm == Paradigm::AgreementObjRelClauseWithin).map(|v| v.form(main_num)),
        rel: c.rel.map(|r| r.form(rel_num)),
        prep: c.prep,
        filler1: c.fillers.map(|f| f.0),
        filler2: c.fillers.map(|f| f.1),
    };
    let g = render(aux, paradigm, template, &fill(gram))?;
    let u = render(aux, paradigm, template, &fill(gram.flip()))?;
    if g.subject.1 - g.subject.0 != u.subject.1 - u.subject.0 {
        return Err(Error::Generation(format!(
            "{paradigm}: subject phrase of {} has different lengths in singular and plural",
            c.subj.lemma
        )));
    }
    let attractor = c.attr.map(|(e, n)| Attractor {
        lemma: e.lemma.clone(),
        form: e.form(n).to_string(),
        number: n,
    });
    let mut key = format!(
        "{paradigm}|{}|subj={}|num={gram:?}|verb={}",
        src.label,
        c.subj.lemma,
        c.critical.lemma()
    );
    if let Some(a) = &attractor {
        key += &format!("|attr={}:{:?}", a.lemma, a.number);
    }
    if let Some(p) = c.prep {
        key += &format!("|prep={}", p.form);
    }
    if let Some(r) = c.rel {
        key += &format!("|rel={}", r.lemma);
    }
    if let Some(o) = c.other {
        key += &format!("|other={}", o.lemma);
    }
    let verb_entry = match &c.critical {
        Critical::Lex(v) => Some(*v),
        Critical::Rel(_) => None,
    };
    let freq = pair_freq(c.subj, verb_entry, gram);
    let pair = MinimalPair {
        pair_id: pair_id(&key),
        paradigm,
        lexicon_source: src.label.clone(),
        critical_start: g.critical.0,
        critical_end: g.critical.1,
        metadata: PairMetadata {
            subject_lemma: c.subj.lemma.clone(),
            subject_gram: c.subj.form(gram).to_string(),
            subject_ungram: c.subj.form(gram.flip()).to_string(),
            number: gram,
            verb_lemma: c.critical.lemma().to_string(),
            verb_form: g.words[g.critical.0..g.critical.1].join(" "),
            subject_span: [g.subject.0, g.subject.1],
            attractor,
            preposition: c.prep.map(|p| p.form.clone()),
            rel_verb: c.rel.map(|r| r.lemma.clone()),
            other_verb: c.other.map(|o| o.lemma.clone()),
            freq,
        },
        grammatical: g.words,
        ungrammatical: u.words,
    };
    pair.check()?;
    Ok(pair)
}

fn require<T>(items: &[T], what: &str, paradigm: Paradigm) -> Result<()> {
    if items.is_empty() {
        return Err(Error::Generation(format!("{paradigm} needs at least one {what}")));
    }
    Ok(())
}

fn generate_paradigm(aux: &AuxLex, src: &LexiconSource, paradigm: Paradigm) -> Result<Vec<MinimalPair>> {
    let text = aux
        .templates
        .get(&paradigm)
        .ok_or_else(|| Error::Generation(format!("no template for {paradigm}")))?;
    let template = Template::parse(paradigm, text)?;
    let (nouns, verbs, objs) = (&src.nouns, &src.verbs, &src.object_nouns);
    require(nouns, "subject noun", paradigm)?;
    require(verbs, "verb", paradigm)?;
    let mut out = Vec::new();
    let mut push = |c: Choice<'_>| -> Result<()> {
        out.push(build_pair(aux, src, paradigm, &template, &c)?);
        Ok(())
    };
    let base = |subj, critical, gram| Choice {
        subj,
        critical,
        gram,
        attr: None,
        prep: None,
        rel: None,
        other: None,
        fillers: None,
    };
    match paradigm {
        Paradigm::SimpleAgreement => {
            for s in nouns {
                for v in verbs {
                    for g in Number::BOTH {
                        push(base(s, Critical::Lex(v), g))?;
                    }
                }
            }
        }
        Paradigm::AgreementPrepPhrase => {
            require(&aux.prepositions, "preposition", paradigm)?;
            require(objs, "object noun", paradigm)?;
            for s in nouns {
                for v in verbs {
                    for p in &aux.prepositions {
                        for o in objs {
                            for on in Number::BOTH {
                                for g in Number::BOTH {
                                    push(Choice {
                                        attr: Some((o, on)),
                                        prep: Some(p),
                                        ..base(s, Critical::Lex(v), g)
                                    })?;
                                }
                            }
                        }
                    }
                }
            }
        }
        Paradigm::AgreementSubjRelClause | Paradigm::AgreementObjRelClauseAcross => {
            require(&aux.rel_verbs, "relative-clause verb", paradigm)?;
            require(objs, "object noun", paradigm)?;
            for s in nouns {
                for v in verbs {
                    for r in &aux.rel_verbs {
                        for o in objs {
                            for on in Number::BOTH {
                                for g in Number::BOTH {
                                    push(Choice {
                                        attr: Some((o, on)),
                                        rel: Some(r),
                                        ..base(s, Critical::Lex(v), g)
                                    })?;
                                }
                            }
                        }
                    }
                }
            }
        }
        Paradigm::AgreementObjRelClauseWithin => {
            // The relative-clause subject (an object noun) controls the
            // critical relative-clause verb; the head noun is the attractor.
            require(&aux.rel_verbs, "relative-clause verb", paradigm)?;
            require(objs, "object noun", paradigm)?;
            for head in nouns {
                for main in verbs {
                    for r in &aux.rel_verbs {
                        for o in objs {
                            for hn in Number::BOTH {
                                for g in Number::BOTH {
                                    push(Choice {
                                        attr: Some((head, hn)),
                                        other: Some(main),
                                        ..base(o, Critical::Rel(r), g)
                                    })?;
                                }
                            }
                        }
                    }
                }
            }
        }
        Paradigm::AgreementVpCoord | Paradigm::AgreementLongVpCoord => {
            let long = paradigm == Paradigm::AgreementLongVpCoord;
            let filler = |v: &LexEntry| -> Result<&str> {
                aux.long_vp_fillers
                    .get(&v.lemma)
                    .map(String::as_str)
                    .ok_or_else(|| Error::Generation(format!("{paradigm}: no filler for verb {}", v.lemma)))
            };
            if verbs.len() < 2 {
                return Err(Error::Generation(format!("{paradigm} needs at least two verbs")));
            }
            for s in nouns {
                for (i, v1) in verbs.iter().enumerate() {
                    for v2 in &verbs[i + 1..] {
                        let fillers = if long { Some((filler(v1)?, filler(v2)?)) } else { None };
                        for g in Number::BOTH {
                            push(Choice {
                                other: Some(v1),
                                fillers,
                                ..base(s, Critical::Lex(v2), g)
                            })?;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Enumerates the full cross-product of every requested paradigm for one
/// lexicon source, sorted by paradigm then pair id.
pub fn generate(src: &LexiconSource, aux: &AuxLex, paradigms: &BTreeSet<Paradigm>) -> Result<Vec<MinimalPair>> {
    let per: Vec<Vec<MinimalPair>> = paradigms
        .par_iter()
        .map(|p| generate_paradigm(aux, src, *p))
        .collect::<Result<_>>()?;
    let mut pairs: Vec<MinimalPair> = per.into_iter().flatten().collect();
    pairs.sort_by(|a, b| (a.paradigm, &a.pair_id).cmp(&(b.paradigm, &b.pair_id)));
    if let Some(w) = pairs.windows(2).find(|w| w[0].pair_id == w[1].pair_id) {
        return Err(Error::Generation(format!("duplicate pair id {}", w[0].pair_id)));
    }
    Ok(pairs)
}

pub fn write_benchmark(pairs: &[MinimalPair], path: impl AsRef<Path>) -> Result<()> {
    jsonl::write_jsonl(path, pairs)
}

pub fn read_benchmark(path: impl AsRef<Path>) -> Result<Vec<MinimalPair>> {
    jsonl::read_jsonl(path)
}
