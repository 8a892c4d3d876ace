//! Morphological annotations in a CoNLL-U-like tab-separated layout.
//!
//! Two layouts are accepted per line: the compact `FORM LEMMA UPOS FEATS`, and
//! full ten-column CoNLL-U (`ID FORM LEMMA UPOS XPOS FEATS ...`). Blank lines and
//! `#` comments are skipped, as are CoNLL-U multiword ranges (`1-2`) and empty
//! nodes (`1.1`). Only the features used for agreement filtering are kept.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::CaseMode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Upos {
    Noun,
    Verb,
    Other(String),
}

impl FromStr for Upos {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "NOUN" => Upos::Noun,
            "VERB" => Upos::Verb,
            other => Upos::Other(other.to_string()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Feature {
    Number,
    Person,
    Tense,
    Mood,
    VerbForm,
    Case,
}

impl Feature {
    fn parse(key: &str) -> Option<Feature> {
        Some(match key {
            "Number" => Feature::Number,
            "Person" => Feature::Person,
            "Tense" => Feature::Tense,
            "Mood" => Feature::Mood,
            "VerbForm" => Feature::VerbForm,
            "Case" => Feature::Case,
            _ => return None,
        })
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedToken {
    pub form: String,
    pub lemma: String,
    pub upos: Upos,
    pub feats: BTreeMap<Feature, String>,
}

impl AnnotatedToken {
    pub fn feat(&self, f: Feature) -> Option<&str> {
        self.feats.get(&f).map(String::as_str)
    }
}

fn parse_feats(raw: &str, line: usize) -> Result<BTreeMap<Feature, String>> {
    let mut feats = BTreeMap::new();
    if raw == "_" || raw.is_empty() {
        return Ok(feats);
    }
    for item in raw.split('|') {
        let (k, v) = item.split_once('=').ok_or_else(|| Error::MalformedAnnotation {
            line,
            reason: format!("feature {item:?} is not Key=Value"),
        })?;
        if k.is_empty() || v.is_empty() {
            return Err(Error::MalformedAnnotation {
                line,
                reason: format!("feature {item:?} is not Key=Value"),
            });
        }
        if let Some(f) = Feature::parse(k) {
            feats.insert(f, v.to_string());
        }
    }
    Ok(feats)
}

pub fn parse_annotations(text: &str, case: CaseMode) -> Result<Vec<AnnotatedToken>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = trimmed.split('\t').collect();
        let (form, lemma, upos, feats) = match cols.len() {
            4 => (cols[0], cols[1], cols[2], cols[3]),
            10 => {
                if cols[0].contains('-') || cols[0].contains('.') {
                    continue;
                }
                (cols[1], cols[2], cols[3], cols[5])
            }
            n => {
                return Err(Error::MalformedAnnotation {
                    line: line_no,
                    reason: format!("expected 4 or 10 tab-separated columns, found {n}"),
                })
            }
        };
        if form.is_empty() || form == "_" {
            return Err(Error::MalformedAnnotation {
                line: line_no,
                reason: "empty form".into(),
            });
        }
        let lemma = if lemma.is_empty() || lemma == "_" { form } else { lemma };
        out.push(AnnotatedToken {
            form: case.apply(form),
            lemma: case.apply(lemma),
            upos: upos.parse().unwrap_or_else(|never| match never {}),
            feats: parse_feats(feats, line_no)?,
        });
    }
    Ok(out)
}

pub fn load_annotations(path: impl AsRef<Path>, case: CaseMode) -> Result<Vec<AnnotatedToken>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(&text, case)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_layout() {
        let toks = parse_annotations(
            "# comment\nResidents\tresident\tNOUN\tNumber=Plur\nawaits\tawait\tVERB\tMood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin\n\n",
            CaseMode::Lower,
        )
        .unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].form, "residents");
        assert_eq!(toks[0].upos, Upos::Noun);
        assert_eq!(toks[0].feat(Feature::Number), Some("Plur"));
        assert_eq!(toks[1].feat(Feature::Person), Some("3"));
        assert_eq!(toks[1].feat(Feature::Mood), Some("Ind"));
    }

    #[test]
    fn conllu_layout_skips_ranges() {
        let text = "1-2\tau\t_\t_\t_\t_\t_\t_\t_\t_\n\
                    1\tà\tà\tADP\t_\t_\t0\t_\t_\t_\n\
                    2\tle\tle\tDET\t_\tGender=Masc|Number=Sing\t0\t_\t_\t_\n\
                    2.1\tx\tx\tX\t_\t_\t_\t_\t_\t_\n";
        let toks = parse_annotations(text, CaseMode::Lower).unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[1].upos, Upos::Other("DET".into()));
        // Gender is outside the retained feature set
        assert_eq!(toks[1].feats.len(), 1);
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let err = parse_annotations("a\ta\tNOUN\t_\nb\tb\tNOUN\n", CaseMode::Lower).unwrap_err();
        assert!(matches!(err, Error::MalformedAnnotation { line: 2, .. }));
        let err = parse_annotations("a\ta\tNOUN\tNumber\n", CaseMode::Lower).unwrap_err();
        assert!(matches!(err, Error::MalformedAnnotation { line: 1, .. }));
        let err = parse_annotations("_\ta\tNOUN\t_\n", CaseMode::Lower).unwrap_err();
        assert!(matches!(err, Error::MalformedAnnotation { line: 1, .. }));
    }
}
