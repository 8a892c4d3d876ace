use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use minpair_core::benchgen::generate;
use minpair_core::corpus::load_corpus;
use minpair_core::stats::compute_stats;
use minpair_core::{AuxLex, CaseMode, Language, Lexicon, Paradigm, PunctuationPolicy, PunctuationSet};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn expected_counts(lang: &str) -> [usize; 7] {
    // simple, prep, subj_rel, across, within, vp_coord, long_vp_coord
    match lang {
        "en" => [200, 4800, 3200, 3200, 3200, 900, 900],
        "fr" => [126, 2520, 504, 504, 504, 378, 378],
        "de" => [200, 4000, 1600, 1600, 1600, 900, 900],
        _ => unreachable!(),
    }
}

#[test]
fn published_lexicons_generate_published_counts() {
    let all: BTreeSet<Paradigm> = Paradigm::ALL.into_iter().collect();
    for lang in ["en", "fr", "de"] {
        let lex = Lexicon::load(fixtures().join(format!("lexicon/published_{lang}.json"))).unwrap();
        let aux = AuxLex::load(fixtures().join(format!("aux/{lang}.json"))).unwrap();
        for src in &lex.sources {
            let pairs = generate(src, &aux, &all).unwrap();
            for (p, want) in Paradigm::ALL.into_iter().zip(expected_counts(lang)) {
                let got = pairs.iter().filter(|x| x.paradigm == p).count();
                assert_eq!(got, want, "{lang}/{} {p}", src.label);
            }
            for pair in &pairs {
                pair.check().unwrap_or_else(|e| panic!("{}: {e}", pair.pair_id));
            }
        }
    }
}

#[test]
fn surface_forms_follow_templates() {
    let all: BTreeSet<Paradigm> = Paradigm::ALL.into_iter().collect();
    let sentences = |lang: &str| -> Vec<String> {
        let lex = Lexicon::load(fixtures().join(format!("lexicon/published_{lang}.json"))).unwrap();
        let aux = AuxLex::load(fixtures().join(format!("aux/{lang}.json"))).unwrap();
        generate(lex.source("C").unwrap(), &aux, &all)
            .unwrap()
            .into_iter()
            .map(|p| p.grammatical.join(" "))
            .collect()
    };
    let en = sentences("en");
    assert!(en.contains(&"the farmer next to the guards arrives".to_string()));
    let fr = sentences("fr");
    assert!(fr.iter().any(|s| s == "l' enfant à côté de la femme met"), "{:?}", &fr[..5]);
    let de = sentences("de");
    assert!(de.iter().any(|s| s == "der sohn , den die bauern mögen , kommt"), "{:?}", &de[..5]);
}

#[test]
fn stats_match_independent_oracle() {
    let expected: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixtures().join("stats/expected.json")).unwrap()).unwrap();
    for (name, modes) in expected.as_object().unwrap() {
        let corpus = load_corpus(fixtures().join(format!("corpora/{name}.txt")), name.as_str(), Language::En, CaseMode::Lower).unwrap();
        for (mode, policy) in [("exclude", PunctuationPolicy::Exclude), ("include", PunctuationPolicy::Include)] {
            let got = serde_json::to_value(compute_stats(&corpus, policy, &PunctuationSet::Unicode).unwrap().to_json()).unwrap();
            let want = &modes[mode];
            assert_eq!(got["token_count"], want["token_count"], "{name}/{mode}");
            for key in ["avg_sentence_length", "interrogative_fraction", "ttr_1", "ttr_2", "ttr_3"] {
                let (g, w) = (got[key].as_f64().unwrap(), want[key].as_f64().unwrap());
                assert!((g - w).abs() <= 1e-12, "{name}/{mode}/{key}: {g} vs {w}");
            }
        }
    }
}
