//! One function per subcommand. Each reads its inputs, runs the stage, writes
//! its artifact with a manifest and returns a short JSON summary for stdout.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;
use serde_json::{json, Value};

use minpair_core::annotation::load_annotations;
use minpair_core::benchgen::{generate, read_benchmark, write_benchmark};
use minpair_core::corpus::{load_corpus, word_frequencies};
use minpair_core::jsonl::{read_jsonl, write_jsonl};
use minpair_core::lexicon::{filter_candidates, select_per_bin, shared_vocabulary, CandidatePool, Picks, Pos};
use minpair_core::manifest::{write_json_artifact, write_sidecar, Manifest};
use minpair_core::scoring::{export_records, score_pairs, validate_score_file, NgramScorer, ScoreFile, ScoreSource};
use minpair_core::stats::compute_stats;
use minpair_core::{
    analysis, scoring, AuxLex, BpeModel, CaseMode, Corpus, EvalReport, FreqTable, Language, Lexicon, NgramModel,
    PairResult, Paradigm, PunctuationSet, Region, RegressionFit,
};

use crate::args::*;

/// An error tagged with the pipeline stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: String,
    pub source: anyhow::Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.source)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(self.source.as_ref())
    }
}

pub type Summary = anyhow::Result<Value>;

pub fn in_stage<T>(stage: &str, r: anyhow::Result<T>) -> anyhow::Result<T> {
    r.map_err(|source| {
        if source.is::<StageError>() {
            source
        } else {
            StageError { stage: stage.to_string(), source }.into()
        }
    })
}

pub fn absolute(p: &Path) -> anyhow::Result<PathBuf> {
    std::path::absolute(p).with_context(|| format!("resolving {}", p.display()))
}

fn manifest(stage: &str, params: Value, inputs: &[&Path]) -> anyhow::Result<Manifest> {
    let mut m = Manifest::new(stage, params);
    for p in inputs {
        m = m.input(absolute(p)?)?;
    }
    Ok(m)
}

fn ensure_parent(path: &Path) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize, m: Manifest) -> anyhow::Result<()> {
    ensure_parent(path)?;
    write_json_artifact(path, value, m)?;
    Ok(())
}

fn write_lines<T: Serialize>(path: &Path, items: &[T], m: Manifest) -> anyhow::Result<()> {
    ensure_parent(path)?;
    write_jsonl(path, items)?;
    write_sidecar(path, m)?;
    Ok(())
}

fn language(code: &str) -> Language {
    code.parse().unwrap_or_else(|never| match never {})
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn load(args: &CorpusArgs) -> anyhow::Result<Corpus> {
    let id = args.id.clone().unwrap_or_else(|| stem(&args.corpus));
    let corpus = load_corpus(&args.corpus, id, language(&args.language), args.case.into())?;
    if corpus.is_empty() {
        bail!("{} contains no sentences", args.corpus.display());
    }
    Ok(corpus)
}

fn corpus_params(args: &CorpusArgs, corpus: &Corpus) -> Value {
    json!({
        "corpus_id": corpus.id,
        "language": args.language,
        "case": format!("{:?}", args.case).to_lowercase(),
    })
}

pub fn stats(args: &StatsArgs) -> Summary {
    let corpus = load(&args.corpus)?;
    let punct = match &args.punct_set {
        Some(set) => PunctuationSet::custom(set.iter().cloned()),
        None => PunctuationSet::Unicode,
    };
    let s = compute_stats(&corpus, args.punctuation.into(), &punct)?;
    let mut params = corpus_params(&args.corpus, &corpus);
    params["punctuation"] = json!(format!("{:?}", args.punctuation).to_lowercase());
    params["punct_set"] = json!(args.punct_set);
    let mut body = serde_json::to_value(s.to_json())?;
    body["corpus"] = json!(corpus.id);
    body["sentence_count"] = json!(s.sentence_count);
    if let Some(out) = &args.out {
        write_json(out, &body, manifest("stats", params.clone(), &[&args.corpus.corpus])?)?;
    }
    if let Some(out) = &args.freqs_out {
        ensure_parent(out)?;
        let tsv = word_frequencies(&corpus).to_tsv();
        std::fs::write(out, tsv).with_context(|| format!("writing {}", out.display()))?;
        write_sidecar(out, manifest("word-frequencies", params, &[&args.corpus.corpus])?)?;
    }
    Ok(body)
}

pub fn train_tokenizer(args: &TrainTokenizerArgs) -> Summary {
    let corpus = load(&args.corpus)?;
    let model = BpeModel::train(&corpus, args.vocab_size)?;
    let mut params = corpus_params(&args.corpus, &corpus);
    params["vocab_size"] = json!(args.vocab_size);
    log::info!("trained {} symbols, {} merges", model.vocab_size(), model.merges().len());
    write_json(&args.out, &model.to_json_value(), manifest("train-tokenizer", params, &[&args.corpus.corpus])?)?;
    Ok(json!({ "vocab_size": model.vocab_size(), "merges": model.merges().len(), "out": args.out }))
}

pub fn train_ngram(args: &TrainNgramArgs) -> Summary {
    let corpus = load(&args.corpus)?;
    let tokenizer = BpeModel::load(&args.tokenizer)?;
    let sequences = corpus
        .sentences
        .iter()
        .map(|s| tokenizer.encode(s).map(|t| t.ids()))
        .collect::<minpair_core::Result<Vec<_>>>()?;
    let model = NgramModel::train(&sequences, tokenizer.bow_flags().to_vec(), args.order, args.discount)?;
    let mut params = corpus_params(&args.corpus, &corpus);
    params["order"] = json!(args.order);
    params["discount"] = json!(args.discount);
    let m = manifest("train-ngram", params, &[&args.corpus.corpus, &args.tokenizer])?;
    write_json(&args.out, &model.to_json_value(), m)?;
    Ok(json!({ "order": args.order, "sentences": sequences.len(), "out": args.out }))
}

fn read_allowlist(path: &Path, case: CaseMode) -> anyhow::Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| case.apply(l))
        .collect())
}

pub fn build_lexicon(args: &BuildLexiconArgs) -> Summary {
    let lang = language(&args.language);
    let case: CaseMode = args.case.into();
    let id_a = args.corpus_a_id.clone().unwrap_or_else(|| stem(&args.corpus_a));
    let id_b = args.corpus_b_id.clone().unwrap_or_else(|| stem(&args.corpus_b));
    if id_a == id_b {
        bail!("both corpora have id {id_a:?}; pass --corpus-a-id/--corpus-b-id");
    }
    let a = word_frequencies(&load_corpus(&args.corpus_a, id_a.as_str(), lang.clone(), case)?);
    let b = word_frequencies(&load_corpus(&args.corpus_b, id_b.as_str(), lang.clone(), case)?);
    let shared = shared_vocabulary(&a, &b);
    let mut tokens = Vec::new();
    for path in &args.annotations {
        tokens.extend(load_annotations(path, case)?);
    }
    let allow = read_allowlist(&args.allowlist, case)?;
    let freqs = [(id_a.as_str(), &a), (id_b.as_str(), &b)];
    let nouns = filter_candidates(&tokens, Pos::Noun, &lang, &allow, &shared, &freqs);
    let verbs = filter_candidates(&tokens, Pos::Verb, &lang, &allow, &shared, &freqs);
    log::info!("{} noun and {} verb candidates in {} shared forms", nouns.len(), verbs.len(), shared.len());
    let picks = Picks::load(&args.picks)?;
    if picks.language != lang {
        bail!("picks are for language {}, not {}", picks.language, lang);
    }
    let pool = CandidatePool { nouns: &nouns, verbs: &verbs };
    let (lexicon, warnings) = select_per_bin(lang, [&id_a, &id_b], pool, &picks, args.bins)?;

    let params = json!({
        "language": args.language,
        "corpus_ids": [id_a, id_b],
        "bins": args.bins,
        "case": format!("{:?}", args.case).to_lowercase(),
    });
    let mut inputs: Vec<&Path> = vec![&args.corpus_a, &args.corpus_b];
    inputs.extend(args.annotations.iter().map(PathBuf::as_path));
    inputs.extend([args.allowlist.as_path(), args.picks.as_path()]);
    write_json(&args.out, &lexicon, manifest("build-lexicon", params, &inputs)?)?;
    let sizes: Vec<Value> = lexicon
        .sources
        .iter()
        .map(|s| json!({ "label": s.label, "nouns": s.nouns.len(), "verbs": s.verbs.len(), "object_nouns": s.object_nouns.len() }))
        .collect();
    Ok(json!({ "sources": sizes, "warnings": warnings, "out": args.out }))
}

fn parse_paradigms(ids: &Option<Vec<String>>) -> anyhow::Result<BTreeSet<Paradigm>> {
    match ids {
        None => Ok(Paradigm::ALL.into_iter().collect()),
        Some(ids) => Ok(ids.iter().map(|s| s.parse()).collect::<minpair_core::Result<_>>()?),
    }
}

pub fn gen_benchmark(args: &GenBenchmarkArgs) -> Summary {
    let lang = language(&args.language);
    let lexicon = Lexicon::load(&args.lexicon)?;
    let aux = AuxLex::load(&args.aux)?;
    if lexicon.language != lang || aux.language != lang {
        bail!(
            "language mismatch: --language {lang}, lexicon {}, aux {}",
            lexicon.language,
            aux.language
        );
    }
    let paradigms = parse_paradigms(&args.paradigms)?;
    let sources = match &args.source {
        Some(label) => vec![lexicon.source(label)?],
        None => lexicon.sources.iter().collect(),
    };
    let mut pairs = Vec::new();
    for src in sources {
        pairs.extend(generate(src, &aux, &paradigms)?);
    }
    let params = json!({
        "language": args.language,
        "source": args.source,
        "paradigms": paradigms.iter().map(|p| p.id()).collect::<Vec<_>>(),
    });
    let m = manifest("gen-benchmark", params, &[&args.lexicon, &args.aux])?;
    ensure_parent(&args.out)?;
    write_benchmark(&pairs, &args.out)?;
    write_sidecar(&args.out, m)?;
    Ok(json!({ "pairs": pairs.len(), "out": args.out }))
}

pub fn score(args: &ScoreArgs) -> Summary {
    if args.validate_only {
        let path = args.scores.as_ref().expect("clap requires --scores");
        let summary = validate_score_file(path)?;
        return Ok(json!({
            "valid": true,
            "records": summary.records,
            "causal": summary.causal,
            "mlm_pll_word_l2r": summary.pll,
        }));
    }
    let (Some(bench), Some(out)) = (&args.benchmark, &args.out) else {
        bail!("--benchmark and --out are required unless --validate-only is given");
    };
    let pairs = read_benchmark(bench)?;
    let region: Region = args.region.into();

    let loaded;
    let file;
    let mut inputs: Vec<&Path> = vec![bench];
    let source: &dyn ScoreSource = match (&args.ngram, &args.tokenizer, &args.scores) {
        (Some(ngram), Some(tok), None) => {
            let tokenizer = BpeModel::load(tok)?;
            let model = NgramModel::load(ngram)?;
            if tokenizer.vocab_size() != model.vocab_size() {
                bail!(
                    "tokenizer has {} symbols but the n-gram model was trained over {}",
                    tokenizer.vocab_size(),
                    model.vocab_size()
                );
            }
            inputs.extend([ngram.as_path(), tok.as_path()]);
            loaded = (tokenizer, model);
            &NgramScorer { tokenizer: &loaded.0, model: &loaded.1 }
        }
        (None, _, Some(scores)) => {
            inputs.push(scores);
            file = ScoreFile::load(scores)?;
            &file
        }
        _ => bail!("give either --ngram with --tokenizer, or --scores"),
    };
    let results = score_pairs(&pairs, source, region)?;
    let params = json!({ "region": format!("{region:?}").to_lowercase() });
    write_lines(out, &results, manifest("score", params.clone(), &inputs)?)?;
    if let Some(rec_out) = &args.records_out {
        let records = export_records(&pairs, source)?;
        write_lines(rec_out, &records, manifest("score-records", params, &inputs)?)?;
    }
    let correct = results.iter().filter(|r| r.correct).count();
    Ok(json!({ "pairs": results.len(), "correct": correct, "out": out }))
}

pub fn read_results(path: &Path) -> anyhow::Result<Vec<PairResult>> {
    Ok(read_jsonl(path)?)
}

pub fn evaluate(args: &EvaluateArgs) -> Summary {
    let seeds = args.results.iter().map(|p| read_results(p)).collect::<anyhow::Result<Vec<_>>>()?;
    let report = scoring::aggregate(&seeds)?;
    let inputs: Vec<&Path> = args.results.iter().map(PathBuf::as_path).collect();
    let m = manifest("evaluate", json!({ "seeds": seeds.len() }), &inputs)?;
    write_json(&args.out, &report, m)?;
    Ok(json!({ "mean": report.mean, "std": report.std, "seeds": seeds.len(), "out": args.out }))
}

pub fn regress(args: &RegressArgs) -> Summary {
    let mut results = Vec::new();
    for p in &args.results {
        results.extend(read_results(p)?);
    }
    let mut pairs = Vec::new();
    for p in &args.benchmark {
        pairs.extend(read_benchmark(p)?);
    }
    let freqs = FreqTable::load_tsv(&args.freqs)?;
    let rows = analysis::build_rows(&results, &pairs, &freqs, args.source.as_deref())?;
    let scope = args.source.as_deref().unwrap_or("pooled");
    let fit = analysis::fit_ols(&rows, scope)?;
    let mut inputs: Vec<&Path> = args.results.iter().map(PathBuf::as_path).collect();
    inputs.extend(args.benchmark.iter().map(PathBuf::as_path));
    inputs.push(&args.freqs);
    write_json(&args.out, &fit, manifest("regress", json!({ "scope": scope }), &inputs)?)?;
    Ok(json!({ "scope": scope, "n": fit.n, "r2": fit.r_squared, "out": args.out }))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn correlate(args: &CorrelateArgs) -> Summary {
    if args.fits.len() != args.reports.len() {
        bail!("{} fits but {} reports", args.fits.len(), args.reports.len());
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (f, r) in args.fits.iter().zip(&args.reports) {
        let fit: RegressionFit = read_json(f)?;
        let report: EvalReport = read_json(r)?;
        points.push((fit.r_squared, report.mean));
        labels.push(stem(f));
    }
    let mut corr = analysis::correlate_r2_accuracy(&points)?;
    corr.labels = labels;
    let mut inputs: Vec<&Path> = args.fits.iter().map(PathBuf::as_path).collect();
    inputs.extend(args.reports.iter().map(PathBuf::as_path));
    write_json(&args.out, &corr, manifest("correlate", json!({}), &inputs)?)?;
    Ok(json!({ "r": corr.r, "p_value": corr.p_value, "n": points.len(), "out": args.out }))
}
