//! The `pipeline` subcommand: stats, tokenizers, n-gram models, lexicon,
//! benchmarks, scoring, reports, regressions and the R²/accuracy correlation,
//! driven by one JSON config.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;
use serde_json::{json, Value};

use minpair_core::manifest::{sha256_file, verify_artifact, write_json_artifact, Manifest};
use minpair_core::{CaseMode, PunctuationPolicy, Region};

use crate::args::*;
use crate::commands::{self, absolute, in_stage};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub id: String,
    pub path: PathBuf,
    #[serde(default)]
    pub annotations: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenizerConfig {
    #[serde(default = "default_vocab")]
    pub vocab_size: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NgramConfig {
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_discount")]
    pub discount: f64,
}

fn default_vocab() -> usize {
    minpair_core::tokenizer::DEFAULT_VOCAB_SIZE
}
fn default_order() -> usize {
    minpair_core::ngram::DEFAULT_ORDER
}
fn default_discount() -> f64 {
    minpair_core::ngram::DEFAULT_DISCOUNT
}
fn default_bins() -> u32 {
    minpair_core::lexicon::DEFAULT_NUM_BINS
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconConfig {
    /// A frozen lexicon to use instead of building one.
    #[serde(default)]
    pub frozen: Option<PathBuf>,
    #[serde(default)]
    pub allowlist: Option<PathBuf>,
    #[serde(default)]
    pub picks: Option<PathBuf>,
    #[serde(default = "default_bins")]
    pub bins: u32,
}

/// Externally produced score files, one per seed and lexicon source.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreGroup {
    pub name: String,
    /// Label of the corpus the model was trained on; its frequencies feed the regression.
    pub train_corpus: String,
    pub scores: BTreeMap<String, Vec<PathBuf>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub language: String,
    /// Label (the lexicon source it feeds) → corpus.
    pub corpora: BTreeMap<String, CorpusEntry>,
    #[serde(default)]
    pub case_mode: CaseMode,
    #[serde(default)]
    pub punctuation: PunctuationPolicy,
    #[serde(default = "tokenizer_default")]
    pub tokenizer: TokenizerConfig,
    #[serde(default = "ngram_default")]
    pub ngram: NgramConfig,
    pub lexicon: LexiconConfig,
    pub aux: PathBuf,
    #[serde(default)]
    pub paradigms: Option<Vec<String>>,
    #[serde(default)]
    pub region: Region,
    #[serde(default)]
    pub score_groups: Vec<ScoreGroup>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn tokenizer_default() -> TokenizerConfig {
    TokenizerConfig { vocab_size: default_vocab() }
}
fn ngram_default() -> NgramConfig {
    NgramConfig { order: default_order(), discount: default_discount() }
}

impl PipelineConfig {
    /// Reads a config and resolves its paths against the config's directory.
    pub fn load(path: &Path) -> anyhow::Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: PipelineConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = absolute(path)?.parent().map(Path::to_path_buf).unwrap_or_default();
        let fix = |p: &mut PathBuf| *p = base.join(&*p);
        for c in cfg.corpora.values_mut() {
            fix(&mut c.path);
            if let Some(a) = c.annotations.as_mut() {
                fix(a);
            }
        }
        for p in [&mut cfg.lexicon.frozen, &mut cfg.lexicon.allowlist, &mut cfg.lexicon.picks, &mut cfg.out_dir]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
        fix(&mut cfg.aux);
        for g in &mut cfg.score_groups {
            g.scores.values_mut().flatten().for_each(fix);
        }
        Ok(cfg)
    }

    fn apply(&mut self, args: &PipelineArgs) -> anyhow::Result<()> {
        if let Some(d) = &args.out_dir {
            self.out_dir = Some(absolute(d)?);
        }
        if let Some(v) = args.vocab_size {
            self.tokenizer.vocab_size = v;
        }
        if let Some(o) = args.order {
            self.ngram.order = o;
        }
        if let Some(d) = args.discount {
            self.ngram.discount = d;
        }
        if let Some(b) = args.bins {
            self.lexicon.bins = b;
        }
        if let Some(r) = args.region {
            self.region = r.into();
        }
        Ok(())
    }

    /// Checks that every referenced input exists.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.corpora.len() != 2 {
            bail!("exactly two corpora are required, found {}", self.corpora.len());
        }
        let mut files: Vec<&Path> = vec![&self.aux];
        for c in self.corpora.values() {
            files.push(&c.path);
            if let Some(a) = &c.annotations {
                files.push(a);
            }
        }
        match (&self.lexicon.frozen, &self.lexicon.allowlist, &self.lexicon.picks) {
            (Some(f), _, _) => files.push(f),
            (None, Some(a), Some(p)) => {
                files.extend([a.as_path(), p.as_path()]);
                if self.corpora.values().any(|c| c.annotations.is_none()) {
                    bail!("building a lexicon needs annotations for both corpora");
                }
            }
            _ => bail!("lexicon needs either `frozen` or both `allowlist` and `picks`"),
        }
        for g in &self.score_groups {
            if !self.corpora.contains_key(&g.train_corpus) {
                bail!("score group {} names unknown corpus label {}", g.name, g.train_corpus);
            }
            files.extend(g.scores.values().flatten().map(PathBuf::as_path));
        }
        for f in files {
            if !f.is_file() {
                bail!("{} does not exist", f.display());
            }
        }
        if self.out_dir.is_none() {
            bail!("no output directory: set `out_dir` or pass --out-dir");
        }
        Ok(())
    }
}

fn case_arg(c: CaseMode) -> CaseArg {
    match c {
        CaseMode::Lower => CaseArg::Lower,
        CaseMode::Preserve => CaseArg::Preserve,
    }
}

fn region_arg(r: Region) -> RegionArg {
    match r {
        Region::Critical => RegionArg::Critical,
        Region::Sequence => RegionArg::Sequence,
    }
}

/// A scored (model, benchmark source) combination.
struct Scored {
    model: String,
    source: String,
    /// Training-corpus label whose frequencies explain this model's ΔP.
    train_corpus: String,
    results: Vec<PathBuf>,
}

pub fn run(args: &PipelineArgs) -> commands::Summary {
    let mut cfg = in_stage("config", PipelineConfig::load(&args.config))?;
    in_stage("config", cfg.apply(args).and_then(|()| cfg.validate()))?;
    let out = cfg.out_dir.clone().expect("validated");
    let dir = |parts: &[&str]| parts.iter().fold(out.clone(), |p, s| p.join(s));
    let corpus_args = |c: &CorpusEntry| CorpusArgs {
        corpus: c.path.clone(),
        id: Some(c.id.clone()),
        language: cfg.language.clone(),
        case: case_arg(cfg.case_mode),
    };
    let punct = match cfg.punctuation {
        PunctuationPolicy::Include => PunctArg::Include,
        PunctuationPolicy::Exclude => PunctArg::Exclude,
    };
    let mut artifacts: Vec<PathBuf> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    let mut stats = BTreeMap::new();
    for (label, c) in &cfg.corpora {
        let a = StatsArgs {
            corpus: corpus_args(c),
            punctuation: punct,
            punct_set: None,
            out: Some(dir(&["stats", &format!("{}.json", c.id)])),
            freqs_out: Some(dir(&["freqs", &format!("{}.tsv", c.id)])),
        };
        stats.insert(label.clone(), in_stage("stats", commands::stats(&a))?);
        artifacts.extend([a.out.unwrap(), a.freqs_out.unwrap()]);
    }

    let lexicon_path = match &cfg.lexicon.frozen {
        Some(f) => f.clone(),
        None => {
            let (la, ca) = cfg.corpora.iter().next().expect("two corpora");
            let (lb, cb) = cfg.corpora.iter().nth(1).expect("two corpora");
            let a = BuildLexiconArgs {
                corpus_a: ca.path.clone(),
                corpus_a_id: Some(ca.id.clone()),
                corpus_b: cb.path.clone(),
                corpus_b_id: Some(cb.id.clone()),
                annotations: vec![ca.annotations.clone().expect("validated"), cb.annotations.clone().expect("validated")],
                allowlist: cfg.lexicon.allowlist.clone().expect("validated"),
                picks: cfg.lexicon.picks.clone().expect("validated"),
                bins: cfg.lexicon.bins,
                language: cfg.language.clone(),
                case: case_arg(cfg.case_mode),
                out: dir(&["lexicon.json"]),
            };
            let summary = in_stage("build-lexicon", commands::build_lexicon(&a))?;
            for w in summary["warnings"].as_array().into_iter().flatten() {
                warnings.push(format!("build-lexicon ({la}/{lb}): {}", w.as_str().unwrap_or_default()));
            }
            artifacts.push(a.out.clone());
            a.out
        }
    };

    let mut benchmarks = BTreeMap::new();
    for label in cfg.corpora.keys() {
        let a = GenBenchmarkArgs {
            lexicon: lexicon_path.clone(),
            aux: cfg.aux.clone(),
            language: cfg.language.clone(),
            source: Some(label.clone()),
            paradigms: cfg.paradigms.clone(),
            out: dir(&["benchmark", &format!("{label}.jsonl")]),
        };
        in_stage("gen-benchmark", commands::gen_benchmark(&a))?;
        artifacts.push(a.out.clone());
        benchmarks.insert(label.clone(), a.out);
    }

    let mut scored = Vec::new();
    for (label, c) in &cfg.corpora {
        let model = format!("ngram-{label}");
        let tok = TrainTokenizerArgs {
            corpus: corpus_args(c),
            vocab_size: cfg.tokenizer.vocab_size,
            out: dir(&["models", &model, "tokenizer.json"]),
        };
        in_stage("train-tokenizer", commands::train_tokenizer(&tok))?;
        let lm = TrainNgramArgs {
            corpus: corpus_args(c),
            tokenizer: tok.out.clone(),
            order: cfg.ngram.order,
            discount: cfg.ngram.discount,
            out: dir(&["models", &model, "ngram.json"]),
        };
        in_stage("train-ngram", commands::train_ngram(&lm))?;
        artifacts.extend([tok.out.clone(), lm.out.clone()]);
        for (source, bench) in &benchmarks {
            let a = ScoreArgs {
                benchmark: Some(bench.clone()),
                ngram: Some(lm.out.clone()),
                tokenizer: Some(tok.out.clone()),
                scores: None,
                region: region_arg(cfg.region),
                validate_only: false,
                records_out: None,
                out: Some(dir(&["results", &format!("{model}_{source}.jsonl")])),
            };
            in_stage("score", commands::score(&a))?;
            let out = a.out.expect("set above");
            artifacts.push(out.clone());
            scored.push(Scored { model: model.clone(), source: source.clone(), train_corpus: label.clone(), results: vec![out] });
        }
    }

    for g in &cfg.score_groups {
        for (source, files) in &g.scores {
            let bench = benchmarks
                .get(source)
                .with_context(|| format!("score group {} names unknown source {source}", g.name));
            let bench = in_stage("score", bench)?;
            let mut results = Vec::new();
            for (k, f) in files.iter().enumerate() {
                let a = ScoreArgs {
                    benchmark: Some(bench.clone()),
                    ngram: None,
                    tokenizer: None,
                    scores: Some(f.clone()),
                    region: region_arg(cfg.region),
                    validate_only: false,
                    records_out: None,
                    out: Some(dir(&["results", &format!("{}_{source}_seed{k}.jsonl", g.name)])),
                };
                in_stage("score", commands::score(&a))?;
                results.push(a.out.expect("set above"));
            }
            artifacts.extend(results.iter().cloned());
            scored.push(Scored { model: g.name.clone(), source: source.clone(), train_corpus: g.train_corpus.clone(), results });
        }
    }

    let mut table = Vec::new();
    let mut fit_paths = Vec::new();
    let mut report_paths = Vec::new();
    for s in &scored {
        let name = format!("{}_{}", s.model, s.source);
        let report = EvaluateArgs { results: s.results.clone(), out: dir(&["reports", &format!("{name}.json")]) };
        let rs = in_stage("evaluate", commands::evaluate(&report))?;
        artifacts.push(report.out.clone());
        let freqs = dir(&["freqs", &format!("{}.tsv", cfg.corpora[&s.train_corpus].id)]);
        let fit = RegressArgs {
            results: s.results.clone(),
            benchmark: vec![benchmarks[&s.source].clone()],
            freqs,
            source: Some(s.source.clone()),
            out: dir(&["fits", &format!("{name}.json")]),
        };
        let fs = match in_stage("regress", commands::regress(&fit)) {
            Ok(v) => {
                artifacts.push(fit.out.clone());
                fit_paths.push(fit.out.clone());
                report_paths.push(report.out.clone());
                v
            }
            Err(e) => {
                warnings.push(format!("regress {name}: {:#}", e));
                Value::Null
            }
        };
        table.push(json!({
            "model": s.model,
            "source": s.source,
            "accuracy": rs["mean"],
            "accuracy_std": rs["std"],
            "r2": fs["r2"],
        }));
    }

    // pooled fit per model over every lexicon source
    let mut pooled = BTreeMap::new();
    for s in &scored {
        let e = pooled.entry(s.model.clone()).or_insert_with(|| (s.train_corpus.clone(), Vec::new(), Vec::new()));
        e.1.extend(s.results.iter().cloned());
        e.2.push(benchmarks[&s.source].clone());
    }
    let mut pooled_fits = BTreeMap::new();
    for (model, (train, results, benches)) in pooled {
        let a = RegressArgs {
            results,
            benchmark: benches,
            freqs: dir(&["freqs", &format!("{}.tsv", cfg.corpora[&train].id)]),
            source: None,
            out: dir(&["fits", &format!("{model}_pooled.json")]),
        };
        match in_stage("regress", commands::regress(&a)) {
            Ok(v) => {
                artifacts.push(a.out.clone());
                pooled_fits.insert(model, v["r2"].clone());
            }
            Err(e) => warnings.push(format!("regress {model} pooled: {e:#}")),
        }
    }

    let correlation = if fit_paths.len() >= 3 {
        let a = CorrelateArgs { fits: fit_paths, reports: report_paths, out: dir(&["correlation.json"]) };
        match in_stage("correlate", commands::correlate(&a)) {
            Ok(v) => {
                artifacts.push(a.out.clone());
                v
            }
            Err(e) => {
                warnings.push(format!("correlate: {e:#}"));
                Value::Null
            }
        }
    } else {
        warnings.push(format!("correlate: {} model/source fits, at least 3 needed", fit_paths.len()));
        Value::Null
    };

    for a in &artifacts {
        in_stage("verify", verify_artifact(a).map_err(anyhow::Error::from))?;
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let listed = artifacts
        .iter()
        .map(|a| {
            let rel = a.strip_prefix(&out).unwrap_or(a).display().to_string();
            Ok(json!({ "path": rel, "sha256": sha256_file(a)? }))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let summary = json!({
        "language": cfg.language,
        "stats": stats,
        "results": table,
        "pooled_r2": pooled_fits,
        "correlation": correlation,
        "warnings": warnings,
        "artifacts": listed,
    });
    let params = json!({
        "vocab_size": cfg.tokenizer.vocab_size,
        "order": cfg.ngram.order,
        "discount": cfg.ngram.discount,
        "bins": cfg.lexicon.bins,
        "region": format!("{:?}", cfg.region).to_lowercase(),
    });
    let m = Manifest::new("pipeline", params).input(absolute(&args.config)?)?;
    let path = dir(&["pipeline.json"]);
    in_stage("pipeline", write_json_artifact(&path, &summary, m).map_err(anyhow::Error::from))?;
    Ok(json!({
        "out_dir": out,
        "results": summary["results"],
        "pooled_r2": summary["pooled_r2"],
        "correlation": summary["correlation"],
        "warnings": summary["warnings"],
    }))
}
