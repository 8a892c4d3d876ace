use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use minpair_core::{CaseMode, PunctuationPolicy, Region};

#[derive(Debug, Parser)]
#[command(name = "minpair", version, about = "Frequency-controlled agreement benchmarks: build, score, analyze")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(usize))]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Token counts, sentence length, n-gram TTR and interrogative share of a corpus.
    Stats(StatsArgs),
    /// Train a BPE tokenizer on a corpus.
    TrainTokenizer(TrainTokenizerArgs),
    /// Train an interpolated Kneser-Ney model over BPE tokens.
    TrainNgram(TrainNgramArgs),
    /// Freeze a frequency-binned lexicon from two annotated corpora and curated picks.
    BuildLexicon(BuildLexiconArgs),
    /// Generate minimal pairs for every paradigm from a lexicon.
    GenBenchmark(GenBenchmarkArgs),
    /// Score a benchmark with the built-in n-gram model or an external score file.
    Score(ScoreArgs),
    /// Aggregate per-pair results over seeds into an accuracy report.
    Evaluate(EvaluateArgs),
    /// Regress ΔP on z-scored log frequencies.
    Regress(RegressArgs),
    /// Correlate regression R² with accuracy across model configurations.
    Correlate(CorrelateArgs),
    /// Run every stage from a JSON config.
    Pipeline(PipelineArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Stats(_) => "stats",
            Command::TrainTokenizer(_) => "train-tokenizer",
            Command::TrainNgram(_) => "train-ngram",
            Command::BuildLexicon(_) => "build-lexicon",
            Command::GenBenchmark(_) => "gen-benchmark",
            Command::Score(_) => "score",
            Command::Evaluate(_) => "evaluate",
            Command::Regress(_) => "regress",
            Command::Correlate(_) => "correlate",
            Command::Pipeline(_) => "pipeline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Lower,
    Preserve,
}

impl From<CaseArg> for CaseMode {
    fn from(c: CaseArg) -> CaseMode {
        match c {
            CaseArg::Lower => CaseMode::Lower,
            CaseArg::Preserve => CaseMode::Preserve,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PunctArg {
    Include,
    Exclude,
}

impl From<PunctArg> for PunctuationPolicy {
    fn from(p: PunctArg) -> PunctuationPolicy {
        match p {
            PunctArg::Include => PunctuationPolicy::Include,
            PunctArg::Exclude => PunctuationPolicy::Exclude,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionArg {
    Critical,
    Sequence,
}

impl From<RegionArg> for Region {
    fn from(r: RegionArg) -> Region {
        match r {
            RegionArg::Critical => Region::Critical,
            RegionArg::Sequence => Region::Sequence,
        }
    }
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Sentence-per-line UTF-8 corpus.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Corpus id (default: file stem).
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long, default_value = "en")]
    pub language: String,
    #[arg(long, value_enum, default_value_t = CaseArg::Lower)]
    pub case: CaseArg,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, value_enum, default_value_t = PunctArg::Exclude)]
    pub punctuation: PunctArg,
    /// Treat exactly these comma-separated tokens as punctuation instead of Unicode P* tokens.
    #[arg(long, value_delimiter = ',')]
    pub punct_set: Option<Vec<String>>,
    /// Write the stats with a manifest here instead of printing them.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the word-frequency table (form<TAB>count).
    #[arg(long)]
    pub freqs_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainTokenizerArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value_t = minpair_core::tokenizer::DEFAULT_VOCAB_SIZE)]
    pub vocab_size: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainNgramArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub tokenizer: PathBuf,
    #[arg(long, default_value_t = minpair_core::ngram::DEFAULT_ORDER)]
    pub order: usize,
    #[arg(long, default_value_t = minpair_core::ngram::DEFAULT_DISCOUNT)]
    pub discount: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildLexiconArgs {
    #[arg(long)]
    pub corpus_a: PathBuf,
    #[arg(long)]
    pub corpus_a_id: Option<String>,
    #[arg(long)]
    pub corpus_b: PathBuf,
    #[arg(long)]
    pub corpus_b_id: Option<String>,
    /// FORM LEMMA UPOS FEATS files (CoNLL-U also accepted); comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub annotations: Vec<PathBuf>,
    /// Animate noun lemmas, one per line.
    #[arg(long)]
    pub allowlist: PathBuf,
    #[arg(long)]
    pub picks: PathBuf,
    #[arg(long, default_value_t = minpair_core::lexicon::DEFAULT_NUM_BINS)]
    pub bins: u32,
    #[arg(long, default_value = "en")]
    pub language: String,
    #[arg(long, value_enum, default_value_t = CaseArg::Lower)]
    pub case: CaseArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenBenchmarkArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub aux: PathBuf,
    #[arg(long)]
    pub language: String,
    /// Lexicon source label (default: every source).
    #[arg(long)]
    pub source: Option<String>,
    /// Comma-separated paradigm ids (default: all seven).
    #[arg(long, value_delimiter = ',')]
    pub paradigms: Option<Vec<String>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long, required_unless_present = "validate_only")]
    pub benchmark: Option<PathBuf>,
    /// Built-in n-gram model; needs --tokenizer.
    #[arg(long, requires = "tokenizer", conflicts_with = "scores")]
    pub ngram: Option<PathBuf>,
    #[arg(long)]
    pub tokenizer: Option<PathBuf>,
    /// Score JSONL produced by an external exporter.
    #[arg(long, required_unless_present = "ngram")]
    pub scores: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = RegionArg::Critical)]
    pub region: RegionArg,
    /// Only schema-check --scores and print a summary.
    #[arg(long, requires = "scores")]
    pub validate_only: bool,
    /// Also write the per-token records used for scoring.
    #[arg(long)]
    pub records_out: Option<PathBuf>,
    #[arg(long, required_unless_present = "validate_only")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// One results file per seed, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub results: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RegressArgs {
    /// Results files to pool, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub results: Vec<PathBuf>,
    /// Benchmarks the results were scored on, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub benchmark: Vec<PathBuf>,
    /// Word frequencies of the model's training corpus.
    #[arg(long)]
    pub freqs: PathBuf,
    /// Restrict to one lexicon source; omitted means pooled.
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub fits: Vec<PathBuf>,
    /// Accuracy reports in the same order as --fits.
    #[arg(long, value_delimiter = ',', required = true)]
    pub reports: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's output directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub vocab_size: Option<usize>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub discount: Option<f64>,
    #[arg(long)]
    pub bins: Option<u32>,
    #[arg(long, value_enum)]
    pub region: Option<RegionArg>,
}
