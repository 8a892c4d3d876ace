//! `minpair`: every stage of the benchmark pipeline as a subcommand.

mod args;
mod commands;
mod pipeline;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::StageError;

fn main() -> ExitCode {
    // clap exits 0 for --help/--version and 2 for usage errors
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            report("setup", &anyhow::Error::new(e));
            return ExitCode::from(1);
        }
    }

    let stage = cli.command.name();
    let result = match cli.command {
        Command::Stats(a) => commands::stats(&a),
        Command::TrainTokenizer(a) => commands::train_tokenizer(&a),
        Command::TrainNgram(a) => commands::train_ngram(&a),
        Command::BuildLexicon(a) => commands::build_lexicon(&a),
        Command::GenBenchmark(a) => commands::gen_benchmark(&a),
        Command::Score(a) => commands::score(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Regress(a) => commands::regress(&a),
        Command::Correlate(a) => commands::correlate(&a),
        Command::Pipeline(a) => pipeline::run(&a),
    };
    match result {
        Ok(summary) => {
            match serde_json::to_string_pretty(&summary) {
                Ok(text) => println!("{text}"),
                Err(e) => {
                    report(stage, &e.into());
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            report(stage, &e);
            ExitCode::from(1)
        }
    }
}

/// Prints a single-line JSON error to stderr, naming the innermost stage.
fn report(stage: &str, e: &anyhow::Error) {
    let (stage, err) = match e.downcast_ref::<StageError>() {
        Some(s) => (s.stage.as_str(), &s.source),
        None => (stage, e),
    };
    let causes: Vec<String> = err.chain().skip(1).map(|c| c.to_string()).collect();
    let v = serde_json::json!({ "stage": stage, "error": err.to_string(), "causes": causes });
    eprintln!("{v}");
}
