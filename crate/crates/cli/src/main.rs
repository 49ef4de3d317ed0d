//! Command-line pipelines over the matchbook library.
//!
//! Every subcommand communicates through the documented file formats only,
//! writes a `# ...` configuration header at the top of each output file, and
//! exits non-zero with a single-line `error[<category>]: <message>` on
//! failure (config 2, io 3, format 4, data 5, anything else 1).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "matchbook", version, about = "Noisy-text retrieval toolkit")]
struct Cli {
    /// Worker threads for parallel stages (0 = one per core). Results do
    /// not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus (and optionally a query set) and report counts.
    Ingest(IngestArgs),
    /// Generate a synthetic corpus.
    Synth(SynthArgs),
    /// Derive noisy queries from a corpus.
    Corrupt(CorruptArgs),
    /// Build an inverted index over a corpus.
    BuildIndex(BuildIndexArgs),
    /// Score queries against an index, producing a channel file.
    TextScores(TextScoresArgs),
    /// Combine channels with fixed weights.
    Combine(CombineArgs),
    /// Train the ranking SVM on channels and ground truth.
    Train(TrainArgs),
    /// Rank queries with a model, fixed weights, or cross validation.
    Rank(RankArgs),
    /// Rerank the top K of existing rankings with an expensive channel.
    Rerank(RerankArgs),
    /// Evaluate rankings into retrieval-rate curves and tables.
    Eval(EvalArgs),
    /// Measure query latency over a large corpus.
    Bench(BenchArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Corpus TSV file.
    #[arg(long)]
    corpus: PathBuf,
    /// Query TSV to validate against the corpus.
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Write the normalized corpus here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    num_docs: usize,
    #[arg(long, default_value_t = 2)]
    min_words: usize,
    #[arg(long, default_value_t = 5)]
    max_words: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Word list file (one word per line); the built-in list by default.
    #[arg(long)]
    dictionary: Option<PathBuf>,
    /// Generate this many random pseudo-words instead of a word list.
    #[arg(long, conflicts_with = "dictionary")]
    random_dictionary: Option<usize>,
    #[arg(long, default_value_t = 3)]
    word_len_min: usize,
    #[arg(long, default_value_t = 8)]
    word_len_max: usize,
    /// Mark every generated record as a distractor.
    #[arg(long)]
    distractor: bool,
    #[arg(long, default_value = "d")]
    id_prefix: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct NoiseArgs {
    /// Key-value noise config file; flags below override its values.
    #[arg(long)]
    noise_config: Option<PathBuf>,
    #[arg(long)]
    sub_rate: Option<f64>,
    #[arg(long)]
    del_rate: Option<f64>,
    #[arg(long)]
    ins_rate: Option<f64>,
    #[arg(long)]
    word_drop_rate: Option<f64>,
    #[arg(long)]
    reversed_line_rate: Option<f64>,
    #[arg(long)]
    spurious_singles: Option<usize>,
    #[arg(long)]
    spurious_words: Option<usize>,
}

#[derive(Args)]
struct CorruptArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Overrides a seed from --noise-config.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Queries generated per eligible record.
    #[arg(long, default_value_t = 1)]
    queries_per_doc: usize,
    /// Also derive queries from distractor records.
    #[arg(long)]
    include_distractors: bool,
    #[arg(long, default_value = "q")]
    id_prefix: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildIndexArgs {
    /// Corpus TSV; repeat to merge several files.
    #[arg(long, required = true)]
    corpus: Vec<PathBuf>,
    /// Gram length.
    #[arg(short, long, default_value_t = 3)]
    n: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TextScoresArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    /// Keep only the best-scoring documents per query (0 = all).
    #[arg(long, default_value_t = 0)]
    top: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CombineArgs {
    /// Channel file; repeat per channel.
    #[arg(long, required = true)]
    channel: Vec<PathBuf>,
    /// Weight per channel, in the same order.
    #[arg(long, required = true)]
    lambda: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct TrainOpts {
    /// Slack penalty C.
    #[arg(long, default_value_t = 1.0)]
    c_param: f64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_negatives: usize,
    /// Min-max scale channels on the training fold.
    #[arg(long)]
    standardize: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, required = true)]
    channel: Vec<PathBuf>,
    #[arg(long)]
    queries: PathBuf,
    #[command(flatten)]
    opts: TrainOpts,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long, required = true)]
    channel: Vec<PathBuf>,
    #[arg(long)]
    queries: PathBuf,
    /// Rank with a trained model file.
    #[arg(long, conflicts_with_all = ["lambda", "crossval"])]
    model: Option<PathBuf>,
    /// Rank with fixed weights, one per channel.
    #[arg(long, conflicts_with = "crossval")]
    lambda: Vec<f64>,
    /// Two-fold cross validation: train on one half, rank the other.
    #[arg(long)]
    crossval: bool,
    #[command(flatten)]
    opts: TrainOpts,
    /// Write fold models as <prefix>.fold0.json / <prefix>.fold1.json.
    #[arg(long)]
    model_out: Option<PathBuf>,
    /// Queries absent from every channel: fail or emit an empty ranking.
    #[arg(long, default_value = "error", value_parser = ["error", "empty"])]
    missing: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RerankArgs {
    #[arg(long)]
    rankings: PathBuf,
    /// Expensive channel file.
    #[arg(long)]
    channel: PathBuf,
    #[arg(short, long)]
    k: usize,
    #[arg(long, default_value = "keep", value_parser = ["keep", "zero"])]
    fallback: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Rankings file; repeat to compare several methods.
    #[arg(long, required = true)]
    rankings: Vec<PathBuf>,
    #[arg(long)]
    queries: PathBuf,
    /// Curve label per rankings file (defaults to the file stems).
    #[arg(long)]
    label: Vec<String>,
    #[arg(long, default_value_t = 20)]
    max_k: usize,
    /// Table rows, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,5,10,20")]
    ks: Vec<usize>,
    /// Write the curves as a .dat file.
    #[arg(long)]
    dat: Option<PathBuf>,
    /// Write the fixed-point table as TSV.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark over an existing corpus instead of a synthetic one.
    #[arg(long, conflicts_with = "docs")]
    corpus: Option<PathBuf>,
    /// Synthetic corpus size.
    #[arg(long, default_value_t = 100_000)]
    docs: usize,
    #[arg(long, default_value_t = 300)]
    queries: usize,
    #[arg(short, long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corrupt the benchmark queries before timing them.
    #[command(flatten)]
    noise: NoiseArgs,
    /// Write the timing TSV here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Ignore failures from double initialization (tests, repeated calls).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let result = match cli.command {
        Command::Ingest(args) => commands::ingest(args),
        Command::Synth(args) => commands::synth(args),
        Command::Corrupt(args) => commands::corrupt(args),
        Command::BuildIndex(args) => commands::build_index(args),
        Command::TextScores(args) => commands::text_scores(args),
        Command::Combine(args) => commands::combine(args),
        Command::Train(args) => commands::train(args),
        Command::Rank(args) => commands::rank(args),
        Command::Rerank(args) => commands::rerank(args),
        Command::Eval(args) => commands::eval(args),
        Command::Bench(args) => commands::bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (category, code) = categorize(&err);
            let message = format!("{err:#}").replace('\n', "; ");
            eprintln!("error[{category}]: {message}");
            ExitCode::from(code)
        }
    }
}

fn categorize(err: &anyhow::Error) -> (&'static str, u8) {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<matchbook::Error>() {
            return match e.category() {
                "config" => ("config", 2),
                "io" => ("io", 3),
                "format" => ("format", 4),
                _ => ("data", 5),
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return ("io", 3);
        }
    }
    ("other", 1)
}
