//! Subcommand arguments.
//!
//! Each struct is parsed from the command line by clap and, with the same
//! field names in snake_case, from a pipeline manifest stage by serde.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lexforge::corpus_filter::FilterConfig;
use lexforge::dataset::{SplitRatios, TaskName};
use lexforge::evaluator::Average;
use lexforge::prompts::Mode;
use lexforge::tokenizer::Pretokenizer;
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "lexforge", version, about = "Corpus, tokenizer and evaluation tooling for low-resource language models")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, env = "LEXFORGE_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filter a raw corpus down to clean target-language sentences.
    Clean(CleanArgs),
    /// Drop exact duplicate lines.
    Dedup(DedupArgs),
    /// Train a byte-level BPE tokenizer.
    TrainTokenizer(TrainTokenizerArgs),
    /// Extend a base tokenizer with an addon tokenizer's vocabulary.
    MergeTokenizer(MergeTokenizerArgs),
    /// Encode a corpus to token ids, one JSON array per line.
    Encode(EncodeArgs),
    /// Count tokens and measure fertility on a corpus.
    TokenizeStats(TokenizeStatsArgs),
    /// Concatenate encoded lines and cut them into fixed-length blocks.
    Pack(PackArgs),
    /// Extract, clean and split a classification dataset.
    Prepare(PrepareArgs),
    /// Render instruction prompts for a dataset split.
    RenderPrompts(RenderPromptsArgs),
    /// Score model outputs against a gold split.
    Score(ScoreArgs),
    /// Run every stage of a pipeline manifest.
    Run(RunArgs),
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CleanArgs {
    /// Plain-text or JSON-lines corpus files.
    #[arg(required = true)]
    pub input: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Filter configuration file (TOML or JSON).
    #[arg(long)]
    #[serde(default)]
    pub config: Option<PathBuf>,
    /// Inline filter configuration (manifest only).
    #[arg(skip)]
    #[serde(default)]
    pub filter: Option<FilterConfig>,
    /// Also drop exact duplicates among kept lines.
    #[arg(long)]
    #[serde(default)]
    pub dedup: bool,
    /// JSON-lines file receiving every rejected line and its reason.
    #[arg(long)]
    #[serde(default)]
    pub rejects: Option<PathBuf>,
    #[arg(long)]
    #[serde(default)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DedupArgs {
    #[arg(required = true)]
    pub input: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    #[serde(default)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainTokenizerArgs {
    #[arg(required = true)]
    pub input: Vec<PathBuf>,
    /// Output directory for vocab.json, merges.txt and tokenizer_meta.json.
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 8000)]
    #[serde(default = "default_vocab_size")]
    pub vocab_size: usize,
    #[arg(long, default_value_t = 2)]
    #[serde(default = "default_min_frequency")]
    pub min_frequency: u64,
    #[arg(long, default_value_t = Pretokenizer::ByteLevel)]
    #[serde(default = "default_pretokenizer")]
    pub pretokenizer: Pretokenizer,
    #[arg(long = "special-token")]
    #[serde(default)]
    pub special_tokens: Vec<String>,
    #[arg(long)]
    #[serde(default)]
    pub report: Option<PathBuf>,
}

fn default_vocab_size() -> usize {
    8000
}

fn default_min_frequency() -> u64 {
    2
}

fn default_pretokenizer() -> Pretokenizer {
    Pretokenizer::ByteLevel
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergeTokenizerArgs {
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub addon: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    #[serde(default)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodeArgs {
    /// Tokenizer directory.
    #[arg(long)]
    pub tokenizer: PathBuf,
    #[arg(required = true)]
    pub input: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    #[serde(default)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenizeStatsArgs {
    #[arg(long)]
    pub tokenizer: PathBuf,
    #[arg(required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    #[serde(default)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackArgs {
    /// JSON-lines file of id arrays, as written by `encode`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 512)]
    #[serde(default = "default_block_size")]
    pub block_size: usize,
    /// Emit the final partial block instead of dropping it.
    #[arg(long)]
    #[serde(default)]
    pub keep_last: bool,
    #[arg(long)]
    #[serde(default)]
    pub report: Option<PathBuf>,
}

fn default_block_size() -> usize {
    512
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepareArgs {
    #[arg(long)]
    pub task: TaskName,
    /// CSV, TSV or sentiment XML file.
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the manifest seed, or 42.
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Split weights, e.g. `80:10:10` or `0.8,0.1,0.1`.
    #[arg(long, default_value = "80:10:10")]
    #[serde(default)]
    pub ratios: SplitRatios,
    /// Shuffle the whole dataset instead of each label class.
    #[arg(long)]
    #[serde(default)]
    pub no_stratify: bool,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderPromptsArgs {
    #[arg(long)]
    pub task: TaskName,
    /// Split file written by `prepare`.
    #[arg(long)]
    pub split: PathBuf,
    #[arg(long, default_value = "train")]
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn default_mode() -> Mode {
    Mode::Train
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreArgs {
    #[arg(long)]
    pub task: TaskName,
    #[arg(long)]
    pub gold: PathBuf,
    /// JSON-lines predictions `{"id": ..., "raw": ...}`.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    #[serde(default)]
    pub lenient: bool,
    #[arg(long, default_value = "macro")]
    #[serde(default)]
    pub average: Average,
    #[arg(long)]
    #[serde(default)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    pub manifest: PathBuf,
    /// Overrides the manifest's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}
