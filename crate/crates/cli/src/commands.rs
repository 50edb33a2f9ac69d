//! One function per subcommand. Each returns its stage report.

use std::cell::RefCell;
use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use lexforge::corpus_filter::io::{CorpusFormat, CorpusReader, CorpusRecord, CorpusWriter};
use lexforge::corpus_filter::{filter_corpus, Deduplicator, FilterConfig, FilterReport, RawLine};
use lexforge::dataset::{
    clean_examples, load_examples, stratified_split, write_split, CleanReport, SplitSpec, TaskSpec,
    SPLIT_NAMES,
};
use lexforge::evaluator::{render_table, score_run, ParseMode, ScoreReport};
use lexforge::prompts::{render, PromptTemplate, RenderedPrompt};
use lexforge::tokenizer::{self, BlockPacker, MergeReport, TokenId, TokenStats, TrainConfig};
use lexforge::{jsonl, Error};
use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::*;
use crate::{CliError, Result};

/// Lines encoded per parallel batch.
const ENCODE_BATCH: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanReportOut {
    #[serde(flatten)]
    pub filter: FilterReport,
    /// Lines written to the output.
    pub written: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupReport {
    pub total: u64,
    pub kept: u64,
    pub duplicates_removed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainReport {
    pub lines: u64,
    pub vocab_size: usize,
    pub merges: usize,
    pub special_tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodeReport {
    pub lines: u64,
    pub tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    #[serde(flatten)]
    pub stats: TokenStats,
    pub fertility: Option<f64>,
    /// Token count as `303,958,959 (303.96M)`.
    pub tokens_display: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackReport {
    pub input_tokens: u64,
    pub block_size: usize,
    pub blocks: u64,
    pub packed_tokens: u64,
    pub dropped_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepareReport {
    pub task: String,
    pub seed: u64,
    pub loaded: usize,
    /// Ragged rows or phrases without a sentiment.
    pub warnings: usize,
    pub clean: CleanReport,
    pub split_sizes: std::collections::BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderReport {
    pub task: String,
    pub mode: lexforge::prompts::Mode,
    pub prompts: usize,
}

/// Reads a filter configuration from TOML or JSON, by extension.
pub fn load_filter_config(path: &Path) -> Result<FilterConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let config: FilterConfig = if is_json {
        serde_json::from_str(&text).map_err(Error::from)?
    } else {
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
    };
    config.validate()?;
    Ok(config)
}

/// Reads corpus lines while queueing each line's extra JSON fields, so that
/// callbacks invoked in input order can pick them up again.
fn lines_with_fields<'a>(
    reader: CorpusReader,
    fields: &'a RefCell<VecDeque<Option<Map<String, Value>>>>,
) -> impl Iterator<Item = lexforge::Result<RawLine>> + 'a {
    reader.map(move |rec| {
        rec.map(|CorpusRecord { line, fields: f }| {
            fields.borrow_mut().push_back(f);
            line
        })
    })
}

pub fn clean(args: &CleanArgs) -> Result<CleanReportOut> {
    let config = match (&args.filter, &args.config) {
        (Some(inline), _) => inline.clone(),
        (None, Some(path)) => load_filter_config(path)?,
        (None, None) => FilterConfig::default(),
    };
    let reader = CorpusReader::open(&args.input)?;
    let mut writer = CorpusWriter::create(&args.output, CorpusFormat::from_path(&args.output))?;
    let mut rejects = args.rejects.as_deref().map(jsonl::create).transpose()?;
    let mut dedup = args.dedup.then(Deduplicator::new);
    let mut duplicates = 0u64;
    let mut written = 0u64;
    let fields = RefCell::new(VecDeque::new());

    let mut report = filter_corpus(
        lines_with_fields(reader, &fields),
        &config,
        |line| {
            let f = fields.borrow_mut().pop_front().flatten();
            if let Some(d) = dedup.as_mut() {
                if !d.insert(&line.text) {
                    duplicates += 1;
                    return Ok(());
                }
            }
            written += 1;
            writer.write(&line.text, f.as_ref())
        },
        |line, reason| {
            fields.borrow_mut().pop_front();
            if let Some(out) = rejects.as_mut() {
                let record = serde_json::json!({
                    "source_id": line.source_id,
                    "line_number": line.line_number,
                    "reason": reason,
                    "text": line.text,
                });
                serde_json::to_writer(&mut *out, &record)?;
                out.write_all(b"\n").map_err(|e| Error::io(args.rejects.as_deref().unwrap_or(Path::new("")), e))?;
            }
            Ok(())
        },
    )?;
    writer.finish()?;
    if let Some(mut out) = rejects {
        out.flush().map_err(|e| Error::io(args.rejects.as_deref().unwrap_or(Path::new("")), e))?;
    }
    report.duplicates_removed = duplicates;
    info!(
        "clean: {} lines, {} kept, {} rejected, {} duplicates removed",
        report.total,
        report.kept,
        report.rejected(),
        duplicates
    );
    let out = CleanReportOut { filter: report, written };
    Ok(out)
}

pub fn dedup(args: &DedupArgs) -> Result<DedupReport> {
    let reader = CorpusReader::open(&args.input)?;
    let mut writer = CorpusWriter::create(&args.output, CorpusFormat::from_path(&args.output))?;
    let mut seen = Deduplicator::new();
    let mut report = DedupReport { total: 0, kept: 0, duplicates_removed: 0 };
    for rec in reader {
        let rec = rec?;
        report.total += 1;
        if seen.insert(&rec.line.text) {
            report.kept += 1;
            writer.write(&rec.line.text, rec.fields.as_ref())?;
        } else {
            report.duplicates_removed += 1;
        }
    }
    writer.finish()?;
    info!("dedup: {} lines, {} duplicates removed", report.total, report.duplicates_removed);
    Ok(report)
}

fn read_texts(inputs: &[std::path::PathBuf]) -> Result<Vec<String>> {
    CorpusReader::open(inputs)?
        .lines()
        .map(|l| l.map(|l| l.text).map_err(CliError::from))
        .collect()
}

pub fn train_tokenizer(args: &TrainTokenizerArgs) -> Result<TrainReport> {
    let texts = read_texts(&args.input)?;
    let config = TrainConfig {
        target_vocab_size: args.vocab_size,
        min_pair_frequency: args.min_frequency,
        pretokenizer: args.pretokenizer,
        special_tokens: args.special_tokens.clone(),
    };
    let model = tokenizer::train_bpe(&texts, &config)?;
    tokenizer::save(&model, &args.output)?;
    let report = TrainReport {
        lines: texts.len() as u64,
        vocab_size: model.size(),
        merges: model.merges().len(),
        special_tokens: model.special_tokens().len(),
    };
    info!("train-tokenizer: {} lines, vocabulary {}", report.lines, report.vocab_size);
    Ok(report)
}

pub fn merge_tokenizer(args: &MergeTokenizerArgs) -> Result<MergeReport> {
    let base = tokenizer::load(&args.base)?;
    let addon = tokenizer::load(&args.addon)?;
    let (merged, report) = tokenizer::merge_vocab(&base, &addon)?;
    tokenizer::save(&merged, &args.output)?;
    info!(
        "merge-tokenizer: base {} + {} new = {}",
        report.base_size, report.added, report.final_size
    );
    Ok(report)
}

/// Encodes `texts` in parallel, keeping input order.
fn encode_all(model: &tokenizer::TokenizerModel, texts: &[String]) -> Vec<Vec<TokenId>> {
    texts.par_iter().map(|t| model.encode(t)).collect()
}

pub fn encode(args: &EncodeArgs) -> Result<EncodeReport> {
    let model = tokenizer::load(&args.tokenizer)?;
    let mut out = jsonl::create(&args.output)?;
    let mut report = EncodeReport { lines: 0, tokens: 0 };
    let mut lines = CorpusReader::open(&args.input)?.lines();
    loop {
        let batch: Vec<String> = lines
            .by_ref()
            .take(ENCODE_BATCH)
            .map(|l| l.map(|l| l.text))
            .collect::<lexforge::Result<_>>()?;
        if batch.is_empty() {
            break;
        }
        for ids in encode_all(&model, &batch) {
            report.lines += 1;
            report.tokens += ids.len() as u64;
            serde_json::to_writer(&mut out, &ids).map_err(Error::from)?;
            out.write_all(b"\n").map_err(|e| Error::io(&args.output, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(&args.output, e))?;
    info!("encode: {} lines, {} tokens", report.lines, report.tokens);
    Ok(report)
}

pub fn tokenize_stats(args: &TokenizeStatsArgs) -> Result<StatsReport> {
    let model = tokenizer::load(&args.tokenizer)?;
    let texts = read_texts(&args.input)?;
    let stats = texts
        .par_chunks(ENCODE_BATCH)
        .map(|chunk| tokenizer::token_stats(&model, chunk))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(TokenStats { vocab_size: model.size(), ..TokenStats::default() }, |mut acc, s| {
            acc.lines += s.lines;
            acc.words += s.words;
            acc.tokens += s.tokens;
            acc.word_tokens += s.word_tokens;
            acc
        });
    let report = StatsReport {
        fertility: stats.fertility().ok(),
        tokens_display: human_count(stats.tokens),
        stats,
    };
    info!("tokenize-stats: {} tokens", report.tokens_display);
    Ok(report)
}

/// `303958959` → `303,958,959 (303.96M)`.
pub fn human_count(n: u64) -> String {
    let digits = n.to_string();
    let mut grouped = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            grouped.push(',');
        }
        grouped.push(c);
    }
    let scaled = match n {
        n if n >= 1_000_000_000 => format!("{:.2}B", n as f64 / 1e9),
        n if n >= 1_000_000 => format!("{:.2}M", n as f64 / 1e6),
        n if n >= 1_000 => format!("{:.2}K", n as f64 / 1e3),
        n => n.to_string(),
    };
    format!("{grouped} ({scaled})")
}

pub fn pack(args: &PackArgs) -> Result<PackReport> {
    if args.block_size == 0 {
        return Err(CliError::Config("block_size must be positive".into()));
    }
    let file = std::fs::File::open(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let mut out = jsonl::create(&args.output)?;
    let mut packer = BlockPacker::new(args.block_size, args.keep_last);
    let mut report = PackReport {
        input_tokens: 0,
        block_size: args.block_size,
        blocks: 0,
        packed_tokens: 0,
        dropped_tokens: 0,
    };
    let mut write_block = |block: Vec<TokenId>, report: &mut PackReport| -> Result<()> {
        report.blocks += 1;
        report.packed_tokens += block.len() as u64;
        serde_json::to_writer(&mut out, &block).map_err(Error::from)?;
        out.write_all(b"\n").map_err(|e| Error::io(&args.output, e).into())
    };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(&args.input, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let ids: Vec<TokenId> = serde_json::from_str(&line).map_err(|e| Error::Record {
            path: args.input.clone(),
            line: i as u64 + 1,
            message: e.to_string(),
        })?;
        report.input_tokens += ids.len() as u64;
        packer.extend(&ids, |block| write_block(block, &mut report))?;
    }
    if let Some(last) = packer.finish() {
        write_block(last, &mut report)?;
    }
    out.flush().map_err(|e| Error::io(&args.output, e))?;
    report.dropped_tokens = report.input_tokens - report.packed_tokens;
    info!("pack: {} blocks of {}", report.blocks, report.block_size);
    Ok(report)
}

pub fn prepare(args: &PrepareArgs, default_seed: u64) -> Result<PrepareReport> {
    let task = TaskSpec::builtin(args.task);
    let (raw, warnings) = load_examples(&args.input, &task)?;
    let loaded = raw.len();
    let (examples, clean) = clean_examples(raw, &task);
    let spec = SplitSpec {
        ratios: args.ratios,
        seed: args.seed.unwrap_or(default_seed),
        stratified: !args.no_stratify,
    };
    let result = stratified_split(&examples, &spec)?;
    write_split(&args.out_dir, &result, &spec)?;
    let report = PrepareReport {
        task: task.name.to_string(),
        seed: spec.seed,
        loaded,
        warnings,
        clean,
        split_sizes: SPLIT_NAMES
            .iter()
            .map(|s| s.to_string())
            .zip(result.sizes())
            .collect(),
    };
    info!(
        "prepare: {} loaded, {} removed, split {:?}",
        loaded,
        clean.removed,
        result.sizes()
    );
    jsonl::write_pretty(&args.out_dir.join("prepare_report.json"), &report)?;
    Ok(report)
}

#[derive(Serialize)]
struct PromptRecord<'a> {
    id: &'a str,
    #[serde(flatten)]
    rendered: RenderedPrompt,
}

pub fn render_prompts(args: &RenderPromptsArgs) -> Result<RenderReport> {
    let template = PromptTemplate::builtin(args.task);
    let examples: Vec<lexforge::dataset::LabeledExample> = jsonl::read(&args.split)?;
    let records = examples
        .iter()
        .map(|e| {
            Ok(PromptRecord {
                id: &e.id,
                rendered: render(&template, e, args.mode)?,
            })
        })
        .collect::<lexforge::Result<Vec<_>>>()?;
    jsonl::write(&args.output, &records)?;
    info!("render-prompts: {} prompts", records.len());
    Ok(RenderReport {
        task: args.task.to_string(),
        mode: args.mode,
        prompts: records.len(),
    })
}

pub fn score(args: &ScoreArgs) -> Result<ScoreReport> {
    let task = TaskSpec::builtin(args.task);
    let mode = if args.lenient { ParseMode::Lenient } else { ParseMode::Strict };
    let report = score_run(&args.gold, &args.pred, &task, mode, args.average, None)?;
    info!(
        "score: {} examples, {} invalid, F1 {}",
        report.scored, report.invalid_count, report.formatted[2]
    );
    Ok(report)
}

/// The score as a one-row results table.
pub fn score_table(task: &str, report: &ScoreReport) -> String {
    render_table(&[(task, &report.metrics)])
}

/// Writes `report` to `path`, or prints it on stdout when no path is given.
pub fn emit<T: Serialize>(path: Option<&Path>, report: &T) -> Result<()> {
    match path {
        Some(p) => jsonl::write_pretty(p, report)?,
        None => {
            let text = serde_json::to_string_pretty(report).map_err(Error::from)?;
            println!("{text}");
        }
    }
    Ok(())
}
