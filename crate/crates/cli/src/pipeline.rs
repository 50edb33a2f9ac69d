//! Manifest-driven pipeline runs.
//!
//! A manifest is a TOML file:
//!
//! ```toml
//! version = "1"
//! seed = 7
//! report_dir = "out/reports"   # default: "reports"
//!
//! [[stage]]
//! kind = "clean"
//! input = ["raw.txt"]
//! output = "out/clean.txt"
//! dedup = true
//!
//! [stage.filter]
//! min_target_ratio = 0.8
//! ```
//!
//! Every stage takes the same keys as the matching subcommand's flags, in
//! snake_case. Relative paths are resolved against the manifest's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lexforge::dataset::SPLIT_NAMES;
use lexforge::tokenizer::TrainConfig;
use lexforge::{jsonl, Error};
use log::{error, info};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::*;
use crate::commands;
use crate::{CliError, Result};

pub const DEFAULT_SEED: u64 = 42;
pub const RUN_REPORT: &str = "run_report.json";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_report_dir")]
    pub report_dir: PathBuf,
    #[serde(default, rename = "stage")]
    pub stages: Vec<Stage>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_report_dir() -> PathBuf {
    PathBuf::from("reports")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Stage {
    Clean(CleanArgs),
    Dedup(DedupArgs),
    TrainTokenizer(TrainTokenizerArgs),
    MergeTokenizer(MergeTokenizerArgs),
    Encode(EncodeArgs),
    TokenizeStats(TokenizeStatsArgs),
    Pack(PackArgs),
    Prepare(PrepareArgs),
    RenderPrompts(RenderPromptsArgs),
    Score(ScoreArgs),
}

impl Stage {
    pub fn kind(&self) -> &'static str {
        match self {
            Stage::Clean(_) => "clean",
            Stage::Dedup(_) => "dedup",
            Stage::TrainTokenizer(_) => "train-tokenizer",
            Stage::MergeTokenizer(_) => "merge-tokenizer",
            Stage::Encode(_) => "encode",
            Stage::TokenizeStats(_) => "tokenize-stats",
            Stage::Pack(_) => "pack",
            Stage::Prepare(_) => "prepare",
            Stage::RenderPrompts(_) => "render-prompts",
            Stage::Score(_) => "score",
        }
    }

    /// Mutable references to every path the stage reads (first) and writes
    /// (second).
    fn paths_mut(&mut self) -> (Vec<&mut PathBuf>, Vec<&mut PathBuf>) {
        fn opt(p: &mut Option<PathBuf>) -> Vec<&mut PathBuf> {
            p.as_mut().into_iter().collect()
        }
        match self {
            Stage::Clean(a) => {
                let mut inputs: Vec<_> = a.input.iter_mut().collect();
                inputs.extend(opt(&mut a.config));
                let mut outputs = vec![&mut a.output];
                outputs.extend(opt(&mut a.rejects));
                outputs.extend(opt(&mut a.report));
                (inputs, outputs)
            }
            Stage::Dedup(a) => {
                let mut outputs = vec![&mut a.output];
                outputs.extend(opt(&mut a.report));
                (a.input.iter_mut().collect(), outputs)
            }
            Stage::TrainTokenizer(a) => {
                let mut outputs = vec![&mut a.output];
                outputs.extend(opt(&mut a.report));
                (a.input.iter_mut().collect(), outputs)
            }
            Stage::MergeTokenizer(a) => {
                let mut outputs = vec![&mut a.output];
                outputs.extend(opt(&mut a.report));
                (vec![&mut a.base, &mut a.addon], outputs)
            }
            Stage::Encode(a) => {
                let mut inputs = vec![&mut a.tokenizer];
                inputs.extend(a.input.iter_mut());
                let mut outputs = vec![&mut a.output];
                outputs.extend(opt(&mut a.report));
                (inputs, outputs)
            }
            Stage::TokenizeStats(a) => {
                let mut inputs = vec![&mut a.tokenizer];
                inputs.extend(a.input.iter_mut());
                (inputs, opt(&mut a.report))
            }
            Stage::Pack(a) => {
                let mut outputs = vec![&mut a.output];
                outputs.extend(opt(&mut a.report));
                (vec![&mut a.input], outputs)
            }
            Stage::Prepare(a) => (vec![&mut a.input], vec![&mut a.out_dir]),
            Stage::RenderPrompts(a) => (vec![&mut a.split], vec![&mut a.output]),
            Stage::Score(a) => (vec![&mut a.gold, &mut a.pred], opt(&mut a.report)),
        }
    }

    fn inputs(&self) -> Vec<PathBuf> {
        let mut copy = self.clone();
        copy.paths_mut().0.into_iter().map(|p| p.clone()).collect()
    }

    fn outputs(&self) -> Vec<PathBuf> {
        let mut copy = self.clone();
        copy.paths_mut().1.into_iter().map(|p| p.clone()).collect()
    }

    fn report_path(&self) -> Option<&Path> {
        match self {
            Stage::Clean(a) => a.report.as_deref(),
            Stage::Dedup(a) => a.report.as_deref(),
            Stage::TrainTokenizer(a) => a.report.as_deref(),
            Stage::MergeTokenizer(a) => a.report.as_deref(),
            Stage::Encode(a) => a.report.as_deref(),
            Stage::TokenizeStats(a) => a.report.as_deref(),
            Stage::Pack(a) => a.report.as_deref(),
            Stage::Score(a) => a.report.as_deref(),
            Stage::Prepare(_) | Stage::RenderPrompts(_) => None,
        }
    }

    /// Checks the stage's own settings without touching the filesystem.
    fn validate(&self) -> Result<()> {
        match self {
            Stage::Clean(a) => {
                if let Some(f) = &a.filter {
                    f.validate()?;
                }
            }
            Stage::TrainTokenizer(a) => TrainConfig {
                target_vocab_size: a.vocab_size,
                min_pair_frequency: a.min_frequency,
                pretokenizer: a.pretokenizer,
                special_tokens: a.special_tokens.clone(),
            }
            .validate()?,
            Stage::Pack(a) if a.block_size == 0 => {
                return Err(CliError::Config("block_size must be positive".into()))
            }
            _ => {}
        }
        Ok(())
    }

    /// Runs the stage and returns its report.
    pub fn execute(&self, seed: u64) -> Result<Value> {
        fn value<T: Serialize>(report: T) -> Result<Value> {
            serde_json::to_value(report).map_err(|e| Error::from(e).into())
        }
        match self {
            Stage::Clean(a) => value(commands::clean(a)?),
            Stage::Dedup(a) => value(commands::dedup(a)?),
            Stage::TrainTokenizer(a) => value(commands::train_tokenizer(a)?),
            Stage::MergeTokenizer(a) => value(commands::merge_tokenizer(a)?),
            Stage::Encode(a) => value(commands::encode(a)?),
            Stage::TokenizeStats(a) => value(commands::tokenize_stats(a)?),
            Stage::Pack(a) => value(commands::pack(a)?),
            Stage::Prepare(a) => value(commands::prepare(a, seed)?),
            Stage::RenderPrompts(a) => value(commands::render_prompts(a)?),
            Stage::Score(a) => value(commands::score(a)?),
        }
    }
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: Manifest = toml::from_str(&text).map_err(|e| CliError::Manifest {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        manifest.resolve(base);
        Ok(manifest)
    }

    /// Makes every relative path absolute against `base`.
    pub fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.report_dir);
        for stage in &mut self.stages {
            let (inputs, outputs) = stage.paths_mut();
            inputs.into_iter().chain(outputs).for_each(fix);
        }
    }

    /// Checks versions, stage settings and that every input either exists or
    /// is written by an earlier stage.
    pub fn validate(&self) -> Result<()> {
        let invalid = |message: String| CliError::Manifest {
            path: PathBuf::from("<manifest>"),
            message,
        };
        if self.version.trim().is_empty() {
            return Err(invalid("`version` must not be empty".into()));
        }
        let outputs: Vec<Vec<PathBuf>> = self.stages.iter().map(Stage::outputs).collect();
        for (i, stage) in self.stages.iter().enumerate() {
            stage
                .validate()
                .map_err(|e| invalid(format!("stage {i} ({}): {e}", stage.kind())))?;
            for input in stage.inputs() {
                let produced = |stages: &[Vec<PathBuf>]| {
                    stages.iter().flatten().any(|out| input.starts_with(out))
                };
                if produced(&outputs[..i]) {
                    continue;
                }
                if produced(&outputs[i..]) {
                    return Err(invalid(format!(
                        "stage {i} ({}): input `{}` is used before the stage that writes it",
                        stage.kind(),
                        input.display()
                    )));
                }
                if !input.exists() {
                    return Err(invalid(format!(
                        "stage {i} ({}): input `{}` does not exist and no earlier stage writes it",
                        stage.kind(),
                        input.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTotals {
    pub lines_read: u64,
    pub lines_kept: u64,
    pub duplicates_removed: u64,
    pub tokens_counted: u64,
    pub tokens_encoded: u64,
    pub blocks_packed: u64,
    pub vocab_sizes: Vec<u64>,
    pub split_sizes: BTreeMap<String, u64>,
}

impl RunTotals {
    fn add(&mut self, kind: &str, report: &Value) {
        let n = |key: &str| report.get(key).and_then(Value::as_u64).unwrap_or(0);
        match kind {
            "clean" => {
                self.lines_read += n("total");
                self.lines_kept += n("kept");
                self.duplicates_removed += n("duplicates_removed");
            }
            "dedup" => self.duplicates_removed += n("duplicates_removed"),
            "train-tokenizer" => self.vocab_sizes.push(n("vocab_size")),
            "merge-tokenizer" => self.vocab_sizes.push(n("final_size")),
            "tokenize-stats" => self.tokens_counted += n("tokens"),
            "encode" => self.tokens_encoded += n("tokens"),
            "pack" => self.blocks_packed += n("blocks"),
            "prepare" => {
                for split in SPLIT_NAMES {
                    let size = report["split_sizes"][split].as_u64().unwrap_or(0);
                    *self.split_sizes.entry(split.to_string()).or_insert(0) += size;
                }
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub index: usize,
    pub kind: String,
    pub report: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub seed: u64,
    pub status: String,
    pub stages: Vec<StageRecord>,
    pub totals: RunTotals,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Validates and runs `manifest_path`. Stage reports and `run_report.json`
/// are written to the manifest's report directory, also when a stage fails.
pub fn run_pipeline(manifest_path: &Path, seed_override: Option<u64>) -> Result<RunReport> {
    let mut manifest = Manifest::load(manifest_path)?;
    if seed_override.is_some() {
        for stage in &mut manifest.stages {
            if let Stage::Prepare(a) = stage {
                a.seed = None;
            }
        }
    }
    let seed = seed_override.unwrap_or(manifest.seed);
    manifest.validate()?;
    info!(
        "pipeline: {} stages from {}",
        manifest.stages.len(),
        manifest_path.display()
    );

    let mut run = RunReport {
        version: manifest.version.clone(),
        seed,
        status: "ok".into(),
        stages: Vec::new(),
        totals: RunTotals::default(),
        error: None,
    };
    let mut failure = None;
    for (index, stage) in manifest.stages.iter().enumerate() {
        let kind = stage.kind();
        let started = Instant::now();
        info!("stage {index} ({kind}) started");
        match stage.execute(seed) {
            Ok(report) => {
                let default = manifest.report_dir.join(format!("{index:02}-{kind}.json"));
                jsonl::write_pretty(stage.report_path().unwrap_or(&default), &report)?;
                info!(
                    "stage {index} ({kind}) finished in {} ms",
                    started.elapsed().as_millis()
                );
                run.totals.add(kind, &report);
                run.stages.push(StageRecord { index, kind: kind.into(), report });
            }
            Err(e) => {
                error!("stage {index} ({kind}) failed: {e}");
                run.status = "failed".into();
                run.error = Some(format!("stage {index} ({kind}): {e}"));
                failure = Some(CliError::Stage {
                    index,
                    kind: kind.into(),
                    source: Box::new(e),
                });
                break;
            }
        }
    }
    jsonl::write_pretty(&manifest.report_dir.join(RUN_REPORT), &run)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(run),
    }
}
