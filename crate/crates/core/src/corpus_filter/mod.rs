//! Heuristic sentence filtering and exact deduplication for merged web corpora.
//!
//! Every line goes through a fixed sequence of stages in [`classify_line`]:
//!
//! 1. reject as [`RejectReason::Malformed`] if the raw text carries replacement
//!    characters or control codes, or is empty once whitespace is normalized;
//! 2. remove URLs, then numeric prefixes (repeatedly, so the result is a fixed
//!    point), then normalize whitespace;
//! 3. reject as [`RejectReason::TooShort`] below `min_chars` codepoints or
//!    `min_words` whitespace-separated words;
//! 4. reject as [`RejectReason::NonTargetScript`] when the share of letters in
//!    the target script is below `min_target_ratio`;
//! 5. reject as [`RejectReason::IrregularPunctuation`] when one punctuation
//!    codepoint repeats more than `max_punct_run` times in a row.
//!
//! Lines that survive are kept with their cleaned text. Lengths and ratios are
//! always measured on the cleaned text, so a line that is nothing but a URL
//! counts as empty.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

mod dedup;
pub mod io;
mod rules;

pub use dedup::{dedup_exact, Deduplicator};
pub use rules::{
    longest_punct_run, normalize_whitespace, script_ratio, strip_numeric_prefix, strip_urls,
};

/// Lines classified per parallel batch. Output order never depends on it.
const BATCH: usize = 4096;

/// One sentence of a corpus together with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawLine {
    pub text: String,
    pub source_id: String,
    /// 1-based.
    pub line_number: u64,
}

impl RawLine {
    pub fn new(text: impl Into<String>, source_id: impl Into<String>, line_number: u64) -> Self {
        Self {
            text: text.into(),
            source_id: source_id.into(),
            line_number,
        }
    }
}

/// Inclusive range of Unicode scalar values, stored on disk as `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct CodepointRange {
    pub start: u32,
    pub end: u32,
}

impl CodepointRange {
    pub const fn new(start: u32, end: u32) -> Self {
        Self { start, end }
    }
}

impl From<[u32; 2]> for CodepointRange {
    fn from([start, end]: [u32; 2]) -> Self {
        Self { start, end }
    }
}

impl From<CodepointRange> for [u32; 2] {
    fn from(r: CodepointRange) -> Self {
        [r.start, r.end]
    }
}

/// Sinhala block.
pub const SINHALA: CodepointRange = CodepointRange::new(0x0D80, 0x0DFF);
/// Zero-width joiner, used inside Sinhala conjuncts.
pub const ZERO_WIDTH_JOINER: CodepointRange = CodepointRange::new(0x200D, 0x200D);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// Minimum length in codepoints.
    pub min_chars: usize,
    pub min_words: usize,
    /// Sorted, non-overlapping.
    pub target_ranges: Vec<CodepointRange>,
    pub min_target_ratio: f64,
    pub max_punct_run: usize,
    pub strip_urls: bool,
    pub strip_numeric_prefix: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_chars: 10,
            min_words: 2,
            target_ranges: vec![SINHALA, ZERO_WIDTH_JOINER],
            min_target_ratio: 0.7,
            max_punct_run: 3,
            strip_urls: true,
            strip_numeric_prefix: true,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.min_target_ratio) {
            return Err(Error::InvalidConfig(format!(
                "min_target_ratio {} outside [0, 1]",
                self.min_target_ratio
            )));
        }
        if self.max_punct_run == 0 {
            return Err(Error::InvalidConfig("max_punct_run must be positive".into()));
        }
        for r in &self.target_ranges {
            if r.start > r.end || r.end > 0x10FFFF {
                return Err(Error::InvalidConfig(format!(
                    "bad codepoint range [{:#X}, {:#X}]",
                    r.start, r.end
                )));
            }
        }
        for w in self.target_ranges.windows(2) {
            if w[0].end >= w[1].start {
                return Err(Error::InvalidConfig(
                    "target_ranges must be sorted and non-overlapping".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RejectReason {
    TooShort,
    NonTargetScript,
    IrregularPunctuation,
    Malformed,
}

impl RejectReason {
    pub const ALL: [RejectReason; 4] = [
        RejectReason::TooShort,
        RejectReason::NonTargetScript,
        RejectReason::IrregularPunctuation,
        RejectReason::Malformed,
    ];
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterVerdict {
    Keep { cleaned_text: String },
    Reject(RejectReason),
}

impl FilterVerdict {
    pub fn is_keep(&self) -> bool {
        matches!(self, FilterVerdict::Keep { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub total: u64,
    pub kept: u64,
    pub rejected_by_reason: BTreeMap<RejectReason, u64>,
    pub duplicates_removed: u64,
}

impl Default for FilterReport {
    fn default() -> Self {
        Self {
            total: 0,
            kept: 0,
            rejected_by_reason: RejectReason::ALL.iter().map(|r| (*r, 0)).collect(),
            duplicates_removed: 0,
        }
    }
}

impl FilterReport {
    pub fn rejected(&self) -> u64 {
        self.rejected_by_reason.values().sum()
    }

    /// `kept + Σ rejected == total`.
    pub fn is_conserved(&self) -> bool {
        self.kept + self.rejected() == self.total
    }

    fn record(&mut self, verdict: &FilterVerdict) {
        self.total += 1;
        match verdict {
            FilterVerdict::Keep { .. } => self.kept += 1,
            FilterVerdict::Reject(reason) => *self.rejected_by_reason.entry(*reason).or_insert(0) += 1,
        }
    }
}

/// Runs the cleaning stages over one line's text. See the module docs for the order.
pub fn classify_text(text: &str, config: &FilterConfig) -> FilterVerdict {
    if rules::has_malformed_chars(text) || text.trim().is_empty() {
        return FilterVerdict::Reject(RejectReason::Malformed);
    }

    let mut cleaned = if config.strip_urls {
        strip_urls(text)
    } else {
        normalize_whitespace(text)
    };
    if config.strip_numeric_prefix {
        loop {
            let next = strip_numeric_prefix(&cleaned);
            if next.len() == cleaned.len() {
                break;
            }
            cleaned = next;
        }
    }
    let cleaned = normalize_whitespace(&cleaned);

    let chars = cleaned.chars().count();
    let words = cleaned.split_whitespace().count();
    if chars < config.min_chars || words < config.min_words || cleaned.is_empty() {
        return FilterVerdict::Reject(RejectReason::TooShort);
    }

    if script_ratio(&cleaned, &config.target_ranges) < config.min_target_ratio {
        return FilterVerdict::Reject(RejectReason::NonTargetScript);
    }

    if longest_punct_run(&cleaned) > config.max_punct_run {
        return FilterVerdict::Reject(RejectReason::IrregularPunctuation);
    }

    FilterVerdict::Keep {
        cleaned_text: cleaned,
    }
}

pub fn classify_line(line: &RawLine, config: &FilterConfig) -> FilterVerdict {
    classify_text(&line.text, config)
}

/// Streams `lines` through [`classify_line`].
///
/// Kept lines are handed to `on_keep` in input order with their text replaced
/// by the cleaned text; rejected lines go to `on_reject`. Classification runs
/// in parallel batches, but callbacks and the report are identical to a
/// sequential pass.
pub fn filter_corpus<I, K, R>(
    lines: I,
    config: &FilterConfig,
    mut on_keep: K,
    mut on_reject: R,
) -> Result<FilterReport>
where
    I: IntoIterator<Item = Result<RawLine>>,
    K: FnMut(RawLine) -> Result<()>,
    R: FnMut(&RawLine, RejectReason) -> Result<()>,
{
    config.validate()?;
    let mut report = FilterReport::default();
    let mut iter = lines.into_iter();
    let mut batch = Vec::with_capacity(BATCH);

    loop {
        batch.clear();
        for line in iter.by_ref().take(BATCH) {
            batch.push(line?);
        }
        if batch.is_empty() {
            break;
        }
        let verdicts: Vec<FilterVerdict> = batch
            .par_iter()
            .map(|line| classify_line(line, config))
            .collect();

        for (mut line, verdict) in batch.drain(..).zip(verdicts) {
            report.record(&verdict);
            match verdict {
                FilterVerdict::Keep { cleaned_text } => {
                    line.text = cleaned_text;
                    on_keep(line)?;
                }
                FilterVerdict::Reject(reason) => on_reject(&line, reason)?,
            }
        }
    }
    Ok(report)
}

/// In-memory convenience wrapper around [`filter_corpus`].
pub fn filter_lines(lines: Vec<RawLine>, config: &FilterConfig) -> Result<(Vec<RawLine>, FilterReport)> {
    let mut kept = Vec::new();
    let report = filter_corpus(
        lines.into_iter().map(Ok),
        config,
        |line| {
            kept.push(line);
            Ok(())
        },
        |_, _| Ok(()),
    )?;
    Ok((kept, report))
}
