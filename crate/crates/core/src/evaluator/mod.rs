//! Scoring of raw model outputs against gold labels.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{LabeledExample, TaskSpec};
use crate::{jsonl, Error, Result};

/// Column name for outputs that parse to no label.
pub const INVALID: &str = "INVALID";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseMode {
    /// The trimmed output must equal an answer surface.
    #[default]
    Strict,
    /// The earliest answer surface appearing as a whole token wins.
    Lenient,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Average {
    #[default]
    Macro,
    /// Per-class values weighted by gold support.
    Weighted,
}

impl std::str::FromStr for Average {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "macro" => Ok(Average::Macro),
            "weighted" => Ok(Average::Weighted),
            _ => Err(Error::InvalidConfig(format!("unknown average `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub raw: String,
}

/// Strings accepted as answers, paired with their canonical label: the task's
/// answer surfaces plus the canonical names themselves.
fn surfaces(task: &TaskSpec) -> Vec<(String, &str)> {
    let mut out = task.answer_surfaces();
    for label in &task.label_set {
        if !out.iter().any(|(s, _)| s == label) {
            out.push((label.clone(), label));
        }
    }
    out
}

/// Maps a raw output to a canonical label, or `None` for INVALID.
pub fn parse_label<'t>(raw: &str, task: &'t TaskSpec, mode: ParseMode) -> Option<&'t str> {
    let surfaces = surfaces(task);
    let raw = raw.trim();
    match mode {
        ParseMode::Strict => surfaces.iter().find(|(s, _)| s == raw).map(|&(_, l)| l),
        ParseMode::Lenient => {
            let mut best: Option<(usize, usize, &'t str)> = None;
            for (surface, label) in &surfaces {
                if let Some(pos) = find_token(raw, surface) {
                    let better = best.is_none_or(|(p, len, _)| {
                        pos < p || (pos == p && surface.len() > len)
                    });
                    if better {
                        best = Some((pos, surface.len(), label));
                    }
                }
            }
            best.map(|(_, _, l)| l)
        }
    }
}

/// Byte offset of the first occurrence of `needle` not flanked by
/// alphanumeric characters.
fn find_token(haystack: &str, needle: &str) -> Option<usize> {
    if needle.is_empty() {
        return None;
    }
    haystack.match_indices(needle).map(|(i, _)| i).find(|&i| {
        let before = haystack[..i].chars().next_back();
        let after = haystack[i + needle.len()..].chars().next();
        !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
    })
}

/// Rows are gold labels, columns are predicted labels followed by INVALID.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self {
            labels,
            counts: vec![vec![0; n + 1]; n],
        }
    }

    /// Builds a matrix from explicit counts, `labels.len()` rows of
    /// `labels.len() + 1` columns.
    pub fn from_counts(labels: Vec<String>, counts: Vec<Vec<u64>>) -> Result<Self> {
        let n = labels.len();
        if counts.len() != n || counts.iter().any(|row| row.len() != n + 1) {
            return Err(Error::InvalidConfig(format!(
                "confusion matrix for {n} labels needs {n} rows of {} columns",
                n + 1
            )));
        }
        Ok(Self { labels, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn invalid_count(&self) -> u64 {
        self.counts.iter().map(|row| row[self.labels.len()]).sum()
    }

    fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Tallies gold against parsed predictions. Gold examples without a
/// prediction count as INVALID.
pub fn confusion(
    gold: &[LabeledExample],
    predictions: &[Prediction],
    task: &TaskSpec,
    mode: ParseMode,
) -> Result<ConfusionMatrix> {
    let mut by_id: HashMap<&str, &str> = HashMap::with_capacity(predictions.len());
    for p in predictions {
        if by_id.insert(&p.id, &p.raw).is_some() {
            return Err(Error::DuplicatePrediction(p.id.clone()));
        }
    }
    let mut cm = ConfusionMatrix::new(task.label_set.clone());
    let invalid = cm.labels.len();
    let mut gold_ids = std::collections::HashSet::with_capacity(gold.len());
    for g in gold {
        if !gold_ids.insert(g.id.as_str()) {
            return Err(Error::InvalidConfig(format!("duplicate gold id `{}`", g.id)));
        }
        let row = cm.index(&g.label).ok_or_else(|| Error::InvalidGoldLabel {
            id: g.id.clone(),
            label: g.label.clone(),
        })?;
        let col = by_id
            .get(g.id.as_str())
            .and_then(|raw| parse_label(raw, task, mode))
            .and_then(|label| cm.index(label))
            .unwrap_or(invalid);
        cm.counts[row][col] += 1;
    }
    if let Some(p) = predictions.iter().find(|p| !gold_ids.contains(p.id.as_str())) {
        return Err(Error::UnknownPredictionId(p.id.clone()));
    }
    Ok(cm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Percentages in `[0, 100]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub average: Average,
    pub per_class: Vec<ClassMetrics>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MetricsReport {
    /// `[precision, recall, f1]` with three decimals, e.g. `86.402`.
    pub fn formatted(&self) -> [String; 3] {
        [self.precision, self.recall, self.f1].map(format_pct)
    }
}

pub fn format_pct(value: f64) -> String {
    format!("{value:.3}")
}

/// Per-class and averaged precision, recall and F1.
///
/// Averages run over the classes with gold support. Zero denominators yield 0.
/// The averaged F1 is the mean of per-class F1 values.
pub fn macro_metrics(cm: &ConfusionMatrix, average: Average) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let n = cm.labels.len();
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };

    let mut per_class = Vec::with_capacity(n);
    for (c, label) in cm.labels.iter().enumerate() {
        let tp = cm.counts[c][c];
        let support: u64 = cm.counts[c].iter().sum();
        let predicted: u64 = (0..n).map(|g| cm.counts[g][c]).sum();
        let p = ratio(tp, predicted);
        let r = ratio(tp, support);
        let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        per_class.push(ClassMetrics {
            label: label.clone(),
            precision: 100.0 * p,
            recall: 100.0 * r,
            f1: 100.0 * f1,
            support,
        });
    }

    let scored: Vec<&ClassMetrics> = per_class.iter().filter(|m| m.support > 0).collect();
    let weight = |m: &ClassMetrics| match average {
        Average::Macro => 1.0 / scored.len() as f64,
        Average::Weighted => m.support as f64 / total as f64,
    };
    let mean = |f: fn(&ClassMetrics) -> f64| scored.iter().map(|m| weight(m) * f(m)).sum::<f64>();
    Ok(MetricsReport {
        average,
        precision: mean(|m| m.precision),
        recall: mean(|m| m.recall),
        f1: mean(|m| m.f1),
        per_class,
    })
}

/// Text table in the layout of a results table: one row per run, three
/// decimals.
pub fn render_table(rows: &[(&str, &MetricsReport)]) -> String {
    let width = rows.iter().map(|(name, _)| name.chars().count()).max().unwrap_or(0).max(4);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$} | {:>9} | {:>9} | {:>9}", "Task", "Precision", "Recall", "F1");
    let _ = writeln!(out, "{}-+-{}-+-{}-+-{}", "-".repeat(width), "-".repeat(9), "-".repeat(9), "-".repeat(9));
    for (name, report) in rows {
        let [p, r, f] = report.formatted();
        let _ = writeln!(out, "{name:<width$} | {p:>9} | {r:>9} | {f:>9}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub task: String,
    pub mode: ParseMode,
    pub metrics: MetricsReport,
    /// `[precision, recall, f1]` as printed.
    pub formatted: [String; 3],
    pub confusion: ConfusionMatrix,
    pub invalid_count: u64,
    pub scored: u64,
    /// How often each label, or INVALID, was predicted.
    pub predicted_distribution: BTreeMap<String, u64>,
}

/// Scores a predictions file against a gold split and optionally writes the
/// JSON report.
pub fn score_run(
    gold_path: &Path,
    predictions_path: &Path,
    task: &TaskSpec,
    mode: ParseMode,
    average: Average,
    report_path: Option<&Path>,
) -> Result<ScoreReport> {
    let gold: Vec<LabeledExample> = jsonl::read(gold_path)?;
    let predictions: Vec<Prediction> = jsonl::read(predictions_path)?;
    let cm = confusion(&gold, &predictions, task, mode)?;
    let metrics = macro_metrics(&cm, average)?;

    let mut predicted_distribution = BTreeMap::new();
    for (c, label) in cm.labels.iter().chain([&INVALID.to_string()]).enumerate() {
        let column: u64 = cm.counts.iter().map(|row| row[c]).sum();
        predicted_distribution.insert(label.clone(), column);
    }
    let report = ScoreReport {
        task: task.name.to_string(),
        mode,
        formatted: metrics.formatted(),
        metrics,
        invalid_count: cm.invalid_count(),
        scored: cm.total(),
        confusion: cm,
        predicted_distribution,
    };
    if let Some(path) = report_path {
        jsonl::write_pretty(path, &report)?;
    }
    Ok(report)
}
