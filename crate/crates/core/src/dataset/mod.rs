//! Downstream classification datasets: extraction, cleaning and stratified
//! train/validation/test splitting.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

mod clean;
mod split;
mod tabular;
mod xml;

pub use clean::{clean_examples, CleanReport};
pub use split::{stratified_split, write_split, SplitRatios, SplitResult, SplitSpec, SplitMix64, SPLIT_NAMES};
pub use tabular::{load_tabular, TabularLoad};
pub use xml::{extract_sentiment_xml, XmlExtraction};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub id: String,
    pub text: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
}

impl LabeledExample {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            label: label.into(),
            context: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskName {
    WritingStyle,
    NewsCategory,
    Sentiment,
}

impl TaskName {
    pub const ALL: [TaskName; 3] = [
        TaskName::WritingStyle,
        TaskName::NewsCategory,
        TaskName::Sentiment,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskName::WritingStyle => "writing_style",
            TaskName::NewsCategory => "news_category",
            TaskName::Sentiment => "sentiment",
        }
    }
}

impl fmt::Display for TaskName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "writing_style" => Ok(TaskName::WritingStyle),
            "news_category" => Ok(TaskName::NewsCategory),
            "sentiment" => Ok(TaskName::Sentiment),
            _ => Err(Error::UnknownTask(s.to_string())),
        }
    }
}

/// How a model is asked to spell its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerEncoding {
    /// The canonical label name, e.g. `POSITIVE`.
    LabelName,
    /// The label's position in the label set, e.g. `3` for `Sports`.
    LabelDigit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpec {
    pub name: TaskName,
    /// Canonical labels, in answer-digit order.
    pub label_set: Vec<String>,
    pub text_column: String,
    pub label_column: String,
    pub answer_encoding: AnswerEncoding,
}

impl TaskSpec {
    pub fn builtin(name: TaskName) -> Self {
        let (labels, text, label, encoding): (&[&str], _, _, _) = match name {
            TaskName::WritingStyle => (
                &["ACADEMIC", "CREATIVE", "NEWS", "BLOG"],
                "comments",
                "labels",
                AnswerEncoding::LabelName,
            ),
            TaskName::NewsCategory => (
                &["Political", "Business", "Technology", "Sports", "Entertainment"],
                "comments",
                "labels",
                AnswerEncoding::LabelDigit,
            ),
            TaskName::Sentiment => (
                &["POSITIVE", "NEGATIVE", "NEUTRAL"],
                "text",
                "sentiment",
                AnswerEncoding::LabelName,
            ),
        };
        Self {
            name,
            label_set: labels.iter().map(|s| s.to_string()).collect(),
            text_column: text.into(),
            label_column: label.into(),
            answer_encoding: encoding,
        }
    }

    /// Maps a raw label to its canonical form.
    ///
    /// Surrounding whitespace and case are ignored. Tasks answered with digits
    /// also accept the digit surface (`"3"` → `Sports`).
    pub fn canonical_label(&self, raw: &str) -> Option<&str> {
        let raw = raw.trim();
        if let Some(label) = self.label_set.iter().find(|l| l.eq_ignore_ascii_case(raw)) {
            return Some(label);
        }
        if self.answer_encoding == AnswerEncoding::LabelDigit {
            if let Ok(idx) = raw.parse::<usize>() {
                if raw.chars().all(|c| c.is_ascii_digit()) {
                    return self.label_set.get(idx).map(String::as_str);
                }
            }
        }
        None
    }

    /// The string a model should output for a canonical label.
    pub fn answer_surface(&self, label: &str) -> Option<String> {
        let idx = self.label_set.iter().position(|l| l == label)?;
        Some(match self.answer_encoding {
            AnswerEncoding::LabelName => label.to_string(),
            AnswerEncoding::LabelDigit => idx.to_string(),
        })
    }

    /// `(surface, canonical label)` for every label.
    pub fn answer_surfaces(&self) -> Vec<(String, &str)> {
        self.label_set
            .iter()
            .map(|l| (self.answer_surface(l).expect("label in set"), l.as_str()))
            .collect()
    }
}

/// Loads a task's raw examples from tabular or sentiment-XML input, chosen by
/// file extension.
pub fn load_examples(path: &Path, task: &TaskSpec) -> Result<(Vec<LabeledExample>, usize)> {
    let is_xml = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("xml"));
    if is_xml {
        let doc = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let extraction = extract_sentiment_xml(&doc)?;
        Ok((extraction.examples, extraction.warnings))
    } else {
        let load = load_tabular(path, task)?;
        Ok((load.examples, load.malformed_rows))
    }
}
