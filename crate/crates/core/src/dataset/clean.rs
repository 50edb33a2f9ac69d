use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{LabeledExample, TaskSpec};
use crate::corpus_filter::normalize_whitespace;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanReport {
    pub removed: usize,
    pub empty_text: usize,
    /// Missing or outside the task's label set.
    pub invalid_label: usize,
    pub duplicates: usize,
}

/// Normalizes whitespace, canonicalizes labels and drops empty, off-set and
/// duplicate `(text, label)` examples. Order is preserved; the first copy of a
/// duplicate wins.
pub fn clean_examples(
    examples: Vec<LabeledExample>,
    task: &TaskSpec,
) -> (Vec<LabeledExample>, CleanReport) {
    let mut report = CleanReport::default();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut out = Vec::with_capacity(examples.len());

    for example in examples {
        let text = normalize_whitespace(&example.text);
        if text.is_empty() {
            report.empty_text += 1;
            continue;
        }
        let Some(label) = task.canonical_label(&example.label) else {
            report.invalid_label += 1;
            continue;
        };
        if !seen.insert((text.clone(), label.to_string())) {
            report.duplicates += 1;
            continue;
        }
        let context = example
            .context
            .map(|c| normalize_whitespace(&c))
            .filter(|c| !c.is_empty());
        out.push(LabeledExample {
            id: example.id,
            text,
            label: label.to_string(),
            context,
        });
    }
    report.removed = report.empty_text + report.invalid_label + report.duplicates;
    (out, report)
}
