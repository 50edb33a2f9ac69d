//! Instruction prompts for the classification tasks.
//!
//! Task instructions and the Alpaca wrapper are data files under `templates/`,
//! compiled in with `include_str!`. The task text is spliced into the
//! instruction in a single pass, so text that happens to contain `{text}` or
//! `{instruction}` is inserted literally and never substituted again.

use serde::{Deserialize, Serialize};

use crate::dataset::{AnswerEncoding, LabeledExample, TaskName, TaskSpec};
use crate::{Error, Result};

pub const ALPACA_WRAPPER: &str = include_str!("../../templates/alpaca.txt");
const WRITING_STYLE: &str = include_str!("../../templates/writing_style.txt");
const SENTIMENT: &str = include_str!("../../templates/sentiment.txt");
const NEWS_CATEGORY: &str = include_str!("../../templates/news_category.txt");

const INSTRUCTION_SLOT: &str = "{instruction}";
const INPUT_SLOTS: [&str; 2] = ["{text}", "{comment}"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Prompt plus gold answer.
    Train,
    /// Prompt only.
    Infer,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Mode::Train),
            "infer" => Ok(Mode::Infer),
            _ => Err(Error::InvalidConfig(format!("unknown prompt mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub task: TaskName,
    pub instruction_text: String,
    pub answer_encoding: AnswerEncoding,
    /// Outer instruction-following format with one `{instruction}` slot.
    pub wrapper: String,
    placeholder: &'static str,
}

impl PromptTemplate {
    pub fn new(
        task: TaskName,
        instruction_text: impl Into<String>,
        answer_encoding: AnswerEncoding,
        wrapper: impl Into<String>,
    ) -> Result<Self> {
        let instruction_text = instruction_text.into();
        let wrapper = wrapper.into();
        let found: Vec<&'static str> = INPUT_SLOTS
            .into_iter()
            .flat_map(|slot| std::iter::repeat_n(slot, instruction_text.matches(slot).count()))
            .collect();
        let [placeholder] = found[..] else {
            return Err(Error::InvalidConfig(format!(
                "{task} template must contain exactly one input placeholder, found {}",
                found.len()
            )));
        };
        if wrapper.matches(INSTRUCTION_SLOT).count() != 1 {
            return Err(Error::InvalidConfig(
                "prompt wrapper must contain exactly one {instruction} slot".into(),
            ));
        }
        Ok(Self {
            task,
            instruction_text,
            answer_encoding,
            wrapper,
            placeholder,
        })
    }

    pub fn builtin(task: TaskName) -> Self {
        let text = match task {
            TaskName::WritingStyle => WRITING_STYLE,
            TaskName::Sentiment => SENTIMENT,
            TaskName::NewsCategory => NEWS_CATEGORY,
        };
        let encoding = TaskSpec::builtin(task).answer_encoding;
        Self::new(task, text.trim_end_matches('\n'), encoding, ALPACA_WRAPPER)
            .expect("bundled templates are valid")
    }

    pub fn placeholder(&self) -> &str {
        self.placeholder
    }
}

/// Writing style, sentiment and news category templates, in that order.
pub fn builtin_templates() -> Vec<PromptTemplate> {
    [TaskName::WritingStyle, TaskName::Sentiment, TaskName::NewsCategory]
        .into_iter()
        .map(PromptTemplate::builtin)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub prompt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion: Option<String>,
}

impl RenderedPrompt {
    /// Prompt followed by the completion, if any.
    pub fn full_text(&self) -> String {
        format!("{}{}", self.prompt, self.completion.as_deref().unwrap_or(""))
    }
}

/// Fills `template` with `example.text`. Context fields are not used.
pub fn render(template: &PromptTemplate, example: &LabeledExample, mode: Mode) -> Result<RenderedPrompt> {
    let instruction = splice(&template.instruction_text, template.placeholder, &example.text);
    let prompt = splice(&template.wrapper, INSTRUCTION_SLOT, &instruction);
    let completion = match mode {
        Mode::Infer => None,
        Mode::Train => {
            let mut task = TaskSpec::builtin(template.task);
            task.answer_encoding = template.answer_encoding;
            let surface = task
                .answer_surface(&example.label)
                .ok_or_else(|| Error::InvalidLabel {
                    task: template.task.to_string(),
                    label: example.label.clone(),
                })?;
            Some(surface)
        }
    };
    Ok(RenderedPrompt { prompt, completion })
}

fn splice(template: &str, slot: &str, value: &str) -> String {
    let (before, after) = template.split_once(slot).expect("validated slot");
    let mut out = String::with_capacity(template.len() + value.len());
    out.push_str(before);
    out.push_str(value);
    out.push_str(after);
    out
}
