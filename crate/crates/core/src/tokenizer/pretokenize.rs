use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::Error;

/// Splits text into pieces that merges never cross.
///
/// Both modes are lossless: the pieces concatenate back to the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pretokenizer {
    /// Maximal runs of whitespace and of non-whitespace.
    Whitespace,
    /// GPT-2 style word pieces: an optional leading space followed by a run of
    /// letters (marks and zero-width joiners included, so Sinhala syllables stay
    /// together), digits, or other symbols. A whitespace run that precedes a
    /// word gives its final space to that word.
    ByteLevel,
}

static BYTE_LEVEL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?x)
          \ ?[\p{L}\p{M}\x{200C}\x{200D}]+
        | \ ?\p{N}+
        | \ ?[^\s\p{L}\p{M}\p{N}\x{200C}\x{200D}]+
        | \s+",
    )
    .expect("valid pretokenizer pattern")
});

impl Pretokenizer {
    /// Pieces of `text`, in order; they concatenate back to `text`.
    pub fn split(self, text: &str) -> Vec<&str> {
        match self {
            Pretokenizer::Whitespace => split_whitespace_runs(text),
            Pretokenizer::ByteLevel => split_byte_level(text),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pretokenizer::Whitespace => "whitespace",
            Pretokenizer::ByteLevel => "byte-level",
        }
    }
}

impl fmt::Display for Pretokenizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pretokenizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "whitespace" => Ok(Pretokenizer::Whitespace),
            "byte-level" | "byte_level" => Ok(Pretokenizer::ByteLevel),
            other => Err(Error::InvalidConfig(format!("unknown pretokenizer `{other}`"))),
        }
    }
}

fn split_whitespace_runs(text: &str) -> Vec<&str> {
    let mut pieces = Vec::new();
    let mut start = 0;
    let mut prev_ws = None;
    for (i, c) in text.char_indices() {
        let ws = c.is_whitespace();
        if prev_ws.is_some_and(|p| p != ws) {
            pieces.push(&text[start..i]);
            start = i;
        }
        prev_ws = Some(ws);
    }
    if start < text.len() {
        pieces.push(&text[start..]);
    }
    pieces
}

fn split_byte_level(text: &str) -> Vec<&str> {
    let mut pieces = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let Some(m) = BYTE_LEVEL.find_at(text, pos) else {
            pieces.push(&text[pos..]);
            break;
        };
        debug_assert_eq!(m.start(), pos, "pattern must cover every character");
        let mut end = m.end();
        let piece = m.as_str();
        // `\s+(?!\S)`: leave the last space of a run for the following word.
        if end < text.len() && piece.len() > 1 && piece.ends_with(' ') && piece.trim().is_empty() {
            end -= 1;
        }
        pieces.push(&text[pos..end]);
        pos = end;
    }
    pieces
}
