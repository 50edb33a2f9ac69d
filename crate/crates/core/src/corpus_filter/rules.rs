//! Individual text rules used by the line classifier.

use std::sync::LazyLock;

use regex::Regex;
use unicode_general_category::{get_general_category, GeneralCategory};

use super::CodepointRange;

static URL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?:[A-Za-z][A-Za-z0-9+.\-]*://|(?i:www\.))\S*").expect("valid URL pattern")
});

static NUMERIC_PREFIX: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*\d+[.):\-\s]*").expect("valid prefix pattern"));

/// Trims the ends and collapses every internal whitespace run to one space.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Removes `scheme://...` and `www....` spans up to the next whitespace.
pub fn strip_urls(text: &str) -> String {
    if !URL.is_match(text) {
        return normalize_whitespace(text);
    }
    normalize_whitespace(&URL.replace_all(text, " "))
}

/// Removes one leading digit run together with trailing `.`, `)`, `:`, `-` or
/// whitespace separators.
pub fn strip_numeric_prefix(text: &str) -> String {
    match NUMERIC_PREFIX.find(text) {
        Some(m) => text[m.end()..].to_string(),
        None => text.to_string(),
    }
}

/// Fraction of letter codepoints that fall inside `target_ranges`.
///
/// Letters are codepoints in the Unicode letter and mark categories, plus
/// format characters (such as the zero-width joiner) that lie inside a target
/// range. Digits, punctuation, symbols and whitespace are ignored. Text with
/// no letters at all is treated as in-script and yields 1.
pub fn script_ratio(text: &str, target_ranges: &[CodepointRange]) -> f64 {
    let (inside, letters) = script_counts(text, target_ranges);
    if letters == 0 {
        1.0
    } else {
        inside as f64 / letters as f64
    }
}

/// `(letters inside target ranges, all letters)`.
pub(crate) fn script_counts(text: &str, target_ranges: &[CodepointRange]) -> (usize, usize) {
    let mut inside = 0;
    let mut letters = 0;
    for c in text.chars() {
        let in_target = in_ranges(c, target_ranges);
        let is_letter = match get_general_category(c) {
            GeneralCategory::UppercaseLetter
            | GeneralCategory::LowercaseLetter
            | GeneralCategory::TitlecaseLetter
            | GeneralCategory::ModifierLetter
            | GeneralCategory::OtherLetter
            | GeneralCategory::NonspacingMark
            | GeneralCategory::SpacingMark
            | GeneralCategory::EnclosingMark => true,
            GeneralCategory::Format => in_target,
            _ => false,
        };
        if is_letter {
            letters += 1;
            if in_target {
                inside += 1;
            }
        }
    }
    (inside, letters)
}

fn in_ranges(c: char, ranges: &[CodepointRange]) -> bool {
    let cp = c as u32;
    // ranges are sorted and disjoint
    let idx = ranges.partition_point(|r| r.end < cp);
    ranges.get(idx).is_some_and(|r| r.start <= cp)
}

pub(crate) fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            get_general_category(c),
            GeneralCategory::ConnectorPunctuation
                | GeneralCategory::DashPunctuation
                | GeneralCategory::OpenPunctuation
                | GeneralCategory::ClosePunctuation
                | GeneralCategory::InitialPunctuation
                | GeneralCategory::FinalPunctuation
                | GeneralCategory::OtherPunctuation
        )
}

/// Length of the longest run of one punctuation codepoint repeated back to back.
pub fn longest_punct_run(text: &str) -> usize {
    let mut best = 0;
    let mut run = 0;
    let mut prev = None;
    for c in text.chars() {
        if is_punctuation(c) {
            run = if prev == Some(c) { run + 1 } else { 1 };
            best = best.max(run);
            prev = Some(c);
        } else {
            run = 0;
            prev = None;
        }
    }
    best
}

/// Replacement characters and non-whitespace control codes mark a line as
/// malformed.
pub(crate) fn has_malformed_chars(text: &str) -> bool {
    text.chars()
        .any(|c| c == char::REPLACEMENT_CHARACTER || (c.is_control() && !c.is_whitespace()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_filter::FilterConfig;

    fn sinhala() -> Vec<CodepointRange> {
        FilterConfig::default().target_ranges
    }

    #[test]
    fn whitespace_examples() {
        assert_eq!(normalize_whitespace(""), "");
        assert_eq!(normalize_whitespace("  a\t b  "), "a b");
        assert_eq!(normalize_whitespace("a b"), "a b");
        assert_eq!(normalize_whitespace("a\u{00A0}\u{3000}b"), "a b");
    }

    #[test]
    fn url_examples() {
        assert_eq!(strip_urls("no links here"), "no links here");
        assert_eq!(strip_urls("see http://x.lk/a now"), "see now");
        assert_eq!(strip_urls("www.abc.lk"), "");
        assert_eq!(strip_urls("WWW.ABC.LK x"), "x");
        assert_eq!(strip_urls("a https://a.b?q=1&r=2 b ftp://h c"), "a b c");
    }

    #[test]
    fn numeric_prefix_examples() {
        assert_eq!(strip_numeric_prefix("abc"), "abc");
        assert_eq!(strip_numeric_prefix("12. abc"), "abc");
        assert_eq!(strip_numeric_prefix("1) 2) abc"), "2) abc");
        assert_eq!(strip_numeric_prefix("3:-abc"), "abc");
        assert_eq!(strip_numeric_prefix("a1. b"), "a1. b");
    }

    #[test]
    fn script_ratio_examples() {
        assert_eq!(script_ratio("abc", &sinhala()), 0.0);
        assert_eq!(script_ratio("අද දින", &sinhala()), 1.0);
        assert_eq!(script_ratio("අද ok", &sinhala()), 0.5);
        assert_eq!(script_ratio("123 !?", &sinhala()), 1.0);
        assert_eq!(script_ratio("", &sinhala()), 1.0);
    }

    #[test]
    fn zwj_counts_inside_target() {
        // ශ්‍රී with ZWJ between virama and ra
        let text = "\u{0DC1}\u{0DCA}\u{200D}\u{0DBB}\u{0DD3} ok";
        let (inside, letters) = script_counts(text, &sinhala());
        assert_eq!((inside, letters), (5, 7));
    }

    #[test]
    fn punct_runs() {
        assert_eq!(longest_punct_run("!!!!!!"), 6);
        assert_eq!(longest_punct_run("a...b!!"), 3);
        assert_eq!(longest_punct_run("!?!?"), 1);
        assert_eq!(longest_punct_run("no punct"), 0);
        assert_eq!(longest_punct_run("\u{0DF4}\u{0DF4}"), 2);
    }

    #[test]
    fn malformed_chars() {
        assert!(has_malformed_chars("a\u{FFFD}b"));
        assert!(has_malformed_chars("a\u{0007}b"));
        assert!(!has_malformed_chars("a\tb"));
    }
}
