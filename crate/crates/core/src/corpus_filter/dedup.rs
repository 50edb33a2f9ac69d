use std::collections::HashSet;

use super::{normalize_whitespace, RawLine};
use crate::Result;

/// First-occurrence-wins exact duplicate detector keyed on whitespace-normalized text.
#[derive(Debug, Default)]
pub struct Deduplicator {
    seen: HashSet<String>,
}

impl Deduplicator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `true` the first time a normalized text is offered.
    pub fn insert(&mut self, text: &str) -> bool {
        let key = normalize_whitespace(text);
        if self.seen.contains(&key) {
            false
        } else {
            self.seen.insert(key);
            true
        }
    }

    pub fn unique(&self) -> usize {
        self.seen.len()
    }
}

/// Drops every line whose normalized text was already seen earlier in the
/// stream. Survivors keep their original text and order. Returns the number of
/// lines removed.
pub fn dedup_exact<I, K>(lines: I, mut on_keep: K) -> Result<u64>
where
    I: IntoIterator<Item = Result<RawLine>>,
    K: FnMut(RawLine) -> Result<()>,
{
    let mut dedup = Deduplicator::new();
    let mut removed = 0;
    for line in lines {
        let line = line?;
        if dedup.insert(&line.text) {
            on_keep(line)?;
        } else {
            removed += 1;
        }
    }
    Ok(removed)
}
