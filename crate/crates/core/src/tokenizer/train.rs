//! Byte-level BPE training.
//!
//! Pretokens are counted once, then the most frequent adjacent pair is merged
//! until the vocabulary reaches its target size or the best pair falls below
//! `min_pair_frequency`. Equal frequencies go to the lexicographically smallest
//! `(left bytes, right bytes)` pair. Pair counts are maintained incrementally:
//! only pretokens containing the chosen pair are recounted after each merge.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use log::debug;
use serde::{Deserialize, Serialize};

use super::model::TokenizerModel;
use super::pretokenize::Pretokenizer;
use super::vocab::{MergeList, TokenId, Vocab};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Includes the 256 byte tokens.
    pub target_vocab_size: usize,
    pub min_pair_frequency: u64,
    pub pretokenizer: Pretokenizer,
    /// Appended after the learned vocabulary.
    pub special_tokens: Vec<String>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            target_vocab_size: 8000,
            min_pair_frequency: 2,
            pretokenizer: Pretokenizer::ByteLevel,
            special_tokens: Vec::new(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_vocab_size <= 256 {
            return Err(Error::InvalidConfig(format!(
                "target_vocab_size {} must exceed the 256-byte alphabet",
                self.target_vocab_size
            )));
        }
        if self.min_pair_frequency == 0 {
            return Err(Error::InvalidConfig("min_pair_frequency must be at least 1".into()));
        }
        let unique: HashSet<_> = self.special_tokens.iter().collect();
        if unique.len() != self.special_tokens.len() {
            return Err(Error::InvalidConfig("duplicate special token".into()));
        }
        Ok(())
    }
}

type Pair = (TokenId, TokenId);

struct Word {
    symbols: Vec<TokenId>,
    count: u64,
}

impl Word {
    fn has_pair(&self, pair: Pair) -> bool {
        self.symbols.windows(2).any(|w| (w[0], w[1]) == pair)
    }

    fn merge(&mut self, pair: Pair, merged: TokenId) {
        let mut out = Vec::with_capacity(self.symbols.len());
        let mut i = 0;
        while i < self.symbols.len() {
            if i + 1 < self.symbols.len() && (self.symbols[i], self.symbols[i + 1]) == pair {
                out.push(merged);
                i += 2;
            } else {
                out.push(self.symbols[i]);
                i += 1;
            }
        }
        self.symbols = out;
    }
}

struct Candidate {
    count: u64,
    left: Vec<u8>,
    right: Vec<u8>,
    pair: Pair,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

/// Trains a tokenizer on `corpus`.
pub fn train_bpe<I, S>(corpus: I, config: &TrainConfig) -> Result<TokenizerModel>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    config.validate()?;

    let mut piece_counts: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut documents = 0usize;
    for doc in corpus {
        documents += 1;
        for piece in config.pretokenizer.split(doc.as_ref()) {
            *piece_counts.entry(piece.as_bytes().to_vec()).or_insert(0) += 1;
        }
    }
    if documents == 0 {
        return Err(Error::EmptyCorpus);
    }

    let mut pieces: Vec<(Vec<u8>, u64)> = piece_counts.into_iter().collect();
    pieces.sort_unstable();
    let mut words: Vec<Word> = pieces
        .into_iter()
        .map(|(bytes, count)| Word {
            symbols: bytes.iter().map(|&b| TokenId::from(b)).collect(),
            count,
        })
        .collect();

    let mut vocab = Vocab::byte_level();
    let mut merges = MergeList::default();
    let mut pair_counts: HashMap<Pair, u64> = HashMap::new();
    let mut pair_words: HashMap<Pair, Vec<usize>> = HashMap::new();

    for (idx, word) in words.iter().enumerate() {
        for w in word.symbols.windows(2) {
            let pair = (w[0], w[1]);
            *pair_counts.entry(pair).or_insert(0) += word.count;
            let list = pair_words.entry(pair).or_default();
            if list.last() != Some(&idx) {
                list.push(idx);
            }
        }
    }

    let candidate = |vocab: &Vocab, pair: Pair, count: u64| Candidate {
        count,
        left: vocab.token(pair.0).expect("known id").to_vec(),
        right: vocab.token(pair.1).expect("known id").to_vec(),
        pair,
    };
    let mut heap: BinaryHeap<Candidate> = pair_counts
        .iter()
        .map(|(&pair, &count)| candidate(&vocab, pair, count))
        .collect();

    while vocab.len() < config.target_vocab_size {
        let Some(best) = pop_valid(&mut heap, &pair_counts) else {
            break;
        };
        if best.count < config.min_pair_frequency {
            break;
        }
        let pair = best.pair;
        let merged = vocab.push([best.left.as_slice(), best.right.as_slice()].concat());
        merges.push(pair.0, pair.1, merged);

        let mut affected = pair_words.remove(&pair).unwrap_or_default();
        affected.sort_unstable();
        affected.dedup();
        let mut touched: HashSet<Pair> = HashSet::new();
        for idx in affected {
            let word = &mut words[idx];
            if !word.has_pair(pair) {
                continue;
            }
            for w in word.symbols.windows(2) {
                let p = (w[0], w[1]);
                let c = pair_counts.get_mut(&p).expect("counted pair");
                *c -= word.count;
                touched.insert(p);
            }
            word.merge(pair, merged);
            for w in word.symbols.windows(2) {
                let p = (w[0], w[1]);
                *pair_counts.entry(p).or_insert(0) += word.count;
                touched.insert(p);
                let list = pair_words.entry(p).or_default();
                if list.last() != Some(&idx) {
                    list.push(idx);
                }
            }
        }
        let mut touched: Vec<Pair> = touched.into_iter().collect();
        touched.sort_unstable();
        for p in touched {
            match pair_counts.get(&p) {
                Some(0) => {
                    pair_counts.remove(&p);
                }
                Some(&count) => heap.push(candidate(&vocab, p, count)),
                None => {}
            }
        }
    }
    debug!(
        "trained {} merges, vocabulary {} tokens",
        merges.len(),
        vocab.len()
    );

    let base = vocab.id_bound() as TokenId;
    let specials = config
        .special_tokens
        .iter()
        .enumerate()
        .map(|(i, content)| super::SpecialToken {
            content: content.clone(),
            id: base + i as TokenId,
        })
        .collect();
    TokenizerModel::new(vocab, merges, config.pretokenizer, specials)
}

fn pop_valid(heap: &mut BinaryHeap<Candidate>, counts: &HashMap<Pair, u64>) -> Option<Candidate> {
    while let Some(top) = heap.pop() {
        if counts.get(&top.pair) == Some(&top.count) {
            return Some(top);
        }
    }
    None
}
