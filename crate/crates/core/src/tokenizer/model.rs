use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::pretokenize::Pretokenizer;
use super::vocab::{escape_token, MergeList, TokenId, Vocab};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialToken {
    pub content: String,
    pub id: TokenId,
}

/// A byte-level BPE tokenizer.
///
/// Special tokens live in the same id space as the vocabulary but are never
/// produced by [`encode`](Self::encode); they only decode to their content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerModel {
    vocab: Vocab,
    merges: MergeList,
    pretokenizer: Pretokenizer,
    special_tokens: Vec<SpecialToken>,
    byte_ids: [TokenId; 256],
}

impl TokenizerModel {
    /// Builds a model and checks every structural invariant: all 256 byte
    /// tokens present, merge operands and results in the vocabulary, special
    /// ids disjoint from vocabulary ids, and the combined id space dense.
    pub fn new(
        vocab: Vocab,
        merges: MergeList,
        pretokenizer: Pretokenizer,
        special_tokens: Vec<SpecialToken>,
    ) -> Result<Self> {
        let mut vocab = vocab;
        let mut byte_ids = [0; 256];
        for b in 0..=255u8 {
            byte_ids[b as usize] = vocab.id(&[b]).ok_or_else(|| {
                Error::InvalidConfig(format!("vocabulary lacks byte token {b:#04X}"))
            })?;
        }

        for (rank, &(l, r)) in merges.pairs().iter().enumerate() {
            let (Some(left), Some(right)) = (vocab.token(l), vocab.token(r)) else {
                return Err(Error::InvalidConfig(format!(
                    "merge {rank} references ids outside the vocabulary"
                )));
            };
            let joined = [left, right].concat();
            let (_, merged) = merges.get(l, r).expect("pair is in its own list");
            if vocab.id(&joined) != Some(merged) {
                return Err(Error::InvalidConfig(format!(
                    "merge {rank} ({} {}) does not produce a vocabulary token",
                    escape_token(left),
                    escape_token(right)
                )));
            }
        }

        let mut seen = HashSet::new();
        for st in &special_tokens {
            if vocab.token(st.id).is_some() || !seen.insert(st.id) {
                return Err(Error::InvalidConfig(format!(
                    "special token {:?} id {} collides",
                    st.content, st.id
                )));
            }
        }
        let size = vocab.len() + special_tokens.len();
        let bound = vocab
            .id_bound()
            .max(special_tokens.iter().map(|s| s.id as usize + 1).max().unwrap_or(0));
        if bound != size {
            return Err(Error::InvalidConfig(format!(
                "id space is not dense: {size} ids spread over 0..{bound}"
            )));
        }

        for st in &special_tokens {
            vocab.reserve(st.id);
        }
        Ok(Self {
            vocab,
            merges,
            pretokenizer,
            special_tokens,
            byte_ids,
        })
    }

    /// A model with only the 256 byte tokens.
    pub fn bytes_only(pretokenizer: Pretokenizer) -> Self {
        Self::new(Vocab::byte_level(), MergeList::default(), pretokenizer, Vec::new())
            .expect("byte vocabulary is valid")
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn merges(&self) -> &MergeList {
        &self.merges
    }

    pub fn pretokenizer(&self) -> Pretokenizer {
        self.pretokenizer
    }

    pub fn special_tokens(&self) -> &[SpecialToken] {
        &self.special_tokens
    }

    pub fn special_id(&self, content: &str) -> Option<TokenId> {
        self.special_tokens
            .iter()
            .find(|s| s.content == content)
            .map(|s| s.id)
    }

    /// Total number of ids, vocabulary plus special tokens.
    pub fn size(&self) -> usize {
        self.vocab.len() + self.special_tokens.len()
    }

    pub fn token_to_id(&self, token: &[u8]) -> Option<TokenId> {
        self.vocab.id(token)
    }

    /// Encodes `text`, applying merges greedily by rank within each pretoken.
    pub fn encode(&self, text: &str) -> Vec<TokenId> {
        let mut ids = Vec::with_capacity(text.len() / 2);
        for piece in self.pretokenizer.split(text) {
            self.encode_piece(piece.as_bytes(), &mut ids);
        }
        ids
    }

    /// Number of tokens `text` encodes to.
    pub fn count_tokens(&self, text: &str) -> usize {
        let mut buf = Vec::new();
        let mut n = 0;
        for piece in self.pretokenizer.split(text) {
            buf.clear();
            self.encode_piece(piece.as_bytes(), &mut buf);
            n += buf.len();
        }
        n
    }

    fn encode_piece(&self, bytes: &[u8], out: &mut Vec<TokenId>) {
        let mut symbols: Vec<TokenId> = bytes.iter().map(|&b| self.byte_ids[b as usize]).collect();
        loop {
            // Lowest rank wins; leftmost among equal ranks.
            let mut best: Option<(u32, usize, TokenId)> = None;
            for (i, w) in symbols.windows(2).enumerate() {
                if let Some((rank, merged)) = self.merges.get(w[0], w[1]) {
                    if best.is_none_or(|(r, _, _)| rank < r) {
                        best = Some((rank, i, merged));
                    }
                }
            }
            let Some((_, i, merged)) = best else { break };
            symbols[i] = merged;
            symbols.remove(i + 1);
        }
        out.extend_from_slice(&symbols);
    }

    /// Concatenated bytes of `ids`.
    pub fn decode_bytes(&self, ids: &[TokenId]) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(ids.len() * 2);
        for (position, &id) in ids.iter().enumerate() {
            if let Some(token) = self.vocab.token(id) {
                out.extend_from_slice(token);
            } else if let Some(st) = self.special_tokens.iter().find(|s| s.id == id) {
                out.extend_from_slice(st.content.as_bytes());
            } else {
                return Err(Error::UnknownId { id, position });
            }
        }
        Ok(out)
    }

    pub fn decode(&self, ids: &[TokenId]) -> Result<String> {
        String::from_utf8(self.decode_bytes(ids)?).map_err(|_| Error::InvalidUtf8)
    }
}
