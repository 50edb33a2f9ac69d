use std::collections::HashMap;

use crate::{Error, Result};

pub type TokenId = u32;

/// Bijection between token byte strings and ids.
///
/// Ids owned by special tokens are left as holes, so `id_bound()` may exceed
/// `len()`; together with the model's special tokens the id space is dense.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocab {
    id_to_token: Vec<Option<Vec<u8>>>,
    token_to_id: HashMap<Vec<u8>, TokenId>,
}

impl Vocab {
    /// The 256 single-byte tokens, id = byte value.
    pub fn byte_level() -> Self {
        let mut vocab = Vocab::default();
        for b in 0..=255u8 {
            vocab.push(vec![b]);
        }
        vocab
    }

    /// Appends a token at the next free id, or returns its existing id.
    pub fn push(&mut self, token: Vec<u8>) -> TokenId {
        if let Some(&id) = self.token_to_id.get(&token) {
            return id;
        }
        let id = self.id_to_token.len() as TokenId;
        self.token_to_id.insert(token.clone(), id);
        self.id_to_token.push(Some(token));
        id
    }

    /// Inserts `token` at exactly `id`, leaving holes below it if needed.
    pub(crate) fn insert_at(&mut self, token: Vec<u8>, id: TokenId) -> Result<()> {
        if self.token_to_id.contains_key(&token) {
            return Err(Error::InvalidConfig(format!(
                "duplicate token {}",
                escape_token(&token)
            )));
        }
        let idx = id as usize;
        if idx >= self.id_to_token.len() {
            self.id_to_token.resize(idx + 1, None);
        }
        if self.id_to_token[idx].is_some() {
            return Err(Error::InvalidConfig(format!("duplicate id {id}")));
        }
        self.id_to_token[idx] = Some(token.clone());
        self.token_to_id.insert(token, id);
        Ok(())
    }

    /// Reserves `id` for a non-vocabulary (special) token.
    pub(crate) fn reserve(&mut self, id: TokenId) {
        let idx = id as usize;
        if idx >= self.id_to_token.len() {
            self.id_to_token.resize(idx + 1, None);
        }
    }

    pub fn id(&self, token: &[u8]) -> Option<TokenId> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: TokenId) -> Option<&[u8]> {
        self.id_to_token.get(id as usize)?.as_deref()
    }

    pub fn contains(&self, token: &[u8]) -> bool {
        self.token_to_id.contains_key(token)
    }

    /// Number of tokens.
    pub fn len(&self) -> usize {
        self.token_to_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.token_to_id.is_empty()
    }

    /// One past the largest id in use.
    pub fn id_bound(&self) -> usize {
        self.id_to_token.len()
    }

    /// `(id, token)` in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (TokenId, &[u8])> {
        self.id_to_token
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.as_deref().map(|t| (i as TokenId, t)))
    }
}

/// Ordered BPE merge rules; position in the list is the rank.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeList {
    pairs: Vec<(TokenId, TokenId)>,
    ranks: HashMap<(TokenId, TokenId), (u32, TokenId)>,
}

impl MergeList {
    /// Appends `(left, right) -> merged`. Returns `false` if the pair exists.
    pub fn push(&mut self, left: TokenId, right: TokenId, merged: TokenId) -> bool {
        if self.ranks.contains_key(&(left, right)) {
            return false;
        }
        let rank = self.pairs.len() as u32;
        self.pairs.push((left, right));
        self.ranks.insert((left, right), (rank, merged));
        true
    }

    /// `(rank, merged id)` of a pair.
    pub fn get(&self, left: TokenId, right: TokenId) -> Option<(u32, TokenId)> {
        self.ranks.get(&(left, right)).copied()
    }

    pub fn contains(&self, left: TokenId, right: TokenId) -> bool {
        self.ranks.contains_key(&(left, right))
    }

    pub fn pairs(&self) -> &[(TokenId, TokenId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Renders token bytes as a printable string.
///
/// Valid UTF-8 characters are kept as-is except for the space, control
/// characters and the backslash. The backslash becomes `\\` and every other
/// escaped byte becomes `\xHH`.
pub fn escape_token(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len());
    for chunk in bytes.utf8_chunks() {
        for c in chunk.valid().chars() {
            match c {
                '\\' => out.push_str("\\\\"),
                ' ' => out.push_str("\\x20"),
                c if c.is_control() => {
                    let mut buf = [0u8; 4];
                    for b in c.encode_utf8(&mut buf).bytes() {
                        out.push_str(&format!("\\x{b:02X}"));
                    }
                }
                c => out.push(c),
            }
        }
        for b in chunk.invalid() {
            out.push_str(&format!("\\x{b:02X}"));
        }
    }
    out
}

/// Inverse of [`escape_token`].
pub fn unescape_token(s: &str) -> std::result::Result<Vec<u8>, String> {
    let mut out = Vec::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            let mut buf = [0u8; 4];
            out.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
            continue;
        }
        match chars.next() {
            Some('\\') => out.push(b'\\'),
            Some('x') => {
                let hex: String = chars.by_ref().take(2).collect();
                let byte = u8::from_str_radix(&hex, 16)
                    .ok()
                    .filter(|_| hex.len() == 2)
                    .ok_or_else(|| format!("bad byte escape `\\x{hex}` in {s:?}"))?;
                out.push(byte);
            }
            other => return Err(format!("bad escape `\\{}` in {s:?}", other.unwrap_or(' '))),
        }
    }
    Ok(out)
}
