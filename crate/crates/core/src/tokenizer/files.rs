//! On-disk tokenizer layout.
//!
//! A tokenizer directory holds three files:
//!
//! - `vocab.json`: one object mapping escaped token strings (see
//!   [`escape_token`]) to ids, written in ascending id order;
//! - `merges.txt`: one `left right` pair of escaped tokens per line, file order
//!   being merge rank;
//! - `tokenizer_meta.json`: pretokenizer mode and special tokens.
//!
//! Files are written deterministically, so identical models give identical bytes.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{SpecialToken, TokenizerModel};
use super::pretokenize::Pretokenizer;
use super::vocab::{escape_token, unescape_token, MergeList, TokenId, Vocab};
use crate::{Error, Result};

pub const VOCAB_FILE: &str = "vocab.json";
pub const MERGES_FILE: &str = "merges.txt";
pub const META_FILE: &str = "tokenizer_meta.json";

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    pretokenizer: Pretokenizer,
    special_tokens: Vec<SpecialToken>,
}

pub fn save(model: &TokenizerModel, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let path = dir.join(VOCAB_FILE);
    let mut out = crate::jsonl::create(&path)?;
    let io = |e| Error::io(&path, e);
    out.write_all(b"{").map_err(io)?;
    for (n, (id, token)) in model.vocab().iter().enumerate() {
        let sep = if n == 0 { "\n  " } else { ",\n  " };
        let key = serde_json::to_string(&escape_token(token))?;
        write!(out, "{sep}{key}: {id}").map_err(io)?;
    }
    out.write_all(b"\n}\n").map_err(io)?;
    out.flush().map_err(io)?;

    let path = dir.join(MERGES_FILE);
    let mut out = crate::jsonl::create(&path)?;
    let io = |e| Error::io(&path, e);
    for &(l, r) in model.merges().pairs() {
        let left = escape_token(model.vocab().token(l).expect("valid model"));
        let right = escape_token(model.vocab().token(r).expect("valid model"));
        writeln!(out, "{left} {right}").map_err(io)?;
    }
    out.flush().map_err(io)?;

    crate::jsonl::write_pretty(
        &dir.join(META_FILE),
        &Meta {
            pretokenizer: model.pretokenizer(),
            special_tokens: model.special_tokens().to_vec(),
        },
    )
}

pub fn load(dir: &Path) -> Result<TokenizerModel> {
    let format_err = |file: &str, message: String| Error::TokenizerFormat {
        path: dir.join(file),
        message,
    };
    let read = |file: &str| {
        let p = dir.join(file);
        std::fs::read_to_string(&p).map_err(|e| Error::io(p, e))
    };

    let meta: Meta = serde_json::from_str(&read(META_FILE)?)
        .map_err(|e| format_err(META_FILE, e.to_string()))?;

    let raw: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&read(VOCAB_FILE)?)
        .map_err(|e| format_err(VOCAB_FILE, e.to_string()))?;
    let mut entries: Vec<(TokenId, Vec<u8>)> = Vec::with_capacity(raw.len());
    for (key, value) in raw {
        let id = value
            .as_u64()
            .and_then(|v| TokenId::try_from(v).ok())
            .ok_or_else(|| format_err(VOCAB_FILE, format!("id of {key:?} is not a u32")))?;
        let token = unescape_token(&key).map_err(|m| format_err(VOCAB_FILE, m))?;
        entries.push((id, token));
    }
    entries.sort_unstable();
    let mut vocab = Vocab::default();
    for (id, token) in entries {
        vocab
            .insert_at(token, id)
            .map_err(|e| format_err(VOCAB_FILE, e.to_string()))?;
    }

    let mut merges = MergeList::default();
    for (n, line) in read(MERGES_FILE)?.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(' ');
        let (Some(l), Some(r), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format_err(MERGES_FILE, format!("line {}: expected two tokens", n + 1)));
        };
        let resolve = |s: &str| -> Result<(TokenId, Vec<u8>)> {
            let bytes = unescape_token(s).map_err(|m| format_err(MERGES_FILE, m))?;
            let id = vocab.id(&bytes).ok_or_else(|| {
                format_err(MERGES_FILE, format!("line {}: unknown token {s:?}", n + 1))
            })?;
            Ok((id, bytes))
        };
        let (lid, lb) = resolve(l)?;
        let (rid, rb) = resolve(r)?;
        let merged = vocab.id(&[lb, rb].concat()).ok_or_else(|| {
            format_err(MERGES_FILE, format!("line {}: merge result not in vocabulary", n + 1))
        })?;
        if !merges.push(lid, rid, merged) {
            return Err(format_err(MERGES_FILE, format!("line {}: duplicate pair", n + 1)));
        }
    }

    TokenizerModel::new(vocab, merges, meta.pretokenizer, meta.special_tokens)
}
