use serde::{Deserialize, Serialize};

use super::model::{SpecialToken, TokenizerModel};
use super::vocab::TokenId;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeReport {
    /// Ids occupied by the base model (vocabulary plus special tokens).
    pub base_size: usize,
    /// Every addon id, regular or special.
    pub candidate_tokens: usize,
    pub skipped_duplicates: usize,
    pub added: usize,
    pub final_size: usize,
    pub merges_appended: usize,
}

/// Extends `base` with the tokens and merges of `addon`.
///
/// Base ids and merge ranks are left untouched. Addon tokens missing from the
/// base are appended in addon-id order starting at the base size; addon merges
/// follow every base merge, in their original relative order, skipping pairs
/// the base already merges.
pub fn merge_vocab(
    base: &TokenizerModel,
    addon: &TokenizerModel,
) -> Result<(TokenizerModel, MergeReport)> {
    if base.pretokenizer() != addon.pretokenizer() {
        return Err(Error::IncompatibleTokenizers(format!(
            "base uses {} pretokenization, addon uses {}",
            base.pretokenizer(),
            addon.pretokenizer()
        )));
    }

    let base_size = base.size();
    let mut vocab = base.vocab().clone();
    let mut merges = base.merges().clone();
    let mut specials: Vec<SpecialToken> = base.special_tokens().to_vec();
    let mut next_id = base_size as TokenId;
    let mut candidate_tokens = 0;
    let mut skipped_duplicates = 0;

    for addon_id in 0..addon.size() as TokenId {
        candidate_tokens += 1;
        if let Some(token) = addon.vocab().token(addon_id) {
            if vocab.contains(token) {
                skipped_duplicates += 1;
            } else {
                vocab.insert_at(token.to_vec(), next_id)?;
                next_id += 1;
            }
        } else if let Some(st) = addon.special_tokens().iter().find(|s| s.id == addon_id) {
            if specials.iter().any(|s| s.content == st.content) {
                skipped_duplicates += 1;
            } else {
                vocab.reserve(next_id);
                specials.push(SpecialToken {
                    content: st.content.clone(),
                    id: next_id,
                });
                next_id += 1;
            }
        }
    }

    let mut merges_appended = 0;
    for &(l, r) in addon.merges().pairs() {
        let left = addon.vocab().token(l).expect("validated addon");
        let right = addon.vocab().token(r).expect("validated addon");
        let (Some(ml), Some(mr)) = (vocab.id(left), vocab.id(right)) else {
            continue;
        };
        if merges.contains(ml, mr) {
            continue;
        }
        let joined = [left, right].concat();
        let merged = vocab.id(&joined).expect("addon merge result is an addon token");
        merges.push(ml, mr, merged);
        merges_appended += 1;
    }

    let added = candidate_tokens - skipped_duplicates;
    let model = TokenizerModel::new(vocab, merges, base.pretokenizer(), specials)?;
    let report = MergeReport {
        base_size,
        candidate_tokens,
        skipped_duplicates,
        added,
        final_size: model.size(),
        merges_appended,
    };
    debug_assert_eq!(report.final_size, report.base_size + report.added);
    Ok((model, report))
}
