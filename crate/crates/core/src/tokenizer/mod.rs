//! Byte-level BPE tokenizer: training, vocabulary extension, encoding,
//! fertility statistics and block packing.

mod files;
mod merge;
mod model;
mod pack;
mod pretokenize;
mod stats;
mod train;
mod vocab;

pub use files::{load, save, MERGES_FILE, META_FILE, VOCAB_FILE};
pub use merge::{merge_vocab, MergeReport};
pub use model::{SpecialToken, TokenizerModel};
pub use pack::{pack_blocks, BlockPacker};
pub use pretokenize::Pretokenizer;
pub use stats::{fertility, token_stats, TokenStats};
pub use train::{train_bpe, TrainConfig};
pub use vocab::{escape_token, unescape_token, MergeList, TokenId, Vocab};
