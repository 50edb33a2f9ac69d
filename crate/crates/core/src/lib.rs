//! Building blocks for adapting a pretrained language model to a
//! low-resource language (Sinhala by default).
//!
//! The crate covers the deterministic data side of that work:
//!
//! - [`corpus_filter`]: heuristic sentence cleaning and exact deduplication
//!   of merged web-crawl corpora.
//! - [`tokenizer`]: byte-level BPE training, base-preserving vocabulary
//!   extension, encode/decode, fertility and fixed-size block packing.
//! - [`dataset`]: extraction, cleaning and stratified 80:10:10 splitting of
//!   labelled classification data.
//! - [`prompts`]: Alpaca-style instruction prompts for the three tasks.
//! - [`evaluator`]: label parsing, confusion matrices and macro/weighted
//!   precision, recall and F1.

pub mod corpus_filter;
pub mod dataset;
pub mod evaluator;
pub mod jsonl;
pub mod prompts;
pub mod tokenizer;

mod error;

pub use error::{Error, Result};
