#![allow(dead_code)]

pub mod bpe_oracle;
pub mod corpora;
pub mod merge_fixture;
pub mod metrics_oracle;
