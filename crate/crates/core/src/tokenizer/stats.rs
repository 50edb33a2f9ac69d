use serde::{Deserialize, Serialize};

use super::model::TokenizerModel;
use crate::{Error, Result};

/// Corpus-level token counts for one tokenizer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TokenStats {
    pub lines: u64,
    pub words: u64,
    /// Tokens produced by encoding each line as a whole.
    pub tokens: u64,
    /// Tokens produced by encoding each whitespace-delimited word on its own.
    pub word_tokens: u64,
    pub vocab_size: usize,
}

impl TokenStats {
    pub fn add_line(&mut self, model: &TokenizerModel, line: &str) {
        self.lines += 1;
        self.tokens += model.count_tokens(line) as u64;
        for word in line.split_whitespace() {
            self.words += 1;
            self.word_tokens += model.count_tokens(word) as u64;
        }
    }

    /// Average tokens per whitespace-delimited word.
    pub fn fertility(&self) -> Result<f64> {
        if self.words == 0 {
            return Err(Error::NoWords);
        }
        Ok(self.word_tokens as f64 / self.words as f64)
    }
}

pub fn token_stats<I, S>(model: &TokenizerModel, corpus: I) -> TokenStats
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut stats = TokenStats {
        vocab_size: model.size(),
        ..TokenStats::default()
    };
    for line in corpus {
        stats.add_line(model, line.as_ref());
    }
    stats
}

/// Total tokens over total whitespace words, encoding each word separately.
pub fn fertility<I, S>(model: &TokenizerModel, corpus: I) -> Result<f64>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    token_stats(model, corpus).fertility()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::{train_bpe, Pretokenizer, TrainConfig};

    #[test]
    fn byte_model_two_per_word() {
        let m = TokenizerModel::bytes_only(Pretokenizer::Whitespace);
        assert_eq!(fertility(&m, ["ab ab"]).unwrap(), 2.0);
        let stats = token_stats(&m, ["ab ab"]);
        assert_eq!(stats.tokens, 5);
        assert_eq!(stats.words, 2);
    }

    #[test]
    fn whole_word_tokens_give_one() {
        let config = TrainConfig {
            target_vocab_size: 1000,
            min_pair_frequency: 1,
            pretokenizer: Pretokenizer::Whitespace,
            special_tokens: vec![],
        };
        let m = train_bpe(["low lower lowest"], &config).unwrap();
        assert_eq!(fertility(&m, ["low lower lowest"]).unwrap(), 1.0);
    }

    #[test]
    fn no_words_is_an_error() {
        let m = TokenizerModel::bytes_only(Pretokenizer::Whitespace);
        assert!(matches!(fertility(&m, ["  ", ""]), Err(Error::NoWords)));
    }
}
