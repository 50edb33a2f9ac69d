//! Brute-force BPE reference.
//!
//! Recounts every adjacent pair from scratch after each merge and works on
//! byte strings rather than ids, so it shares no data structures with the
//! library trainer.

use std::collections::{BTreeMap, BTreeSet};

use lexforge::tokenizer::TokenizerModel;

pub type Token = Vec<u8>;

/// Splits into alternating runs of whitespace and non-whitespace characters.
pub fn whitespace_pieces(text: &str) -> Vec<String> {
    let mut pieces: Vec<String> = Vec::new();
    let mut last_ws: Option<bool> = None;
    for c in text.chars() {
        let ws = c.is_whitespace();
        if last_ws == Some(ws) {
            pieces.last_mut().unwrap().push(c);
        } else {
            pieces.push(c.to_string());
        }
        last_ws = Some(ws);
    }
    pieces
}

fn merge_word(word: &[Token], pair: &(Token, Token)) -> Vec<Token> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < word.len() {
        if i + 1 < word.len() && word[i] == pair.0 && word[i + 1] == pair.1 {
            out.push([pair.0.clone(), pair.1.clone()].concat());
            i += 2;
        } else {
            out.push(word[i].clone());
            i += 1;
        }
    }
    out
}

/// Learned merges, in rank order.
pub fn train(corpus: &[String], target_vocab_size: usize, min_pair_frequency: u64) -> Vec<(Token, Token)> {
    let mut words: Vec<(Vec<Token>, u64)> = Vec::new();
    {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for line in corpus {
            for piece in whitespace_pieces(line) {
                *counts.entry(piece).or_insert(0) += 1;
            }
        }
        for (piece, n) in counts {
            words.push((piece.bytes().map(|b| vec![b]).collect(), n));
        }
    }
    let mut vocab: BTreeSet<Token> = (0..=255u8).map(|b| vec![b]).collect();
    let mut merges: Vec<(Token, Token)> = Vec::new();

    while vocab.len() < target_vocab_size {
        let mut pairs: BTreeMap<(Token, Token), u64> = BTreeMap::new();
        for (word, n) in &words {
            for w in word.windows(2) {
                *pairs.entry((w[0].clone(), w[1].clone())).or_insert(0) += n;
            }
        }
        // BTreeMap order is (left bytes, right bytes), so the first maximum is
        // the lexicographically smallest among ties.
        let mut best: Option<(&(Token, Token), u64)> = None;
        for (pair, &n) in &pairs {
            if best.is_none_or(|(_, m)| n > m) {
                best = Some((pair, n));
            }
        }
        let Some((pair, n)) = best else { break };
        if n < min_pair_frequency {
            break;
        }
        let pair = pair.clone();
        vocab.insert([pair.0.clone(), pair.1.clone()].concat());
        if !merges.contains(&pair) {
            merges.push(pair.clone());
        }
        for (word, _) in &mut words {
            *word = merge_word(word, &pair);
        }
    }
    merges
}

/// Greedy encoding of one piece: repeatedly apply the lowest-ranked merge
/// present, at its leftmost position.
pub fn encode_piece(piece: &str, merges: &[(Token, Token)]) -> Vec<Token> {
    let mut symbols: Vec<Token> = piece.bytes().map(|b| vec![b]).collect();
    loop {
        let mut best: Option<(usize, usize)> = None; // (rank, position)
        for i in 0..symbols.len().saturating_sub(1) {
            let rank = merges
                .iter()
                .position(|(l, r)| *l == symbols[i] && *r == symbols[i + 1]);
            if let Some(rank) = rank {
                if best.is_none_or(|(r, _)| rank < r) {
                    best = Some((rank, i));
                }
            }
        }
        let Some((_, i)) = best else { return symbols };
        let right = symbols.remove(i + 1);
        symbols[i].extend(right);
    }
}

pub fn encode(text: &str, merges: &[(Token, Token)]) -> Vec<Token> {
    whitespace_pieces(text)
        .iter()
        .flat_map(|p| encode_piece(p, merges))
        .collect()
}

/// The library model's merges as byte pairs.
pub fn merge_bytes(model: &TokenizerModel) -> Vec<(Vec<u8>, Vec<u8>)> {
    model
        .merges()
        .pairs()
        .iter()
        .map(|&(l, r)| (model.vocab().token(l).unwrap().to_vec(), model.vocab().token(r).unwrap().to_vec()))
        .collect()
}

pub fn ids_of(model: &TokenizerModel, tokens: &[Vec<u8>]) -> Vec<u32> {
    tokens.iter().map(|t| model.token_to_id(t).expect("oracle token in vocab")).collect()
}
