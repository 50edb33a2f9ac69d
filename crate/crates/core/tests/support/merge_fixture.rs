//! A 1,000-token base tokenizer and a 10-token addon sharing 4 tokens.
//!
//! The base holds the 256 bytes, the Sinhala lead-byte pair `E0 B6`, all 676
//! lowercase ASCII bigrams and 67 trigrams. The addon holds the bytes, `E0 B6`,
//! three of the base's ASCII tokens and six Sinhala tokens built on `E0 B6`.

use lexforge::tokenizer::{MergeList, Pretokenizer, TokenizerModel, Vocab};

pub const NEW_TOKENS: [&str; 6] = ["අ", "ද", "ම", "අද", "මම", "අම"];
pub const SHARED_ASCII: [&str; 3] = ["ab", "th", "the"];

fn push(vocab: &mut Vocab, merges: &mut MergeList, left: &[u8], right: &[u8]) -> u32 {
    let l = vocab.id(left).expect("left operand");
    let r = vocab.id(right).expect("right operand");
    let id = vocab.push([left, right].concat());
    merges.push(l, r, id);
    id
}

pub fn base() -> TokenizerModel {
    let mut vocab = Vocab::byte_level();
    let mut merges = MergeList::default();
    push(&mut vocab, &mut merges, &[0xE0], &[0xB6]);
    for a in b'a'..=b'z' {
        for b in b'a'..=b'z' {
            push(&mut vocab, &mut merges, &[a], &[b]);
        }
    }
    push(&mut vocab, &mut merges, b"th", b"e");
    'outer: for a in b'a'..=b'z' {
        for b in b'a'..=b'z' {
            if vocab.len() == 1000 {
                break 'outer;
            }
            if [a, b] != *b"th" {
                push(&mut vocab, &mut merges, &[a, b], b"s");
            }
        }
    }
    TokenizerModel::new(vocab, merges, Pretokenizer::ByteLevel, vec![]).unwrap()
}

pub fn addon() -> TokenizerModel {
    let mut vocab = Vocab::byte_level();
    let mut merges = MergeList::default();
    push(&mut vocab, &mut merges, &[0xE0], &[0xB6]);
    push(&mut vocab, &mut merges, b"a", b"b");
    push(&mut vocab, &mut merges, b"t", b"h");
    push(&mut vocab, &mut merges, b"th", b"e");
    push(&mut vocab, &mut merges, &[0xE0, 0xB6], &[0x85]); // අ
    push(&mut vocab, &mut merges, &[0xE0, 0xB6], &[0xAF]); // ද
    push(&mut vocab, &mut merges, &[0xE0, 0xB6], &[0xB8]); // ම
    push(&mut vocab, &mut merges, "අ".as_bytes(), "ද".as_bytes());
    push(&mut vocab, &mut merges, "ම".as_bytes(), "ම".as_bytes());
    push(&mut vocab, &mut merges, "අ".as_bytes(), "ම".as_bytes());
    TokenizerModel::new(vocab, merges, Pretokenizer::ByteLevel, vec![]).unwrap()
}
