use super::vocab::TokenId;

/// Slices `ids` into consecutive blocks of `block_size`.
///
/// A short trailing block is kept only when `keep_last` is set; causal-LM
/// pretraining conventionally drops it.
///
/// # Panics
///
/// If `block_size` is zero.
pub fn pack_blocks(ids: &[TokenId], block_size: usize, keep_last: bool) -> Vec<Vec<TokenId>> {
    assert!(block_size >= 1, "block_size must be at least 1");
    ids.chunks(block_size)
        .filter(|chunk| keep_last || chunk.len() == block_size)
        .map(<[TokenId]>::to_vec)
        .collect()
}

/// Incremental form of [`pack_blocks`] for token streams too large to buffer.
#[derive(Debug)]
pub struct BlockPacker {
    block_size: usize,
    keep_last: bool,
    buf: Vec<TokenId>,
}

impl BlockPacker {
    pub fn new(block_size: usize, keep_last: bool) -> Self {
        assert!(block_size >= 1, "block_size must be at least 1");
        Self {
            block_size,
            keep_last,
            buf: Vec::with_capacity(block_size),
        }
    }

    /// Adds ids, handing every completed block to `emit`.
    pub fn extend<E>(&mut self, ids: &[TokenId], mut emit: impl FnMut(Vec<TokenId>) -> Result<(), E>) -> Result<(), E> {
        for &id in ids {
            self.buf.push(id);
            if self.buf.len() == self.block_size {
                emit(std::mem::replace(&mut self.buf, Vec::with_capacity(self.block_size)))?;
            }
        }
        Ok(())
    }

    /// The trailing partial block, if one exists and `keep_last` is set.
    pub fn finish(self) -> Option<Vec<TokenId>> {
        (self.keep_last && !self.buf.is_empty()).then_some(self.buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn halving_block_size() {
        let ids: Vec<TokenId> = (0..1024).collect();
        let blocks = pack_blocks(&ids, 512, false);
        assert_eq!(blocks.len(), 2);
        assert!(blocks.iter().all(|b| b.len() == 512));
        assert_eq!(blocks.concat(), ids);
    }

    #[test]
    fn remainder_dropped_or_kept() {
        let ids = [1, 2, 3, 4, 5];
        assert_eq!(pack_blocks(&ids, 2, false), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(pack_blocks(&ids, 2, true), vec![vec![1, 2], vec![3, 4], vec![5]]);
        assert!(pack_blocks(&[], 4, true).is_empty());
    }

    proptest! {
        #[test]
        fn streaming_matches_batch(
            chunks in proptest::collection::vec(proptest::collection::vec(0u32..100, 0..20), 0..10),
            block in 1usize..9,
            keep in any::<bool>(),
        ) {
            let all: Vec<TokenId> = chunks.concat();
            let mut packer = BlockPacker::new(block, keep);
            let mut out = Vec::new();
            for c in &chunks {
                packer.extend(c, |b| { out.push(b); Ok::<_, ()>(()) }).unwrap();
            }
            out.extend(packer.finish());
            prop_assert_eq!(out, pack_blocks(&all, block, keep));
        }
    }
}
