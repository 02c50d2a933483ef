//! Nucleotide tokenisation, block segmentation and tuple counting.
//!
//! Tokens are `A=0, C=1, G=2, T=3` with `4` reserved for padding. A tuple of
//! `n` consecutive tokens is identified by its big-endian base-4 value, so the
//! first letter is the most significant digit.

use std::fmt;
use std::ops::Deref;

use crate::{Error, Result};

/// Padding token.
pub const PAD: u8 = 4;

/// Largest tuple size whose identities fit in a `u128`.
pub const MAX_TUPLE_LEN: usize = 63;

/// A tokenised nucleotide sequence over `{0, 1, 2, 3, 4}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EncodedSequence {
    tokens: Vec<u8>,
}

impl EncodedSequence {
    /// Parses an `ACGT` string, case-insensitively. Anything else is rejected.
    pub fn encode(text: &str) -> Result<Self> {
        Self::parse(text, false)
    }

    /// Like [`encode`](Self::encode) but additionally maps `.` to [`PAD`], so
    /// that previously cropped-and-padded sequences can be read back.
    pub fn encode_padded(text: &str) -> Result<Self> {
        Self::parse(text, true)
    }

    fn parse(text: &str, allow_pad: bool) -> Result<Self> {
        let tokens = text
            .chars()
            .enumerate()
            .map(|(position, ch)| match ch {
                'A' | 'a' => Ok(0),
                'C' | 'c' => Ok(1),
                'G' | 'g' => Ok(2),
                'T' | 't' => Ok(3),
                '.' if allow_pad => Ok(PAD),
                found => Err(Error::InvalidNucleotide { position, found }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { tokens })
    }

    pub fn from_tokens(tokens: Vec<u8>) -> Result<Self> {
        if let Some((position, &token)) = tokens.iter().enumerate().find(|(_, &t)| t > PAD) {
            return Err(Error::InvalidToken { position, token });
        }
        Ok(Self { tokens })
    }

    /// Decodes back to letters, rendering padding as `.`.
    pub fn decode(&self) -> String {
        self.tokens.iter().map(|&t| b"ACGT."[t as usize] as char).collect()
    }

    pub fn tokens(&self) -> &[u8] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<u8> {
        self.tokens
    }

    pub fn has_padding(&self) -> bool {
        self.tokens.contains(&PAD)
    }
}

impl Deref for EncodedSequence {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        &self.tokens
    }
}

impl fmt::Display for EncodedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.decode())
    }
}

/// Block length `T`, tuple size `n` and number of blocks `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockSpec {
    block_len: usize,
    tuple_len: usize,
    blocks: usize,
}

impl BlockSpec {
    pub fn new(block_len: usize, tuple_len: usize, blocks: usize) -> Result<Self> {
        if tuple_len == 0 || tuple_len > MAX_TUPLE_LEN {
            return Err(Error::InvalidBlockSpec(format!(
                "tuple size must be in 1..={MAX_TUPLE_LEN}, got {tuple_len}"
            )));
        }
        if block_len < tuple_len {
            return Err(Error::InvalidBlockSpec(format!(
                "block length {block_len} is shorter than tuple size {tuple_len}"
            )));
        }
        if blocks == 0 {
            return Err(Error::InvalidBlockSpec("block count must be at least 1".into()));
        }
        Ok(Self { block_len, tuple_len, blocks })
    }

    /// A single block (`N = 1`).
    pub fn single(block_len: usize, tuple_len: usize) -> Result<Self> {
        Self::new(block_len, tuple_len, 1)
    }

    /// All `floor(len / T)` full blocks of a sequence of length `len`.
    pub fn covering(len: usize, block_len: usize, tuple_len: usize) -> Result<Self> {
        if block_len == 0 {
            return Err(Error::InvalidBlockSpec("block length must be at least 1".into()));
        }
        if len < block_len {
            return Err(Error::SequenceTooShort { len, block_len, needed: 1 });
        }
        Self::new(block_len, tuple_len, len / block_len)
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn tuple_len(&self) -> usize {
        self.tuple_len
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// `M = floor(T / n)`, the tuple count `c` of one block.
    pub fn tuples_per_block(&self) -> usize {
        self.block_len / self.tuple_len
    }

    /// `λ = 4^n`.
    pub fn alphabet_size(&self) -> u128 {
        alphabet_size(self.tuple_len)
    }

    pub fn with_blocks(self, blocks: usize) -> Result<Self> {
        Self::new(self.block_len, self.tuple_len, blocks)
    }
}

impl fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T={} n={} N={}", self.block_len, self.tuple_len, self.blocks)
    }
}

/// `4^n`, saturating at `u128::MAX` beyond [`MAX_TUPLE_LEN`].
pub fn alphabet_size(tuple_len: usize) -> u128 {
    if tuple_len > MAX_TUPLE_LEN {
        return u128::MAX;
    }
    1u128 << (2 * tuple_len)
}

/// Occurrence counts of non-overlapping `n`-tuples, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyVector {
    tuple_len: usize,
    /// `(tuple identity, count)`, ascending by identity, counts all positive.
    counts: Vec<(u128, u64)>,
    total: u64,
}

impl FrequencyVector {
    pub fn tuple_len(&self) -> usize {
        self.tuple_len
    }

    /// `λ = 4^n`.
    pub fn alphabet_size(&self) -> u128 {
        alphabet_size(self.tuple_len)
    }

    /// Total number of counted tuples `c`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Count of a single tuple identity.
    pub fn get(&self, tuple: u128) -> u64 {
        self.counts
            .binary_search_by_key(&tuple, |&(id, _)| id)
            .map(|i| self.counts[i].1)
            .unwrap_or(0)
    }

    /// Non-zero `(identity, count)` pairs in ascending identity order.
    pub fn nonzero(&self) -> &[(u128, u64)] {
        &self.counts
    }

    /// Positive counts only, identities forgotten.
    pub fn positive_counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.iter().map(|&(_, c)| c)
    }

    /// Dense counts indexed by tuple identity. Only sensible for small `n`.
    pub fn dense(&self) -> Vec<u64> {
        assert!(self.tuple_len <= 10, "dense counts for n={} would not fit", self.tuple_len);
        let mut out = vec![0; self.alphabet_size() as usize];
        for &(id, c) in &self.counts {
            out[id as usize] = c;
        }
        out
    }

    /// Counts sorted non-increasingly: the ordered-partition shape.
    pub fn shape(&self) -> Vec<u64> {
        let mut shape: Vec<u64> = self.positive_counts().collect();
        shape.sort_unstable_by(|a, b| b.cmp(a));
        shape
    }
}

/// Counts non-overlapping `n`-tuples at offsets `0, n, 2n, …`.
///
/// The trailing `len mod n` tokens are ignored and any tuple containing
/// [`PAD`] is skipped entirely, so it does not contribute to the total.
pub fn tuple_counts(tokens: &[u8], tuple_len: usize) -> FrequencyVector {
    assert!(
        (1..=MAX_TUPLE_LEN).contains(&tuple_len),
        "tuple size {tuple_len} out of range"
    );
    let mut ids: Vec<u128> = tokens
        .chunks_exact(tuple_len)
        .filter(|tuple| !tuple.contains(&PAD))
        .map(|tuple| tuple.iter().fold(0u128, |acc, &t| (acc << 2) | t as u128))
        .collect();
    ids.sort_unstable();

    let total = ids.len() as u64;
    let mut counts: Vec<(u128, u64)> = Vec::new();
    for id in ids {
        match counts.last_mut() {
            Some((last, c)) if *last == id => *c += 1,
            _ => counts.push((id, 1)),
        }
    }
    FrequencyVector { tuple_len, counts, total }
}

/// Splits into `floor(len / T)` consecutive blocks of exactly `T` tokens; the
/// remainder is dropped.
pub fn split_blocks(tokens: &[u8], block_len: usize) -> Vec<EncodedSequence> {
    assert!(block_len >= 1, "block length must be at least 1");
    tokens
        .chunks_exact(block_len)
        .map(|b| EncodedSequence { tokens: b.to_vec() })
        .collect()
}

/// Fraction of `C`/`G` among non-padding tokens.
pub fn gc_content(tokens: &[u8]) -> Result<f64> {
    let (gc, informative) = tokens.iter().fold((0usize, 0usize), |(gc, all), &t| match t {
        1 | 2 => (gc + 1, all + 1),
        PAD => (gc, all),
        _ => (gc, all + 1),
    });
    if informative == 0 {
        return Err(Error::NoNucleotides);
    }
    Ok(gc as f64 / informative as f64)
}
