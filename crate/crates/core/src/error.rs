use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid nucleotide {found:?} at position {position}")]
    InvalidNucleotide { position: usize, found: char },

    #[error("invalid token {token} at position {position} (expected 0..=4)")]
    InvalidToken { position: usize, token: u8 },

    #[error("invalid block parameters: {0}")]
    InvalidBlockSpec(String),

    #[error("frequency vector is empty: no complete tuple to measure")]
    EmptyFrequencyVector,

    #[error("sequence of length {len} has fewer than {needed} full blocks of length {block_len}")]
    SequenceTooShort { len: usize, block_len: usize, needed: usize },

    #[error("sequence contains no nucleotide tokens")]
    NoNucleotides,

    #[error("block {block} contains padding; its entropy is not comparable to the exact distribution")]
    PaddedBlock { block: usize },

    #[error("resource guard: {what} would need {required} items, cap is {cap}")]
    ResourceGuard { what: &'static str, required: u128, cap: u128 },

    #[error("context mismatch: distribution is for {expected}, value was computed for {found}")]
    ContextMismatch { expected: String, found: String },

    #[error("invalid crop configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("sequence of length {len} is longer than target {target}; crop it first")]
    LongerThanTarget { len: usize, target: usize },

    #[error("malformed distribution file {}: line {line}: {message}", path.display())]
    CacheFormat { path: PathBuf, line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
