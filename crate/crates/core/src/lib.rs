//! Exact block-entropy distributions and the entropy-rank ratio `R` for
//! nucleotide sequences, plus the complexity-guided cropping strategies
//! built on top of them.
//!
//! The crate is organised bottom-up:
//!
//! * [`seqcore`] tokenises sequences and extracts non-overlapping tuple counts.
//! * [`entropy`] computes block Shannon entropies and Monte-Carlo profiles.
//! * [`partition`] enumerates ordered partitions, counts words exactly and
//!   builds the full distribution of block entropies, from which `R` is read.
//! * [`augment`] implements the basic, random, entropy, compressor and
//!   ratio-guided crops.

pub mod augment;
pub mod entropy;
mod error;
pub mod partition;
pub mod seqcore;

pub use error::{Error, Result};
pub use seqcore::{BlockSpec, EncodedSequence, FrequencyVector, PAD};
