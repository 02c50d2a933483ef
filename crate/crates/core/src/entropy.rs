//! Block Shannon entropy, mean block entropy and Monte-Carlo entropy profiles.
//!
//! All entropies are in bits. A block of `T` tokens is read as `floor(T/n)`
//! non-overlapping `n`-tuples; its entropy is bounded by `log2(4^n) = 2n`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::seqcore::{tuple_counts, BlockSpec, FrequencyVector, MAX_TUPLE_LEN};
use crate::{Error, Result};

/// An entropy in bits, tagged with the block parameters it was computed under.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyValue {
    pub bits: f64,
    pub spec: BlockSpec,
}

/// Shannon entropy `-Σ b_j log2 b_j` of the relative tuple frequencies.
pub fn block_entropy(fv: &FrequencyVector) -> Result<f64> {
    if fv.total() == 0 {
        return Err(Error::EmptyFrequencyVector);
    }
    Ok(entropy_of_counts(fv.positive_counts(), fv.total()))
}

/// Entropy of a count vector with the given total. Zero counts contribute 0.
///
/// Terms are summed in ascending count order, so permutations of the same
/// counts give bit-identical results and crop scores tie exactly.
pub fn entropy_of_counts(counts: impl IntoIterator<Item = u64>, total: u64) -> f64 {
    let c = total as f64;
    let mut counts: Vec<u64> = counts.into_iter().filter(|&a| a > 0).collect();
    counts.sort_unstable();
    let h: f64 = counts
        .into_iter()
        .map(|a| {
            let b = a as f64 / c;
            -b * b.log2()
        })
        .sum();
    // A single occupied tuple gives -1 * log2(1) = -0.0.
    h.max(0.0)
}

/// Entropy of a whole token slice read as `n`-tuples (no blocking, `N = 1`).
///
/// Tuples containing padding are ignored.
pub fn sequence_entropy(tokens: &[u8], tuple_len: usize) -> Result<f64> {
    block_entropy(&tuple_counts(tokens, tuple_len))
}

/// Arithmetic mean of the entropies of the first `spec.blocks()` full
/// `T`-blocks.
pub fn mean_block_entropy(tokens: &[u8], spec: BlockSpec) -> Result<EntropyValue> {
    let t = spec.block_len();
    if tokens.len() / t < spec.blocks() {
        return Err(Error::SequenceTooShort {
            len: tokens.len(),
            block_len: t,
            needed: spec.blocks(),
        });
    }
    let sum = tokens
        .chunks_exact(t)
        .take(spec.blocks())
        .map(|block| sequence_entropy(block, spec.tuple_len()))
        .sum::<Result<f64>>()?;
    Ok(EntropyValue { bits: sum / spec.blocks() as f64, spec })
}

/// Mean entropy over all `floor(L/T)` full blocks.
pub fn mean_entropy_all_blocks(tokens: &[u8], block_len: usize, tuple_len: usize) -> Result<EntropyValue> {
    mean_block_entropy(tokens, BlockSpec::covering(tokens.len(), block_len, tuple_len)?)
}

/// Outcome of concatenating two sequences whose mean block entropies are known.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcatBound {
    /// Mean over the `N_o + N_v` full blocks of the concatenation.
    pub block_mean: f64,
    /// Length-weighted mean `θ = (L_o S_o + L_v S_v) / (L_o + L_v)`.
    pub length_weighted: f64,
    /// Upper bound on `|θ - block_mean|`: `2n (r_o + r_v) / (T N)`.
    pub bound: f64,
}

/// Exact block mean and length-weighted estimate for `o ‖ v`.
///
/// Each operand is `(length, mean block entropy)`. The bound is zero when both
/// lengths are multiples of `block_len`, in which case the two means coincide.
pub fn concat_bound(
    (len_o, entropy_o): (usize, f64),
    (len_v, entropy_v): (usize, f64),
    block_len: usize,
    tuple_len: usize,
) -> Result<ConcatBound> {
    if block_len == 0 || tuple_len == 0 {
        return Err(Error::InvalidBlockSpec("block length and tuple size must be positive".into()));
    }
    if len_o < block_len || len_v < block_len {
        return Err(Error::SequenceTooShort {
            len: len_o.min(len_v),
            block_len,
            needed: 1,
        });
    }
    let (n_o, r_o) = (len_o / block_len, len_o % block_len);
    let (n_v, r_v) = (len_v / block_len, len_v % block_len);
    let n = (n_o + n_v) as f64;

    let block_mean = (n_o as f64 * entropy_o + n_v as f64 * entropy_v) / n;
    let length_weighted = if r_o == 0 && r_v == 0 {
        block_mean
    } else {
        (len_o as f64 * entropy_o + len_v as f64 * entropy_v) / (len_o + len_v) as f64
    };
    let log_lambda = 2.0 * tuple_len as f64;
    let bound = log_lambda * (r_o + r_v) as f64 / (block_len as f64 * n);
    Ok(ConcatBound { block_mean, length_weighted, bound })
}

/// Parameter swept by [`monte_carlo_profiles`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    /// `N = 1..=L` blocks of `T = floor(L/N)` with a fixed tuple size.
    Blocks { tuple_len: usize },
    /// Tuple size `n = 1..=max_tuple_len` over the whole sequence (`N = 1`).
    TupleLen { max_tuple_len: usize },
}

impl Sweep {
    /// Default n-sweep range.
    pub const DEFAULT_MAX_TUPLE_LEN: usize = 50;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub param: usize,
    pub mean_entropy: f64,
}

/// Uniform random sequence; `stream` selects an independent ChaCha stream of
/// the master `seed`.
pub fn random_sequence(len: usize, seed: u64, stream: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..len).map(|_| rng.gen_range(0..4u8)).collect()
}

/// Mean block entropy of `num_sequences` uniform random sequences of length
/// `len` at every point of `sweep`.
///
/// Blocks too short to hold a single complete tuple carry no information and
/// count as zero entropy.
pub fn monte_carlo_profiles(len: usize, num_sequences: usize, sweep: Sweep, seed: u64) -> Result<Vec<ProfilePoint>> {
    if len == 0 || num_sequences == 0 {
        return Err(Error::InvalidSweep("length and sequence count must be positive".into()));
    }
    let params: Vec<usize> = match sweep {
        Sweep::Blocks { tuple_len } => {
            if tuple_len == 0 || tuple_len > MAX_TUPLE_LEN {
                return Err(Error::InvalidSweep(format!("tuple size {tuple_len} out of range")));
            }
            (1..=len).collect()
        }
        Sweep::TupleLen { max_tuple_len } => {
            if max_tuple_len == 0 || max_tuple_len > len.min(MAX_TUPLE_LEN) {
                return Err(Error::InvalidSweep(format!(
                    "tuple sweep bound {max_tuple_len} must lie in 1..={}",
                    len.min(MAX_TUPLE_LEN)
                )));
            }
            (1..=max_tuple_len).collect()
        }
    };

    let per_sequence: Vec<Vec<f64>> = (0..num_sequences as u64)
        .into_par_iter()
        .map(|stream| {
            let tokens = random_sequence(len, seed, stream);
            params
                .iter()
                .map(|&p| match sweep {
                    Sweep::Blocks { tuple_len } => blocked_entropy(&tokens, len / p, p, tuple_len),
                    Sweep::TupleLen { .. } => blocked_entropy(&tokens, len, 1, p),
                })
                .collect()
        })
        .collect();

    Ok(params
        .iter()
        .enumerate()
        .map(|(i, &param)| ProfilePoint {
            param,
            mean_entropy: per_sequence.iter().map(|row| row[i]).sum::<f64>() / num_sequences as f64,
        })
        .collect())
}

fn blocked_entropy(tokens: &[u8], block_len: usize, blocks: usize, tuple_len: usize) -> f64 {
    if block_len < tuple_len {
        return 0.0;
    }
    let sum: f64 = tokens
        .chunks_exact(block_len)
        .take(blocks)
        .map(|b| {
            let fv = tuple_counts(b, tuple_len);
            entropy_of_counts(fv.positive_counts(), fv.total())
        })
        .sum();
    sum / blocks as f64
}

/// `param,mean_entropy` CSV with six decimals.
pub fn profile_csv(points: &[ProfilePoint]) -> String {
    let mut out = String::from("param,mean_entropy\n");
    for p in points {
        writeln!(out, "{},{:.6}", p.param, p.mean_entropy).unwrap();
    }
    out
}
