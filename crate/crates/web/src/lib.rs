//! WebAssembly bindings for the static page in `www/`. Every export returns a
//! JSON string. The `*_json` functions hold the logic and run natively too.

use std::cell::RefCell;

use entrank_core::entropy::{mean_block_entropy, monte_carlo_profiles, Sweep};
use entrank_core::partition::{calculate_ratio, DistributionBuilder, DistributionStore, RankRatio};
use entrank_core::seqcore::gc_content;
use entrank_core::{BlockSpec, EncodedSequence};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Tighter than the library default so a click never stalls the tab.
const PARTITION_CAP: u128 = 2_000_000;
const CONVOLUTION_CAP: u128 = 5_000_000;

thread_local! {
    static STORE: RefCell<DistributionStore> = RefCell::new(DistributionStore::in_memory(DistributionBuilder {
        partition_cap: PARTITION_CAP,
        convolution_cap: CONVOLUTION_CAP,
    }));
}

fn store_get(spec: BlockSpec) -> Result<std::sync::Arc<entrank_core::partition::EntropyDistribution>, String> {
    STORE.with(|s| s.borrow().get(spec)).map_err(|e| e.to_string())
}

/// Histogram and CDF of the single-block entropy distribution for `(T, n)`.
pub fn histogram_json(block_len: usize, tuple_len: usize) -> Result<String, String> {
    let spec = BlockSpec::single(block_len, tuple_len).map_err(|e| e.to_string())?;
    let dist = store_get(spec)?;
    let total = dist.total();
    let entries: Vec<_> = dist
        .entries()
        .iter()
        .zip(dist.cumulative())
        .map(|((key, count), cumulative)| {
            json!({
                "entropy": key.entropy(),
                "count": count.to_string(),
                "probability": RankRatio::new(count.clone(), total.clone()).to_f64(),
                "cdf": RankRatio::new(cumulative.clone(), total.clone()).to_f64(),
            })
        })
        .collect();
    Ok(json!({
        "T": block_len,
        "n": tuple_len,
        "c": dist.tuples_per_block(),
        "lambda": dist.alphabet_size().to_string(),
        "total": total.to_string(),
        "distinct": dist.distinct_values(),
        "entries": entries,
    })
    .to_string())
}

/// Mean entropy, exact rank ratio and GC content of the first `N` blocks of
/// a pasted sequence. Whitespace is ignored.
pub fn ratio_json(sequence: &str, block_len: usize, tuple_len: usize, blocks: usize) -> Result<String, String> {
    let cleaned: String = sequence.chars().filter(|c| !c.is_whitespace()).collect();
    let tokens = EncodedSequence::encode(&cleaned).map_err(|e| e.to_string())?;
    let spec = BlockSpec::new(block_len, tuple_len, blocks).map_err(|e| e.to_string())?;
    let dist = store_get(spec)?;
    let ratio = calculate_ratio(&tokens, &dist).map_err(|e| e.to_string())?;
    let entropy = mean_block_entropy(&tokens, spec).map_err(|e| e.to_string())?;
    Ok(json!({
        "length": tokens.len(),
        "entropy": entropy.bits,
        "ratio": ratio.to_f64(),
        "ratio_exact": ratio.to_string(),
        "gc": gc_content(&tokens).map_err(|e| e.to_string())?,
    })
    .to_string())
}

/// Monte-Carlo profile over `n` (`sweep = "n"`) or over the block count
/// (`sweep = "N"`, tuples of `tuple_len`).
pub fn profile_json(
    len: usize,
    num_sequences: usize,
    sweep: &str,
    tuple_len: usize,
    max_tuple_len: usize,
    seed: u32,
) -> Result<String, String> {
    let sweep = match sweep {
        "n" => Sweep::TupleLen { max_tuple_len },
        "N" => Sweep::Blocks { tuple_len },
        other => return Err(format!("unknown sweep {other:?}")),
    };
    let points = monte_carlo_profiles(len, num_sequences, sweep, seed.into()).map_err(|e| e.to_string())?;
    let points: Vec<_> = points.iter().map(|p| json!({ "param": p.param, "mean_entropy": p.mean_entropy })).collect();
    Ok(json!({ "points": points }).to_string())
}

#[wasm_bindgen]
pub fn distribution(block_len: usize, tuple_len: usize) -> Result<String, JsError> {
    histogram_json(block_len, tuple_len).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn ratio(sequence: &str, block_len: usize, tuple_len: usize, blocks: usize) -> Result<String, JsError> {
    ratio_json(sequence, block_len, tuple_len, blocks).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn profile(
    len: usize,
    num_sequences: usize,
    sweep: &str,
    tuple_len: usize,
    max_tuple_len: usize,
    seed: u32,
) -> Result<String, JsError> {
    profile_json(len, num_sequences, sweep, tuple_len, max_tuple_len, seed).map_err(|e| JsError::new(&e))
}
