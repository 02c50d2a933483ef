use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use super::{partition_count, EntropyKey, OrderedPartition, Partitions, WordCounter};
use crate::seqcore::BlockSpec;
use crate::{Error, Result};

/// Counting distribution of (mean) block entropies: how many of the
/// `λ^(cN)` possible sequences of `N` blocks attain each entropy value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyDistribution {
    spec: BlockSpec,
    /// Ascending by entropy; counts are positive.
    entries: Vec<(EntropyKey, BigUint)>,
    /// Running sums of `entries` counts.
    cumulative: Vec<BigUint>,
}

impl EntropyDistribution {
    /// Assembles a distribution from `(key, count)` pairs in any order.
    /// Duplicate keys are summed and zero counts dropped.
    pub fn from_counts(spec: BlockSpec, counts: impl IntoIterator<Item = (EntropyKey, BigUint)>) -> Self {
        let mut merged: HashMap<EntropyKey, BigUint> = HashMap::new();
        for (k, c) in counts {
            *merged.entry(k).or_default() += c;
        }
        let mut entries: Vec<_> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut running = BigUint::zero();
        let cumulative = entries
            .iter()
            .map(|(_, c)| {
                running += c;
                running.clone()
            })
            .collect();
        Self { spec, entries, cumulative }
    }

    pub fn spec(&self) -> BlockSpec {
        self.spec
    }

    /// Tuples per block `c`.
    pub fn tuples_per_block(&self) -> u64 {
        self.spec.tuples_per_block() as u64
    }

    pub fn alphabet_size(&self) -> u128 {
        self.spec.alphabet_size()
    }

    pub fn entries(&self) -> &[(EntropyKey, BigUint)] {
        &self.entries
    }

    /// Cumulative counts aligned with [`entries`](Self::entries).
    pub fn cumulative(&self) -> &[BigUint] {
        &self.cumulative
    }

    pub fn total(&self) -> BigUint {
        self.cumulative.last().cloned().unwrap_or_default()
    }

    /// `λ^(cN)`, the number of sequences the distribution must account for.
    pub fn expected_total(&self) -> BigUint {
        let exponent = self.spec.tuples_per_block() as u32 * self.spec.blocks() as u32;
        BigUint::from(self.spec.alphabet_size()).pow(exponent)
    }

    /// Number of distinct entropy values.
    pub fn distinct_values(&self) -> usize {
        self.entries.len()
    }

    pub fn min_entropy(&self) -> Option<f64> {
        self.entries.first().map(|(k, _)| k.entropy())
    }

    pub fn max_entropy(&self) -> Option<f64> {
        self.entries.last().map(|(k, _)| k.entropy())
    }

    /// Count attached to an exact key.
    pub fn count(&self, key: &EntropyKey) -> BigUint {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(key))
            .map(|i| self.entries[i].1.clone())
            .unwrap_or_default()
    }
}

/// Builds distributions under resource caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistributionBuilder {
    /// Maximum number of ordered partitions to enumerate.
    pub partition_cap: u128,
    /// Maximum number of key pairs visited by one convolution step.
    pub convolution_cap: u128,
}

impl Default for DistributionBuilder {
    fn default() -> Self {
        Self { partition_cap: 10_000_000, convolution_cap: 50_000_000 }
    }
}

impl DistributionBuilder {
    /// Single-block distribution `G_{T,n}` over `c = floor(T/n)` tuples from an
    /// alphabet of `4^n`; the trailing `T mod n` symbols play no part.
    pub fn build(&self, block_len: usize, tuple_len: usize) -> Result<EntropyDistribution> {
        let spec = BlockSpec::single(block_len, tuple_len)?;
        let c = spec.tuples_per_block() as u64;
        let lambda = spec.alphabet_size();
        let max_parts = (c as u128).min(lambda) as usize;

        let required = partition_count(c, max_parts);
        if required > self.partition_cap {
            return Err(Error::ResourceGuard {
                what: "partition enumeration",
                required,
                cap: self.partition_cap,
            });
        }

        let counter = WordCounter::new(c, lambda);
        // Split the enumeration on the largest part so workers own disjoint
        // slices; each folds into its own map and maps are merged at the end.
        let smallest_lead = c.div_ceil(max_parts as u64).max(1);
        let merged = (smallest_lead..=c)
            .into_par_iter()
            .map(|lead| {
                let mut local: HashMap<EntropyKey, BigUint> = HashMap::new();
                for tail in Partitions::bounded(c - lead, max_parts - 1, lead) {
                    let partition = OrderedPartition::from_counts(std::iter::once(lead).chain(tail.parts().iter().copied()));
                    let key = EntropyKey::from_counts(partition.parts().iter().copied());
                    *local.entry(key).or_default() += counter.count(&partition);
                }
                local
            })
            .reduce(HashMap::new, merge_maps);

        Ok(EntropyDistribution::from_counts(spec, merged))
    }

    /// `build` followed by the `N`-fold block-mean convolution.
    pub fn build_spec(&self, spec: BlockSpec) -> Result<EntropyDistribution> {
        let single = self.build(spec.block_len(), spec.tuple_len())?;
        self.convolve_mean(&single, spec.blocks())
    }

    /// Distribution of the mean entropy of `blocks` independent blocks drawn
    /// from a single-block distribution.
    pub fn convolve_mean(&self, dist: &EntropyDistribution, blocks: usize) -> Result<EntropyDistribution> {
        if dist.spec().blocks() != 1 {
            return Err(Error::InvalidBlockSpec(format!(
                "convolution expects a single-block distribution, got {}",
                dist.spec()
            )));
        }
        let spec = dist.spec().with_blocks(blocks)?;
        let mut acc = dist.clone();
        for step in 2..=blocks {
            let required = acc.entries.len() as u128 * dist.entries.len() as u128;
            if required > self.convolution_cap {
                return Err(Error::ResourceGuard {
                    what: "block-mean convolution",
                    required,
                    cap: self.convolution_cap,
                });
            }
            let merged = acc
                .entries
                .par_iter()
                .map(|(ka, ca)| {
                    let mut local: HashMap<EntropyKey, BigUint> = HashMap::new();
                    for (kb, cb) in &dist.entries {
                        *local.entry(ka.combine(kb)).or_default() += ca * cb;
                    }
                    local
                })
                .reduce(HashMap::new, merge_maps);
            acc = EntropyDistribution::from_counts(spec.with_blocks(step)?, merged);
        }
        Ok(EntropyDistribution { spec, ..acc })
    }
}

/// [`DistributionBuilder::convolve_mean`] with default caps.
pub fn convolve_mean(dist: &EntropyDistribution, blocks: usize) -> Result<EntropyDistribution> {
    DistributionBuilder::default().convolve_mean(dist, blocks)
}

fn merge_maps(mut a: HashMap<EntropyKey, BigUint>, b: HashMap<EntropyKey, BigUint>) -> HashMap<EntropyKey, BigUint> {
    if a.len() < b.len() {
        return merge_maps(b, a);
    }
    for (k, c) in b {
        *a.entry(k).or_default() += c;
    }
    a
}
