//! Exact entropy distributions over all blocks of a given shape.
//!
//! A block of `c` tuples over an alphabet of `λ = 4^n` tuple identities has
//! `λ^c` realisations. Sorting a block's tuple counts gives an ordered
//! partition `P` of `c`; every realisation with the same partition has the
//! same entropy, and there are exactly [`count_words`] of them. Grouping the
//! partitions by an exact entropy key yields the counting distribution from
//! which the entropy-rank ratio `R` is read as a right-continuous CDF.

mod count;
mod distribution;
mod enumerate;
mod key;
mod ratio;
mod store;

pub use count::{count_words, WordCounter};
pub use distribution::{convolve_mean, DistributionBuilder, EntropyDistribution};
pub use enumerate::{partition_count, OrderedPartition, Partitions};
pub use key::EntropyKey;
pub use ratio::{
    calculate_ratio, calibration_check, rank_ratio, rank_ratio_key, sequence_key, CalibrationPoint, RankRatio,
};
pub use store::{read_distribution, write_distribution, DistributionSource, DistributionStore};
