use num_bigint::BigUint;
use num_traits::One;

use super::OrderedPartition;

/// Number of length-`c` words over an alphabet of `λ` symbols whose sorted
/// frequency vector is `P`:
///
/// ```text
/// O(P) = λ! / ((λ - k)! γ) · c! / Π p_i!
/// ```
///
/// where `k` is the number of positive parts and `γ` the product of the
/// factorials of the multiplicities of distinct part values.
pub fn count_words(partition: &OrderedPartition, alphabet_size: u128) -> BigUint {
    WordCounter::new(partition.total(), alphabet_size).count(partition)
}

/// [`count_words`] with factorial tables shared across many partitions of
/// the same total.
#[derive(Clone, Debug)]
pub struct WordCounter {
    total: u64,
    alphabet_size: u128,
    factorials: Vec<BigUint>,
    /// `falling[k] = λ (λ-1) … (λ-k+1)`.
    falling: Vec<BigUint>,
}

impl WordCounter {
    pub fn new(total: u64, alphabet_size: u128) -> Self {
        let c = total as usize;
        let mut factorials = Vec::with_capacity(c + 1);
        factorials.push(BigUint::one());
        for i in 1..=c {
            let next = &factorials[i - 1] * BigUint::from(i);
            factorials.push(next);
        }
        let max_k = (c as u128).min(alphabet_size) as usize;
        let mut falling = Vec::with_capacity(max_k + 1);
        falling.push(BigUint::one());
        for k in 1..=max_k {
            let next = &falling[k - 1] * BigUint::from(alphabet_size - (k as u128 - 1));
            falling.push(next);
        }
        Self { total, alphabet_size, factorials, falling }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn alphabet_size(&self) -> u128 {
        self.alphabet_size
    }

    /// `O(P)`; zero when `P` does not fit (wrong total or more than `λ` parts).
    pub fn count(&self, partition: &OrderedPartition) -> BigUint {
        let parts = partition.parts();
        if partition.total() != self.total || parts.len() as u128 > self.alphabet_size {
            return BigUint::default();
        }
        let mut denominator = BigUint::one();
        for &p in parts {
            denominator *= &self.factorials[p as usize];
        }
        // Parts are sorted, so equal values are adjacent.
        for run in parts.chunk_by(|a, b| a == b) {
            denominator *= &self.factorials[run.len()];
        }
        &self.falling[parts.len()] * &self.factorials[self.total as usize] / denominator
    }
}
