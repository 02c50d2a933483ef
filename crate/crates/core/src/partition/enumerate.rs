use std::fmt;

/// Positive parts in non-increasing order. Zero parts are implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedPartition {
    parts: Vec<u64>,
}

impl OrderedPartition {
    /// Builds a partition from arbitrary counts: zeros are dropped and the
    /// rest sorted non-increasingly.
    pub fn from_counts(counts: impl IntoIterator<Item = u64>) -> Self {
        let mut parts: Vec<u64> = counts.into_iter().filter(|&p| p > 0).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// Number of positive parts `k`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `c = Σ p_i`.
    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// Partitions of `total` into at most `max_parts` positive parts, each at most
/// `max_part`, in lexicographically decreasing order.
#[derive(Clone, Debug)]
pub struct Partitions {
    total: u64,
    max_parts: usize,
    max_part: u64,
    parts: Vec<u64>,
    started: bool,
    done: bool,
}

impl Partitions {
    pub fn new(total: u64, max_parts: usize) -> Self {
        Self::bounded(total, max_parts, total)
    }

    /// Restricts the largest part to `max_part`.
    pub fn bounded(total: u64, max_parts: usize, max_part: u64) -> Self {
        let feasible = total == 0 || (max_part as u128) * (max_parts as u128) >= total as u128;
        Self {
            total,
            max_parts,
            max_part,
            parts: Vec::new(),
            started: false,
            done: !feasible,
        }
    }

    fn advance(&mut self) -> bool {
        let mut suffix = 0u64;
        for i in (0..self.parts.len()).rev() {
            suffix += self.parts[i];
            let v = self.parts[i] - 1;
            if v == 0 {
                continue;
            }
            let remaining = suffix - v;
            let slots = (self.max_parts - i - 1) as u128;
            if remaining as u128 <= v as u128 * slots {
                self.parts.truncate(i);
                self.parts.push(v);
                fill_greedy(&mut self.parts, remaining, v);
                return true;
            }
        }
        false
    }
}

fn fill_greedy(parts: &mut Vec<u64>, mut remaining: u64, cap: u64) {
    while remaining > 0 {
        let v = remaining.min(cap);
        parts.push(v);
        remaining -= v;
    }
}

impl Iterator for Partitions {
    type Item = OrderedPartition;

    fn next(&mut self) -> Option<OrderedPartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            fill_greedy(&mut self.parts, self.total, self.max_part);
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        if self.total == 0 {
            // The empty partition is the only one.
            self.done = true;
        }
        Some(OrderedPartition { parts: self.parts.clone() })
    }
}

/// Number of partitions of `total` into at most `max_parts` parts, saturating
/// at `u128::MAX`.
pub fn partition_count(total: u64, max_parts: usize) -> u128 {
    let c = total as usize;
    let mut ways = vec![0u128; c + 1];
    ways[0] = 1;
    // Conjugation: at most k parts <=> every part at most k.
    for part in 1..=max_parts.min(c) {
        for s in part..=c {
            ways[s] = ways[s].saturating_add(ways[s - part]);
        }
    }
    ways[c]
}
