use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

/// Exact identifier of a (mean) block entropy.
///
/// For counts `p_i` summing to `c`,
///
/// ```text
/// S = log2 c - (1/c) Σ p_i log2 p_i = log2 c - (1/c) log2 W,   W = Π p_i^p_i.
/// ```
///
/// The key stores `W` through its prime factorisation `W = Π q^e_q`. Since the
/// logarithms of distinct primes are linearly independent over the rationals,
/// two count vectors with the same `c` have equal entropy exactly when their
/// exponent vectors agree. The mean over `N` blocks multiplies the `W`s and
/// divides by `cN`, so block means are keyed the same way.
///
/// Within one `(c, N)` the ordering is exact: larger `W` means lower entropy.
#[derive(Clone, Debug)]
pub struct EntropyKey {
    /// `(prime, exponent)`, ascending primes, positive exponents.
    exponents: Vec<(u64, u64)>,
    tuple_total: u64,
    blocks: u64,
    weight: BigUint,
}

impl EntropyKey {
    /// Key of a single block with the given tuple counts.
    pub fn from_counts(counts: impl IntoIterator<Item = u64>) -> Self {
        let mut exps: BTreeMap<u64, u64> = BTreeMap::new();
        let mut total = 0;
        for p in counts.into_iter().filter(|&p| p > 0) {
            total += p;
            for (q, v) in factorize(p) {
                *exps.entry(q).or_default() += v * p;
            }
        }
        Self::from_exponents(exps.into_iter().collect(), total, 1)
    }

    /// Rebuilds a key from an exponent vector. Zero exponents are dropped.
    pub fn from_exponents(mut exponents: Vec<(u64, u64)>, tuple_total: u64, blocks: u64) -> Self {
        exponents.retain(|&(_, e)| e > 0);
        exponents.sort_unstable();
        let mut weight = BigUint::one();
        for &(q, e) in &exponents {
            weight *= BigUint::from(q).pow(e as u32);
        }
        Self { exponents, tuple_total, blocks, weight }
    }

    /// Key of the mean of two independent block groups with equal `c`.
    pub fn combine(&self, other: &Self) -> Self {
        assert_eq!(self.tuple_total, other.tuple_total, "combining keys with different tuple totals");
        let mut exponents = Vec::with_capacity(self.exponents.len().max(other.exponents.len()));
        let (mut a, mut b) = (self.exponents.iter().peekable(), other.exponents.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(qa, ea)), Some(&&(qb, eb))) => match qa.cmp(&qb) {
                    Ordering::Less => {
                        exponents.push((qa, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        exponents.push((qb, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        exponents.push((qa, ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&x), None) => {
                    exponents.push(x);
                    a.next();
                }
                (None, Some(&&x)) => {
                    exponents.push(x);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Self {
            exponents,
            tuple_total: self.tuple_total,
            blocks: self.blocks + other.blocks,
            weight: &self.weight * &other.weight,
        }
    }

    pub fn exponents(&self) -> &[(u64, u64)] {
        &self.exponents
    }

    /// Tuples per block, `c`.
    pub fn tuple_total(&self) -> u64 {
        self.tuple_total
    }

    /// Number of blocks averaged, `N`.
    pub fn blocks(&self) -> u64 {
        self.blocks
    }

    /// `W = Π q^e_q`.
    pub fn weight(&self) -> &BigUint {
        &self.weight
    }

    /// The (mean) entropy in bits as a double.
    ///
    /// Written as `Σ_q (cN·v_q(c) - e_q) / (cN) · log2 q`, which has exact
    /// integer coefficients, so the extremes come out as exactly `0` and
    /// `log2 c` when `c` is a power of two.
    pub fn entropy(&self) -> f64 {
        let scale = (self.tuple_total * self.blocks) as i128;
        if scale == 0 {
            return 0.0;
        }
        let mut coefficients: BTreeMap<u64, i128> = BTreeMap::new();
        for (q, v) in factorize(self.tuple_total) {
            *coefficients.entry(q).or_default() += v as i128 * scale;
        }
        for &(q, e) in &self.exponents {
            *coefficients.entry(q).or_default() -= e as i128;
        }
        let h: f64 = coefficients
            .into_iter()
            .filter(|&(_, k)| k != 0)
            .map(|(q, k)| k as f64 * (q as f64).log2())
            .sum::<f64>()
            / scale as f64;
        h.max(0.0)
    }

    fn same_context(&self, other: &Self) -> bool {
        self.tuple_total == other.tuple_total && self.blocks == other.blocks
    }
}

impl PartialEq for EntropyKey {
    fn eq(&self, other: &Self) -> bool {
        self.same_context(other) && self.exponents == other.exponents
    }
}

impl Eq for EntropyKey {}

impl Hash for EntropyKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.exponents.hash(state);
        self.tuple_total.hash(state);
        self.blocks.hash(state);
    }
}

impl Ord for EntropyKey {
    /// Ascending entropy. Exact within one `(c, N)`; keys from different
    /// contexts fall back to their float entropies.
    fn cmp(&self, other: &Self) -> Ordering {
        if self.same_context(other) {
            return other.weight.cmp(&self.weight);
        }
        self.entropy()
            .total_cmp(&other.entropy())
            .then(self.tuple_total.cmp(&other.tuple_total))
            .then(self.blocks.cmp(&other.blocks))
            .then(other.weight.cmp(&self.weight))
    }
}

impl PartialOrd for EntropyKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical exponent-vector string: `2^3*5^1`, or `1` for the empty vector.
impl fmt::Display for EntropyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return f.write_str("1");
        }
        for (i, (q, e)) in self.exponents.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{q}^{e}")?;
        }
        Ok(())
    }
}

/// Parses the [`Display`](fmt::Display) form back into an exponent vector.
pub(crate) struct ExponentVector(pub Vec<(u64, u64)>);

impl FromStr for ExponentVector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "1" {
            return Ok(Self(Vec::new()));
        }
        let mut out = Vec::new();
        for term in s.split('*') {
            let (q, e) = term.split_once('^').ok_or_else(|| format!("bad exponent term {term:?}"))?;
            let q: u64 = q.parse().map_err(|_| format!("bad prime {q:?}"))?;
            let e: u64 = e.parse().map_err(|_| format!("bad exponent {e:?}"))?;
            if factorize(q) != [(q, 1)] || e == 0 {
                return Err(format!("{term:?} is not a prime power"));
            }
            if out.last().is_some_and(|&(last, _)| last >= q) {
                return Err("primes must be strictly ascending".into());
            }
            out.push((q, e));
        }
        Ok(Self(out))
    }
}

/// Prime factorisation by trial division; counts never get large.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            let mut v = 0;
            while n.is_multiple_of(q) {
                n /= q;
                v += 1;
            }
            out.push((q, v));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
