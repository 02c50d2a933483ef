use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{EntropyDistribution, EntropyKey};
use crate::entropy::EntropyValue;
use crate::seqcore::{tuple_counts, BlockSpec};
use crate::{Error, Result};

/// Observed entropies within this distance of a support point count as equal.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

/// An exact fraction of the distribution's mass, kept in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankRatio {
    numerator: BigUint,
    denominator: BigUint,
}

impl RankRatio {
    pub fn new(numerator: BigUint, denominator: BigUint) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        let g = numerator.gcd(&denominator);
        if g.is_zero() || g.is_one() {
            return Self { numerator, denominator };
        }
        Self { numerator: numerator / &g, denominator: denominator / g }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn to_f64(&self) -> f64 {
        // Drop low bits so both sides fit in a double's exponent range.
        let excess = self.denominator.bits().saturating_sub(1000);
        let num = (&self.numerator >> excess).to_f64().unwrap_or(f64::INFINITY);
        let den = (&self.denominator >> excess).to_f64().unwrap_or(f64::INFINITY);
        num / den
    }

    /// Exact `self <= t` for a finite double `t`.
    pub fn le_f64(&self, t: f64) -> bool {
        if t.is_nan() || t < 0.0 {
            return false;
        }
        let (t_num, t_den) = dyadic(t);
        &self.numerator * t_den <= t_num * &self.denominator
    }
}

impl fmt::Display for RankRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Non-negative double as an exact fraction `num / 2^k`.
fn dyadic(t: f64) -> (BigUint, BigUint) {
    if t == 0.0 {
        return (BigUint::zero(), BigUint::one());
    }
    let bits = t.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let fraction = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exponent == 0 {
        (fraction, -1074)
    } else {
        (fraction | (1u64 << 52), exponent - 1075)
    };
    if exp >= 0 {
        (BigUint::from(mantissa) << exp as usize, BigUint::one())
    } else {
        (BigUint::from(mantissa), BigUint::one() << (-exp) as usize)
    }
}

fn check_context(dist: &EntropyDistribution, found: BlockSpec) -> Result<()> {
    if dist.spec() != found {
        return Err(Error::ContextMismatch {
            expected: dist.spec().to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

/// Fraction of the distribution's mass at entropies `<=` an observed value.
///
/// Support points within [`ENTROPY_TOLERANCE`] of the observation count as
/// equal to it.
pub fn rank_ratio(observed: EntropyValue, dist: &EntropyDistribution) -> Result<RankRatio> {
    check_context(dist, observed.spec)?;
    let threshold = observed.bits + ENTROPY_TOLERANCE;
    let below = dist.entries().partition_point(|(k, _)| k.entropy() <= threshold);
    Ok(mass_up_to(dist, below))
}

/// Exact variant of [`rank_ratio`] for a key computed from the block counts.
pub fn rank_ratio_key(key: &EntropyKey, dist: &EntropyDistribution) -> Result<RankRatio> {
    let c = dist.tuples_per_block();
    if key.tuple_total() != c || key.blocks() != dist.spec().blocks() as u64 {
        return Err(Error::ContextMismatch {
            expected: dist.spec().to_string(),
            found: format!("c={} N={}", key.tuple_total(), key.blocks()),
        });
    }
    let below = dist.entries().partition_point(|(k, _)| k <= key);
    Ok(mass_up_to(dist, below))
}

fn mass_up_to(dist: &EntropyDistribution, entries: usize) -> RankRatio {
    let numerator = match entries {
        0 => BigUint::zero(),
        i => dist.cumulative()[i - 1].clone(),
    };
    RankRatio::new(numerator, dist.total())
}

/// Exact entropy key of the first `spec.blocks()` blocks of a sequence.
///
/// Blocks must be free of padding inside their counted tuples.
pub fn sequence_key(tokens: &[u8], spec: BlockSpec) -> Result<EntropyKey> {
    let t = spec.block_len();
    if tokens.len() / t < spec.blocks() {
        return Err(Error::SequenceTooShort { len: tokens.len(), block_len: t, needed: spec.blocks() });
    }
    let c = spec.tuples_per_block() as u64;
    let mut keys = tokens.chunks_exact(t).take(spec.blocks()).enumerate().map(|(block, b)| {
        let fv = tuple_counts(b, spec.tuple_len());
        if fv.total() != c {
            return Err(Error::PaddedBlock { block });
        }
        Ok(EntropyKey::from_counts(fv.positive_counts()))
    });
    let first = keys.next().expect("at least one block")?;
    keys.try_fold(first, |acc, k| Ok(acc.combine(&k?)))
}

/// Entropy-rank ratio of a sequence: the mean entropy of its first `N`
/// blocks, located exactly within the matching distribution.
pub fn calculate_ratio(tokens: &[u8], dist: &EntropyDistribution) -> Result<RankRatio> {
    rank_ratio_key(&sequence_key(tokens, dist.spec())?, dist)
}

/// `ℙ(R <= t)` when `R` is the CDF evaluated at an entropy drawn from the
/// distribution itself.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationPoint {
    pub threshold: f64,
    pub probability: RankRatio,
    /// Whether `probability <= threshold` holds exactly.
    pub calibrated: bool,
}

/// Evaluates `ℙ(R <= t)` exactly for every threshold.
pub fn calibration_check(dist: &EntropyDistribution, thresholds: &[f64]) -> Vec<CalibrationPoint> {
    let total = dist.total();
    let cdf: Vec<RankRatio> = dist.cumulative().iter().map(|c| RankRatio::new(c.clone(), total.clone())).collect();
    thresholds
        .iter()
        .map(|&t| {
            // F is increasing, so the qualifying keys form a prefix.
            let prefix = cdf.partition_point(|f| f.le_f64(t));
            let probability = mass_up_to(dist, prefix);
            let calibrated = probability.le_f64(t);
            CalibrationPoint { threshold: t, probability, calibrated }
        })
        .collect()
}
