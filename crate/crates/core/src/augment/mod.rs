//! Fixed-length cropping for sequence augmentation.
//!
//! Every guided crop draws `num_candidates` offsets uniformly from
//! `[-max_offset, max_offset]` around the centred window, clamps each window
//! start into `[0, L - target_len]`, scores the candidates and keeps the best
//! one. Ties go to the lowest candidate index.

mod compress;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use compress::{compress_subchunk, compressed_len, CompressorCache, DEFAULT_CACHE_SIZE};

use crate::entropy::sequence_entropy;
use crate::partition::{calculate_ratio, EntropyDistribution};
use crate::seqcore::{BlockSpec, EncodedSequence, PAD};
use crate::{Error, Result};

/// Which extreme of compressed length the compressor crop keeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Pick {
    #[default]
    Max,
    Min,
}

impl FromStr for Pick {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Pick::Max),
            "min" => Ok(Pick::Min),
            _ => Err(Error::InvalidConfig(format!("pick must be max or min, got {s:?}"))),
        }
    }
}

impl fmt::Display for Pick {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pick::Max => "max",
            Pick::Min => "min",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CropMethod {
    Basic,
    Random,
    Entropy,
    Kolmogorov,
    Ratio,
}

impl CropMethod {
    pub const ALL: [CropMethod; 5] =
        [CropMethod::Basic, CropMethod::Random, CropMethod::Entropy, CropMethod::Kolmogorov, CropMethod::Ratio];
}

impl FromStr for CropMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Self::Basic),
            "random" => Ok(Self::Random),
            "entropy" => Ok(Self::Entropy),
            "kolmogorov" => Ok(Self::Kolmogorov),
            "ratio" => Ok(Self::Ratio),
            _ => Err(Error::InvalidConfig(format!("unknown crop method {s:?}"))),
        }
    }
}

impl fmt::Display for CropMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Basic => "basic",
            Self::Random => "random",
            Self::Entropy => "entropy",
            Self::Kolmogorov => "kolmogorov",
            Self::Ratio => "ratio",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CropConfig {
    pub target_len: usize,
    pub num_candidates: usize,
    /// Fraction of the slack `L - target_len` that offsets may span.
    pub offset_ratio: f64,
    /// Weight of the complexity mismatch.
    pub alpha: f64,
    /// Weight of the normalised offset penalty.
    pub beta: f64,
    pub pick: Pick,
    pub block_len: usize,
    pub tuple_len: usize,
    pub seed: u64,
}

impl Default for CropConfig {
    fn default() -> Self {
        Self {
            target_len: 22,
            num_candidates: 10,
            offset_ratio: 0.5,
            alpha: 1.0,
            beta: 0.1,
            pick: Pick::Max,
            block_len: 22,
            tuple_len: 1,
            seed: 0,
        }
    }
}

impl CropConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.target_len == 0 {
            return bad("target length must be positive".into());
        }
        if self.num_candidates == 0 {
            return bad("need at least one candidate".into());
        }
        if !(0.0..=1.0).contains(&self.offset_ratio) {
            return bad(format!("offset ratio {} outside [0, 1]", self.offset_ratio));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) || !(self.beta >= 0.0 && self.beta.is_finite()) {
            return bad("alpha and beta must be finite and non-negative".into());
        }
        BlockSpec::single(self.block_len, self.tuple_len).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(())
    }

    /// Extra checks for methods that score windows by entropy or ratio.
    pub fn validate_for(&self, method: CropMethod) -> Result<()> {
        self.validate()?;
        match method {
            CropMethod::Entropy if self.target_len < self.tuple_len => Err(Error::InvalidConfig(format!(
                "target length {} cannot hold a {}-tuple",
                self.target_len, self.tuple_len
            ))),
            CropMethod::Ratio if self.target_len < self.block_len => Err(Error::InvalidConfig(format!(
                "target length {} is shorter than block length {}",
                self.target_len, self.block_len
            ))),
            _ => Ok(()),
        }
    }

    /// Single-block spec used for ratio scoring.
    pub fn ratio_spec(&self) -> Result<BlockSpec> {
        BlockSpec::single(self.block_len, self.tuple_len)
    }

    /// RNG for one record: the config seed selects the key, the record index
    /// the stream.
    pub fn rng_for(&self, record: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(record);
        rng
    }
}

/// Right-pads with [`PAD`] up to `target_len`.
pub fn pad_or_sample(tokens: &[u8], target_len: usize) -> Result<EncodedSequence> {
    if tokens.len() > target_len {
        return Err(Error::LongerThanTarget { len: tokens.len(), target: target_len });
    }
    let mut out = tokens.to_vec();
    out.resize(target_len, PAD);
    EncodedSequence::from_tokens(out)
}

fn window(tokens: &[u8], start: usize, target_len: usize) -> EncodedSequence {
    EncodedSequence::from_tokens(tokens[start..start + target_len].to_vec()).expect("tokens already validated")
}

fn padded(tokens: &[u8], target_len: usize) -> EncodedSequence {
    pad_or_sample(tokens, target_len).expect("caller checked the length")
}

/// Centre crop; shorter inputs are padded.
pub fn basic_crop(tokens: &[u8], target_len: usize) -> EncodedSequence {
    if tokens.len() <= target_len {
        return padded(tokens, target_len);
    }
    window(tokens, (tokens.len() - target_len) / 2, target_len)
}

/// A candidate window: the drawn offset and the clamped start.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub offset: i64,
    pub start: usize,
}

/// Centre and largest offset for a sequence longer than the target.
fn geometry(len: usize, target_len: usize, offset_ratio: f64) -> (i64, i64) {
    let slack = len - target_len;
    let center = (slack / 2) as i64;
    let max_offset = (slack as f64 * offset_ratio).floor() as i64;
    (center, max_offset)
}

/// Draws `count` candidate windows for a sequence of length `len > target_len`.
pub fn candidate_windows(len: usize, target_len: usize, offset_ratio: f64, count: usize, rng: &mut impl Rng) -> Vec<Window> {
    assert!(len > target_len, "candidate windows need slack");
    let (center, max_offset) = geometry(len, target_len, offset_ratio);
    let last = (len - target_len) as i64;
    (0..count)
        .map(|_| {
            let offset = rng.gen_range(-max_offset..=max_offset);
            let start = (center + offset).clamp(0, last) as usize;
            Window { offset, start }
        })
        .collect()
}

/// Offset penalty `|offset| / max_offset`, zero when there is no room to move.
fn offset_penalty(offset: i64, max_offset: i64) -> f64 {
    if max_offset > 0 {
        offset.unsigned_abs() as f64 / max_offset as f64
    } else {
        0.0
    }
}

/// First index of the minimum; NaN scores never win.
fn argmin(scores: &[f64]) -> usize {
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for (i, &s) in scores.iter().enumerate() {
        if s < best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

/// One window at a uniformly random offset around the centre.
pub fn random_crop(tokens: &[u8], cfg: &CropConfig, rng: &mut impl Rng) -> EncodedSequence {
    if tokens.len() <= cfg.target_len {
        return padded(tokens, cfg.target_len);
    }
    let w = candidate_windows(tokens.len(), cfg.target_len, cfg.offset_ratio, 1, rng)[0];
    window(tokens, w.start, cfg.target_len)
}

/// Keeps the candidate minimising `α |S_window - full_entropy| + β penalty`,
/// where `S_window` is the `n`-tuple entropy of the whole window.
///
/// Sequences no longer than the target are returned unchanged.
pub fn entropy_crop(tokens: &[u8], cfg: &CropConfig, full_entropy: f64, rng: &mut impl Rng) -> Result<EncodedSequence> {
    cfg.validate_for(CropMethod::Entropy)?;
    if tokens.len() <= cfg.target_len {
        return EncodedSequence::from_tokens(tokens.to_vec());
    }
    let (_, max_offset) = geometry(tokens.len(), cfg.target_len, cfg.offset_ratio);
    let windows = candidate_windows(tokens.len(), cfg.target_len, cfg.offset_ratio, cfg.num_candidates, rng);
    let scores = windows
        .iter()
        .map(|w| {
            let s = sequence_entropy(&tokens[w.start..w.start + cfg.target_len], cfg.tuple_len)?;
            Ok(cfg.alpha * (s - full_entropy).abs() + cfg.beta * offset_penalty(w.offset, max_offset))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(window(tokens, windows[argmin(&scores)].start, cfg.target_len))
}

/// Keeps the candidate whose entropy-rank ratio is closest to `ratio_whole`,
/// with the same offset penalty as [`entropy_crop`]. `dist` must be the
/// single-block distribution for `(cfg.block_len, cfg.tuple_len)`.
pub fn ratio_crop(
    tokens: &[u8],
    cfg: &CropConfig,
    ratio_whole: f64,
    dist: &EntropyDistribution,
    rng: &mut impl Rng,
) -> Result<EncodedSequence> {
    cfg.validate_for(CropMethod::Ratio)?;
    let spec = cfg.ratio_spec()?;
    if dist.spec() != spec {
        return Err(Error::ContextMismatch { expected: spec.to_string(), found: dist.spec().to_string() });
    }
    if tokens.len() <= cfg.target_len {
        return pad_or_sample(tokens, cfg.target_len);
    }
    let (_, max_offset) = geometry(tokens.len(), cfg.target_len, cfg.offset_ratio);
    let windows = candidate_windows(tokens.len(), cfg.target_len, cfg.offset_ratio, cfg.num_candidates, rng);
    let scores = windows
        .iter()
        .map(|w| {
            let r = calculate_ratio(&tokens[w.start..w.start + cfg.target_len], dist)?.to_f64();
            Ok(cfg.alpha * (r - ratio_whole).abs() + cfg.beta * offset_penalty(w.offset, max_offset))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(window(tokens, windows[argmin(&scores)].start, cfg.target_len))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecutionMode {
    #[default]
    Sequential,
    /// Candidates are compressed on the rayon pool. Selection still walks the
    /// candidates in draw order, so the result matches sequential mode.
    Parallel,
}

/// Keeps the candidate with the largest (or smallest) compressed length.
///
/// Sequences no longer than the target are returned unchanged.
pub fn kolmogorov_crop(
    tokens: &[u8],
    cfg: &CropConfig,
    cache: &CompressorCache,
    mode: ExecutionMode,
    rng: &mut impl Rng,
) -> EncodedSequence {
    if tokens.len() <= cfg.target_len {
        return EncodedSequence::from_tokens(tokens.to_vec()).expect("tokens already validated");
    }
    let windows = candidate_windows(tokens.len(), cfg.target_len, cfg.offset_ratio, cfg.num_candidates, rng);
    let chunk = |w: &Window| &tokens[w.start..w.start + cfg.target_len];
    let lengths: Vec<usize> = match mode {
        ExecutionMode::Sequential => windows.iter().map(|w| compress_subchunk(chunk(w), cache)).collect(),
        ExecutionMode::Parallel => windows.par_iter().map(|w| compress_subchunk(chunk(w), cache)).collect(),
    };
    let mut best = 0;
    for (i, &len) in lengths.iter().enumerate().skip(1) {
        let better = match cfg.pick {
            Pick::Max => len > lengths[best],
            Pick::Min => len < lengths[best],
        };
        if better {
            best = i;
        }
    }
    window(tokens, windows[best].start, cfg.target_len)
}

/// Applies one crop method per record and always returns exactly
/// `target_len` tokens, padding where the underlying crop passes short input
/// through.
pub struct Cropper<'a> {
    method: CropMethod,
    cfg: CropConfig,
    cache: &'a CompressorCache,
    dist: Option<&'a EntropyDistribution>,
    mode: ExecutionMode,
}

impl<'a> Cropper<'a> {
    /// `dist` is required for [`CropMethod::Ratio`].
    pub fn new(
        method: CropMethod,
        cfg: CropConfig,
        cache: &'a CompressorCache,
        dist: Option<&'a EntropyDistribution>,
    ) -> Result<Self> {
        cfg.validate_for(method)?;
        if method == CropMethod::Ratio {
            let dist = dist.ok_or_else(|| Error::InvalidConfig("ratio crop needs a distribution".into()))?;
            if dist.spec() != cfg.ratio_spec()? {
                return Err(Error::ContextMismatch {
                    expected: cfg.ratio_spec()?.to_string(),
                    found: dist.spec().to_string(),
                });
            }
        }
        Ok(Self { method, cfg, cache, dist, mode: ExecutionMode::Sequential })
    }

    pub fn with_mode(mut self, mode: ExecutionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn method(&self) -> CropMethod {
        self.method
    }

    pub fn config(&self) -> &CropConfig {
        &self.cfg
    }

    /// Crops the `record`-th sequence of a dataset; the index selects the RNG
    /// stream so results do not depend on processing order.
    pub fn crop(&self, tokens: &[u8], record: u64) -> Result<EncodedSequence> {
        let cfg = &self.cfg;
        let mut rng = cfg.rng_for(record);
        let out = match self.method {
            CropMethod::Basic => basic_crop(tokens, cfg.target_len),
            CropMethod::Random => random_crop(tokens, cfg, &mut rng),
            CropMethod::Entropy => {
                if tokens.len() <= cfg.target_len {
                    return pad_or_sample(tokens, cfg.target_len);
                }
                let full = sequence_entropy(tokens, cfg.tuple_len)?;
                entropy_crop(tokens, cfg, full, &mut rng)?
            }
            CropMethod::Kolmogorov => kolmogorov_crop(tokens, cfg, self.cache, self.mode, &mut rng),
            CropMethod::Ratio => {
                if tokens.len() <= cfg.target_len {
                    return pad_or_sample(tokens, cfg.target_len);
                }
                let dist = self.dist.expect("checked in new");
                let whole = calculate_ratio(tokens, dist)?.to_f64();
                ratio_crop(tokens, cfg, whole, dist, &mut rng)?
            }
        };
        if out.len() < cfg.target_len {
            return pad_or_sample(&out, cfg.target_len);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::random_sequence;
    use crate::partition::DistributionBuilder;

    fn cfg(target_len: usize) -> CropConfig {
        CropConfig { target_len, ..CropConfig::default() }
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn padding() {
        let tokens = random_sequence(22, 0, 0);
        assert_eq!(pad_or_sample(&tokens, 22).unwrap().tokens(), &tokens[..]);
        assert_eq!(pad_or_sample(&[0, 1], 4).unwrap().tokens(), &[0, 1, 4, 4]);
        assert_eq!(pad_or_sample(&[], 2).unwrap().tokens(), &[4, 4]);
        assert!(pad_or_sample(&[0, 1, 2], 2).is_err());
    }

    #[test]
    fn centre_crop() {
        let tokens: Vec<u8> = (0..24).map(|i| (i % 4) as u8).collect();
        assert_eq!(basic_crop(&tokens[..22], 22).tokens(), &tokens[..22]);
        assert_eq!(basic_crop(&tokens, 22).tokens(), &tokens[1..23]);
        assert_eq!(basic_crop(&tokens[..3], 5).tokens(), &[0, 1, 2, 4, 4]);
    }

    #[test]
    fn zero_offset_ratio_is_centre_crop() {
        let tokens = random_sequence(40, 5, 0);
        let c = CropConfig { offset_ratio: 0.0, ..cfg(22) };
        for seed in 0..20 {
            assert_eq!(random_crop(&tokens, &c, &mut rng(seed)), basic_crop(&tokens, 22));
        }
    }

    #[test]
    fn random_starts_cover_full_range() {
        let tokens = random_sequence(30, 9, 0);
        let c = CropConfig { offset_ratio: 1.0, ..cfg(22) };
        let mut seen = [false; 9];
        for seed in 0..500 {
            let out = random_crop(&tokens, &c, &mut rng(seed));
            let start = (0..=8).find(|&s| tokens[s..s + 22] == *out.tokens()).unwrap();
            seen[start] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn single_candidate_entropy_crop_matches_random_crop() {
        let tokens = random_sequence(100, 2, 0);
        let c = CropConfig { num_candidates: 1, offset_ratio: 1.0, ..cfg(30) };
        for seed in 0..20 {
            let a = entropy_crop(&tokens, &c, 1.9, &mut rng(seed)).unwrap();
            assert_eq!(a, random_crop(&tokens, &c, &mut rng(seed)));
        }
    }

    #[test]
    fn offset_only_score_prefers_centre() {
        let tokens = random_sequence(100, 4, 0);
        let c = CropConfig { alpha: 0.0, beta: 1.0, num_candidates: 8, offset_ratio: 1.0, ..cfg(30) };
        for seed in 0..20 {
            let windows = candidate_windows(100, 30, 1.0, 8, &mut rng(seed));
            let best = windows.iter().min_by_key(|w| w.offset.unsigned_abs()).unwrap();
            let out = entropy_crop(&tokens, &c, 0.0, &mut rng(seed)).unwrap();
            assert_eq!(out.tokens(), &tokens[best.start..best.start + 30]);
        }
    }

    #[test]
    fn homogeneous_sequence_takes_first_candidate() {
        let tokens = vec![0u8; 80];
        let c = CropConfig { beta: 0.0, offset_ratio: 1.0, ..cfg(30) };
        let out = entropy_crop(&tokens, &c, 0.0, &mut rng(3)).unwrap();
        assert_eq!(out.tokens(), &tokens[..30]);
        // All-zero scores on a varied sequence also fall back to the first draw.
        let varied: Vec<u8> = (0..80).map(|i| (i / 20) as u8).collect();
        let first = candidate_windows(80, 30, 1.0, c.num_candidates, &mut rng(3))[0];
        let out = entropy_crop(&varied, &CropConfig { alpha: 0.0, ..c }, 0.0, &mut rng(3)).unwrap();
        assert_eq!(out.tokens(), &varied[first.start..first.start + 30]);
    }

    #[test]
    fn short_input_paths() {
        let tokens = random_sequence(10, 0, 0);
        let c = cfg(22);
        let cache = CompressorCache::default();
        assert_eq!(entropy_crop(&tokens, &c, 1.0, &mut rng(0)).unwrap().tokens(), &tokens[..]);
        assert_eq!(kolmogorov_crop(&tokens, &c, &cache, ExecutionMode::Sequential, &mut rng(0)).tokens(), &tokens[..]);
        assert_eq!(random_crop(&tokens, &c, &mut rng(0)).len(), 22);
        let dist = DistributionBuilder::default().build(22, 1).unwrap();
        assert_eq!(ratio_crop(&tokens, &c, 0.5, &dist, &mut rng(0)).unwrap().len(), 22);
    }

    #[test]
    fn ratio_crop_single_candidate() {
        let tokens = random_sequence(60, 8, 0);
        let c = CropConfig { num_candidates: 1, offset_ratio: 1.0, ..cfg(22) };
        let dist = DistributionBuilder::default().build(22, 1).unwrap();
        for seed in 0..10 {
            let out = ratio_crop(&tokens, &c, 0.3, &dist, &mut rng(seed)).unwrap();
            assert_eq!(out, random_crop(&tokens, &c, &mut rng(seed)));
        }
        let wrong = DistributionBuilder::default().build(20, 1).unwrap();
        assert!(ratio_crop(&tokens, &c, 0.3, &wrong, &mut rng(0)).is_err());
        let short_target = CropConfig { target_len: 10, ..c };
        assert!(matches!(
            ratio_crop(&tokens, &short_target, 0.3, &dist, &mut rng(0)),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn compressor_crop_prefers_random_half() {
        let mut tokens = vec![0u8; 200];
        tokens.extend(random_sequence(200, 17, 0));
        let cache = CompressorCache::default();
        let c = CropConfig { offset_ratio: 1.0, num_candidates: 16, ..cfg(100) };
        for seed in 0..10 {
            let out = kolmogorov_crop(&tokens, &c, &cache, ExecutionMode::Sequential, &mut rng(seed));
            let start = (0..=300).find(|&s| tokens[s..s + 100] == *out.tokens()).unwrap();
            let windows = candidate_windows(400, 100, 1.0, 16, &mut rng(seed));
            let best_len = windows.iter().map(|w| compressed_len(&tokens[w.start..w.start + 100])).max().unwrap();
            assert_eq!(compressed_len(out.tokens()), best_len);
            if windows.iter().any(|w| w.start >= 180) {
                assert!(start > 150, "window at {start} sits mostly in the flat half");
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let tokens = random_sequence(500, 21, 0);
        let cache = CompressorCache::default();
        for pick in [Pick::Max, Pick::Min] {
            let c = CropConfig { pick, offset_ratio: 1.0, num_candidates: 32, ..cfg(60) };
            for seed in 0..10 {
                let a = kolmogorov_crop(&tokens, &c, &cache, ExecutionMode::Sequential, &mut rng(seed));
                let b = kolmogorov_crop(&tokens, &c, &cache, ExecutionMode::Parallel, &mut rng(seed));
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(CropConfig { offset_ratio: 1.5, ..cfg(22) }.validate().is_err());
        assert!(CropConfig { num_candidates: 0, ..cfg(22) }.validate().is_err());
        assert!(CropConfig { alpha: -1.0, ..cfg(22) }.validate().is_err());
        assert!(CropConfig { target_len: 0, ..cfg(22) }.validate().is_err());
        assert!(cfg(10).validate_for(CropMethod::Ratio).is_err());
        assert!(cfg(10).validate_for(CropMethod::Entropy).is_ok());
        assert_eq!("ratio".parse::<CropMethod>().unwrap(), CropMethod::Ratio);
        assert!("other".parse::<CropMethod>().is_err());
        assert_eq!("min".parse::<Pick>().unwrap(), Pick::Min);
    }

    #[test]
    fn cropper_always_returns_target_length() {
        let cache = CompressorCache::default();
        let dist = DistributionBuilder::default().build(22, 1).unwrap();
        let c = cfg(22);
        for method in CropMethod::ALL {
            let cropper = Cropper::new(method, c, &cache, Some(&dist)).unwrap();
            for len in [0, 5, 22, 23, 100] {
                let tokens = random_sequence(len, 1, len as u64);
                assert_eq!(cropper.crop(&tokens, 0).unwrap().len(), 22, "{method} len={len}");
            }
        }
        assert!(Cropper::new(CropMethod::Ratio, c, &cache, None).is_err());
    }
}
