//! The work behind each subcommand, independent of argument parsing.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use entrank_core::augment::{compressed_len, CompressorCache, CropConfig, CropMethod, Cropper, ExecutionMode};
use entrank_core::entropy::{mean_entropy_all_blocks, sequence_entropy, ProfilePoint};
use entrank_core::partition::{calculate_ratio, DistributionSource, DistributionStore, EntropyDistribution};
use entrank_core::seqcore::gc_content;
use entrank_core::{BlockSpec, EncodedSequence};
use rayon::prelude::*;
use serde_json::json;

use crate::dataset::{Dataset, Record};
use crate::{CliError, Result};

/// Six fixed decimals, or the shortest round-trip form.
pub fn format_float(x: f64, full_precision: bool) -> String {
    if full_precision {
        format!("{x}")
    } else {
        format!("{x:.6}")
    }
}

/// Fetches a distribution, refusing to build one when `allow_build` is off
/// and no cached copy exists.
pub fn distribution(store: &DistributionStore, spec: BlockSpec, allow_build: bool) -> Result<Arc<EntropyDistribution>> {
    if !allow_build && !store.path_for(spec).is_some_and(|p| p.exists()) {
        return Err(CliError::Validation(format!("no cached distribution for {spec} and building is disabled")));
    }
    Ok(store.get(spec)?)
}

pub struct BuildReport {
    pub dist: Arc<EntropyDistribution>,
    pub source: DistributionSource,
    pub path: Option<PathBuf>,
}

pub fn build_dist(store: &DistributionStore, spec: BlockSpec) -> Result<BuildReport> {
    let (dist, source) = store.get_traced(spec)?;
    Ok(BuildReport { dist, source, path: store.path_for(spec) })
}

impl fmt::Display for BuildReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.dist;
        writeln!(f, "spec {}", d.spec())?;
        writeln!(f, "lambda {}", d.alphabet_size())?;
        writeln!(f, "tuples_per_block {}", d.tuples_per_block())?;
        writeln!(f, "distinct_entropies {}", d.distinct_values())?;
        writeln!(f, "total {}", d.total())?;
        writeln!(f, "min_entropy {:.6}", d.min_entropy().unwrap_or(f64::NAN))?;
        writeln!(f, "max_entropy {:.6}", d.max_entropy().unwrap_or(f64::NAN))?;
        writeln!(f, "source {}", format!("{:?}", self.source).to_lowercase())?;
        match &self.path {
            Some(p) => writeln!(f, "cache {}", p.display()),
            None => writeln!(f, "cache none"),
        }
    }
}

/// A record left out of a per-record export.
#[derive(Clone, Debug, PartialEq)]
pub struct Skipped {
    pub id: String,
    pub line: u64,
    pub reason: String,
}

impl fmt::Display for Skipped {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "skipped record {} (line {}): {}", self.id, self.line, self.reason)
    }
}

/// Errors that make a single record unusable without invalidating the run.
fn skippable(e: &entrank_core::Error) -> bool {
    use entrank_core::Error as E;
    matches!(e, E::SequenceTooShort { .. } | E::PaddedBlock { .. } | E::EmptyFrequencyVector | E::NoNucleotides)
}

/// Evaluates `f` on every record in parallel, keeping input order. Records
/// failing with a skippable error are reported instead of aborting.
fn per_record<T: Send>(
    dataset: &Dataset,
    f: impl Fn(&Record) -> entrank_core::Result<T> + Sync,
) -> Result<(Vec<T>, Vec<Skipped>)> {
    let results: Vec<_> = dataset.records.par_iter().map(&f).collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (record, result) in dataset.records.iter().zip(results) {
        match result {
            Ok(row) => rows.push(row),
            Err(e) if skippable(&e) => {
                skipped.push(Skipped { id: record.id.clone(), line: record.line, reason: e.to_string() })
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok((rows, skipped))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub id: String,
    pub label: u64,
    /// Mean entropy over all full blocks.
    pub entropy: f64,
    /// Rank ratio of the first `N` blocks.
    pub ratio: f64,
    pub gc: f64,
}

/// The ratio uses the distribution's `(T, n, N)`; the entropy column always
/// averages every full block.
pub fn ratio_rows(dataset: &Dataset, dist: &EntropyDistribution) -> Result<(Vec<RatioRow>, Vec<Skipped>)> {
    let spec = dist.spec();
    per_record(dataset, |r| {
        let tokens = r.sequence.tokens();
        let ratio = calculate_ratio(tokens, dist)?.to_f64();
        let entropy = mean_entropy_all_blocks(tokens, spec.block_len(), spec.tuple_len())?.bits;
        Ok(RatioRow { id: r.id.clone(), label: r.label, entropy, ratio, gc: gc_content(tokens)? })
    })
}

pub fn write_ratio_csv(rows: &[RatioRow], full_precision: bool, out: impl Write) -> Result<()> {
    let f = |x| format_float(x, full_precision);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "label", "S", "R", "GC"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([r.id.clone(), r.label.to_string(), f(r.entropy), f(r.ratio), f(r.gc)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Compressed length of the whole sequence per symbol.
    Kolmogorov,
    /// Whole-sequence entropy at the configured tuple size.
    Entropy,
    /// Rank ratio at `(T, n, N)`.
    Ratio,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "kolmogorov" => Ok(Self::Kolmogorov),
            "entropy" => Ok(Self::Entropy),
            "ratio" => Ok(Self::Ratio),
            _ => Err(format!("unknown axis {s:?} (expected kolmogorov, entropy or ratio)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatterRow {
    pub id: String,
    pub label: u64,
    pub x: f64,
    pub gc: f64,
}

/// `dist` is required for [`Axis::Ratio`]; `tuple_len` is used by
/// [`Axis::Entropy`].
pub fn scatter_rows(
    dataset: &Dataset,
    axis: Axis,
    tuple_len: usize,
    dist: Option<&EntropyDistribution>,
) -> Result<(Vec<ScatterRow>, Vec<Skipped>)> {
    if axis == Axis::Ratio && dist.is_none() {
        return Err(CliError::Validation("the ratio axis needs a distribution".into()));
    }
    per_record(dataset, |r| {
        let tokens = r.sequence.tokens();
        let x = match axis {
            Axis::Kolmogorov => compressed_len(tokens) as f64 / tokens.len() as f64,
            Axis::Entropy => sequence_entropy(tokens, tuple_len)?,
            Axis::Ratio => calculate_ratio(tokens, dist.expect("checked above"))?.to_f64(),
        };
        Ok(ScatterRow { id: r.id.clone(), label: r.label, x, gc: gc_content(tokens)? })
    })
}

pub fn write_scatter_csv(rows: &[ScatterRow], full_precision: bool, out: impl Write) -> Result<()> {
    let f = |x| format_float(x, full_precision);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "label", "x", "gc"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([r.id.clone(), r.label.to_string(), f(r.x), f(r.gc)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile_csv(points: &[ProfilePoint], full_precision: bool, mut out: impl Write) -> Result<()> {
    writeln!(out, "param,mean_entropy")?;
    for p in points {
        writeln!(out, "{},{}", p.param, format_float(p.mean_entropy, full_precision))?;
    }
    out.flush()?;
    Ok(())
}

/// Crops every record; any failure aborts the whole run with a summary.
/// `dist` is required for [`CropMethod::Ratio`].
pub fn crop_dataset(
    dataset: &Dataset,
    method: CropMethod,
    cfg: CropConfig,
    dist: Option<&EntropyDistribution>,
) -> Result<Vec<EncodedSequence>> {
    let cache = CompressorCache::default();
    let cropper = Cropper::new(method, cfg, &cache, dist)?.with_mode(ExecutionMode::Sequential);
    let results: Vec<_> = dataset
        .records
        .par_iter()
        .enumerate()
        .map(|(i, r)| cropper.crop(r.sequence.tokens(), i as u64))
        .collect();
    let total = results.len();
    let mut out = Vec::with_capacity(total);
    let (mut failed, mut first) = (0, None);
    for (record, result) in dataset.records.iter().zip(results) {
        match result {
            Ok(seq) => out.push(seq),
            Err(e) => {
                failed += 1;
                first.get_or_insert_with(|| CliError::Validation(format!("record {} (line {}): {e}", record.id, record.line)));
            }
        }
    }
    if let Some(first) = first {
        return Err(CliError::Records { failed, total, first: Box::new(first) });
    }
    Ok(out)
}

/// Provenance written next to a cropped dataset.
pub fn crop_sidecar(method: CropMethod, cfg: &CropConfig, input: &Path, records: usize) -> serde_json::Value {
    json!({
        "tool": concat!("entrank ", env!("CARGO_PKG_VERSION")),
        "input": input.display().to_string(),
        "records": records,
        "method": method.to_string(),
        "seed": cfg.seed,
        "config": {
            "target_len": cfg.target_len,
            "num_candidates": cfg.num_candidates,
            "offset_ratio": cfg.offset_ratio,
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "pick": cfg.pick.to_string(),
            "block_len": cfg.block_len,
            "tuple_len": cfg.tuple_len,
            "seed": cfg.seed,
        },
    })
}

fn csv_err(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::Io(e),
        other => CliError::Validation(format!("{other:?}")),
    }
}
