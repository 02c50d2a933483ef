//! Plain-text persistence for distributions.
//!
//! ```text
//! entrank-dist v1
//! T=4 n=1 N=1 lambda=4 c=4
//! 0.0000000000000000e0 2^8 4
//! 8.1127812445913294e-1 3^3 48
//! ...
//! total 256
//! ```
//!
//! One line per key, ascending entropy: the entropy with 17 significant
//! digits, the canonical exponent vector and the decimal count.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;

use super::key::ExponentVector;
use super::{DistributionBuilder, EntropyDistribution, EntropyKey};
use crate::seqcore::BlockSpec;
use crate::{Error, Result};

const MAGIC: &str = "entrank-dist v1";

pub fn write_distribution(dist: &EntropyDistribution, mut out: impl Write) -> std::io::Result<()> {
    let spec = dist.spec();
    writeln!(out, "{MAGIC}")?;
    writeln!(
        out,
        "T={} n={} N={} lambda={} c={}",
        spec.block_len(),
        spec.tuple_len(),
        spec.blocks(),
        spec.alphabet_size(),
        spec.tuples_per_block()
    )?;
    for (key, count) in dist.entries() {
        writeln!(out, "{:.16e} {} {}", key.entropy(), key, count)?;
    }
    writeln!(out, "total {}", dist.total())?;
    out.flush()
}

/// Parses a distribution file. `origin` is only used in error messages.
pub fn read_distribution(input: impl Read, origin: &Path) -> Result<EntropyDistribution> {
    let err = |line: usize, message: String| Error::CacheFormat { path: origin.to_path_buf(), line, message };
    let mut lines = BufReader::new(input).lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i, l)),
            Some((_, Err(e))) => Err(Error::Io(e)),
            None => Err(err(0, format!("unexpected end of file, expected {what}"))),
        }
    };

    let (i, header) = next("header")?;
    if header.trim() != MAGIC {
        return Err(err(i, format!("expected {MAGIC:?}, found {header:?}")));
    }

    let (i, meta) = next("metadata")?;
    let mut fields: HashMap<&str, u128> = HashMap::new();
    for item in meta.split_whitespace() {
        let (name, value) = item.split_once('=').ok_or_else(|| err(i, format!("bad metadata field {item:?}")))?;
        let value = value.parse().map_err(|_| err(i, format!("bad metadata value {item:?}")))?;
        fields.insert(name, value);
    }
    let field = |name: &str| fields.get(name).copied().ok_or_else(|| err(i, format!("missing {name}")));
    let spec = BlockSpec::new(field("T")? as usize, field("n")? as usize, field("N")? as usize)
        .map_err(|e| err(i, e.to_string()))?;
    if field("lambda")? != spec.alphabet_size() || field("c")? != spec.tuples_per_block() as u128 {
        return Err(err(i, "lambda or c inconsistent with T and n".into()));
    }
    let c = spec.tuples_per_block() as u64;

    let mut entries: Vec<(EntropyKey, BigUint)> = Vec::new();
    let declared_total = loop {
        let (i, line) = next("entry or total")?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["total", total] => break total.parse::<BigUint>().map_err(|_| err(i, "bad total".into()))?,
            [entropy, exponents, count] => {
                let entropy: f64 = entropy.parse().map_err(|_| err(i, format!("bad entropy {entropy:?}")))?;
                let ExponentVector(exps) = exponents.parse().map_err(|m| err(i, m))?;
                let count: BigUint = count.parse().map_err(|_| err(i, format!("bad count {count:?}")))?;
                let key = EntropyKey::from_exponents(exps, c, spec.blocks() as u64);
                if (key.entropy() - entropy).abs() > 1e-12 {
                    return Err(err(i, format!("entropy {entropy} does not match key {key}")));
                }
                if entries.last().is_some_and(|(prev, _)| prev >= &key) {
                    return Err(err(i, "entries not strictly ascending".into()));
                }
                entries.push((key, count));
            }
            _ => return Err(err(i, format!("unrecognised line {line:?}"))),
        }
    };

    let dist = EntropyDistribution::from_counts(spec, entries);
    if dist.total() != declared_total {
        return Err(err(0, format!("declared total {declared_total} but entries sum to {}", dist.total())));
    }
    Ok(dist)
}

/// Where [`DistributionStore::get`] found a distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistributionSource {
    Memory,
    Disk,
    Built,
}

/// Memoises distributions by `(T, n, N)` in memory and, optionally, as files
/// in a cache directory. Files are written to a temporary name and renamed
/// into place.
#[derive(Debug)]
pub struct DistributionStore {
    dir: Option<PathBuf>,
    builder: DistributionBuilder,
    memory: Mutex<HashMap<BlockSpec, Arc<EntropyDistribution>>>,
}

impl DistributionStore {
    pub fn in_memory(builder: DistributionBuilder) -> Self {
        Self { dir: None, builder, memory: Mutex::default() }
    }

    pub fn with_dir(dir: impl Into<PathBuf>, builder: DistributionBuilder) -> Self {
        Self { dir: Some(dir.into()), builder, memory: Mutex::default() }
    }

    pub fn builder(&self) -> &DistributionBuilder {
        &self.builder
    }

    /// File name used for a given spec.
    pub fn path_for(&self, spec: BlockSpec) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| {
            d.join(format!("dist_T{}_n{}_N{}.txt", spec.block_len(), spec.tuple_len(), spec.blocks()))
        })
    }

    pub fn get(&self, spec: BlockSpec) -> Result<Arc<EntropyDistribution>> {
        self.get_traced(spec).map(|(d, _)| d)
    }

    pub fn get_traced(&self, spec: BlockSpec) -> Result<(Arc<EntropyDistribution>, DistributionSource)> {
        if let Some(d) = self.memory.lock().unwrap().get(&spec) {
            return Ok((Arc::clone(d), DistributionSource::Memory));
        }
        let (dist, source) = match self.load(spec)? {
            Some(d) => (d, DistributionSource::Disk),
            None => {
                let d = if spec.blocks() == 1 {
                    self.builder.build(spec.block_len(), spec.tuple_len())?
                } else {
                    let single = self.get(spec.with_blocks(1)?)?;
                    self.builder.convolve_mean(&single, spec.blocks())?
                };
                self.save(&d)?;
                (d, DistributionSource::Built)
            }
        };
        let dist = Arc::new(dist);
        self.memory.lock().unwrap().insert(spec, Arc::clone(&dist));
        Ok((dist, source))
    }

    fn load(&self, spec: BlockSpec) -> Result<Option<EntropyDistribution>> {
        let Some(path) = self.path_for(spec) else { return Ok(None) };
        if !path.exists() {
            return Ok(None);
        }
        let dist = read_distribution(fs::File::open(&path)?, &path)?;
        if dist.spec() != spec {
            return Err(Error::CacheFormat {
                path,
                line: 2,
                message: format!("file holds {} but {} was requested", dist.spec(), spec),
            });
        }
        Ok(Some(dist))
    }

    fn save(&self, dist: &EntropyDistribution) -> Result<()> {
        let Some(path) = self.path_for(dist.spec()) else { return Ok(()) };
        let dir = path.parent().expect("cache file has a parent");
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(
            ".{}.{}.tmp",
            path.file_name().unwrap().to_string_lossy(),
            std::process::id()
        ));
        {
            let mut file = std::io::BufWriter::new(fs::File::create(&tmp)?);
            write_distribution(dist, &mut file)?;
            file.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}
