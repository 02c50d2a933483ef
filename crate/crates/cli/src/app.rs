//! Argument parsing and dispatch. Every flag may also come from a
//! `--config` file; a flag given on the command line wins.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use entrank_core::augment::{CropConfig, CropMethod, Pick};
use entrank_core::entropy::{monte_carlo_profiles, Sweep};
use entrank_core::partition::{DistributionBuilder, DistributionStore};
use entrank_core::BlockSpec;

use crate::commands::{self, Axis, Skipped};
use crate::config::Config;
use crate::dataset::{ingest, Dataset, Format, IngestOptions};
use crate::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "entrank", version, about = "Entropy-rank ratios, exact block-entropy distributions and guided crops")]
pub struct Cli {
    /// `key = value` file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub flags: Flags,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build (or load) the entropy distribution for (T, n, N) and summarise it.
    BuildDist,
    /// Per-record mean block entropy, rank ratio and GC content.
    Ratio {
        /// Dataset, CSV or FASTA.
        input: PathBuf,
    },
    /// Crop every record to a fixed length with one of the crop methods.
    Crop {
        /// Dataset, CSV or FASTA.
        input: PathBuf,
    },
    /// Monte-Carlo entropy profile of uniform random sequences.
    Profile,
    /// Per-record (x, GC) pairs for one complexity axis.
    Scatter {
        /// Dataset, CSV or FASTA.
        input: PathBuf,
    },
    /// Parse a dataset and report what was read.
    IngestCheck {
        /// Dataset, CSV or FASTA.
        input: PathBuf,
    },
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Block length.
    #[arg(long = "T", global = true)]
    pub block_len: Option<usize>,
    /// Tuple length.
    #[arg(long = "n", global = true)]
    pub tuple_len: Option<usize>,
    /// Number of blocks averaged by the ratio [default: 1].
    #[arg(long = "N", global = true)]
    pub blocks: Option<usize>,
    /// Crop length [default: T].
    #[arg(long, global = true)]
    pub target_len: Option<usize>,
    /// Candidate windows scored per record [default: 10].
    #[arg(long, global = true)]
    pub num_candidates: Option<usize>,
    /// Largest candidate offset as a fraction of the spare length [default: 0.5].
    #[arg(long, global = true)]
    pub offset_ratio: Option<f64>,
    /// Weight of the entropy or ratio mismatch [default: 1.0].
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Weight of the offset penalty [default: 0.1].
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// max or min compressed length for the kolmogorov crop.
    #[arg(long, global = true)]
    pub pick: Option<Pick>,
    /// Crop RNG seed; each record draws from its own stream [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for distribution files.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Input format, csv or fasta [default: from extension].
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Output file [default: stdout].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print floats in shortest round-trip form instead of six decimals.
    #[arg(long, global = true)]
    pub full_precision: bool,
    /// CSV column holding the sequence [default: sequence].
    #[arg(long, global = true)]
    pub sequence_col: Option<String>,
    /// CSV column holding the integer label [default: label].
    #[arg(long, global = true)]
    pub label_col: Option<String>,
    /// Sidecar `id,label` CSV for FASTA input.
    #[arg(long, global = true)]
    pub labels: Option<PathBuf>,
    /// Read `.` as padding.
    #[arg(long, global = true)]
    pub allow_padding: bool,
    /// Fail instead of building a distribution that is not cached.
    #[arg(long, global = true)]
    pub no_build: bool,
    /// basic, random, entropy, kolmogorov or ratio.
    #[arg(long, global = true)]
    pub method: Option<CropMethod>,
    /// kolmogorov, entropy or ratio [default: ratio].
    #[arg(long, global = true)]
    pub axis: Option<Axis>,
    /// n (tuple length) or N (block count) [default: n].
    #[arg(long, global = true)]
    pub sweep: Option<SweepKind>,
    /// Profile sequence length [default: 1000].
    #[arg(long, global = true)]
    pub len: Option<usize>,
    /// Profile sample size [default: 50].
    #[arg(long, global = true)]
    pub num_sequences: Option<usize>,
    /// Largest tuple length of the n sweep [default: 50].
    #[arg(long, global = true)]
    pub max_n: Option<usize>,
}

/// Keys accepted in a config file.
pub const CONFIG_KEYS: &[&str] = &[
    "T", "n", "N", "target-len", "num-candidates", "offset-ratio", "alpha", "beta", "pick", "seed", "cache-dir",
    "format", "out", "full-precision", "sequence-col", "label-col", "labels", "allow-padding", "no-build", "method",
    "axis", "sweep", "len", "num-sequences", "max-n",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    TupleLen,
    Blocks,
}

impl FromStr for SweepKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "n" | "tuple" => Ok(Self::TupleLen),
            "N" | "blocks" => Ok(Self::Blocks),
            _ => Err(format!("unknown sweep {s:?} (expected n or N)")),
        }
    }
}

/// Flags merged with the config file and defaults.
#[derive(Clone, Debug)]
pub struct Settings {
    pub spec: BlockSpec,
    pub crop: CropConfig,
    pub cache_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub full_precision: bool,
    pub ingest: IngestOptions,
    pub no_build: bool,
    pub method: Option<CropMethod>,
    pub axis: Axis,
    pub sweep: SweepKind,
    pub len: usize,
    pub num_sequences: usize,
    pub max_n: usize,
}

impl Settings {
    pub fn resolve(flags: Flags, config: &Config) -> Result<Self> {
        macro_rules! pick {
            ($field:ident, $key:literal) => {
                match flags.$field {
                    Some(v) => Some(v),
                    None => config.get($key)?,
                }
            };
        }
        let flag = |cli: bool, key: &str| -> Result<bool> { Ok(cli || config.get_bool(key)?.unwrap_or(false)) };

        let block_len = pick!(block_len, "T").unwrap_or(22);
        let tuple_len = pick!(tuple_len, "n").unwrap_or(1);
        let blocks = pick!(blocks, "N").unwrap_or(1);
        let spec = BlockSpec::new(block_len, tuple_len, blocks).map_err(|e| CliError::Validation(e.to_string()))?;

        let defaults = CropConfig::default();
        let crop = CropConfig {
            target_len: pick!(target_len, "target-len").unwrap_or(block_len),
            num_candidates: pick!(num_candidates, "num-candidates").unwrap_or(defaults.num_candidates),
            offset_ratio: pick!(offset_ratio, "offset-ratio").unwrap_or(defaults.offset_ratio),
            alpha: pick!(alpha, "alpha").unwrap_or(defaults.alpha),
            beta: pick!(beta, "beta").unwrap_or(defaults.beta),
            pick: pick!(pick, "pick").unwrap_or(defaults.pick),
            block_len,
            tuple_len,
            seed: pick!(seed, "seed").unwrap_or(defaults.seed),
        };

        let base = IngestOptions::default();
        let ingest = IngestOptions {
            format: pick!(format, "format"),
            sequence_col: pick!(sequence_col, "sequence-col").unwrap_or(base.sequence_col),
            label_col: pick!(label_col, "label-col").unwrap_or(base.label_col),
            labels: pick!(labels, "labels"),
            allow_padding: flag(flags.allow_padding, "allow-padding")?,
        };

        Ok(Self {
            spec,
            crop,
            cache_dir: pick!(cache_dir, "cache-dir"),
            out: pick!(out, "out"),
            full_precision: flag(flags.full_precision, "full-precision")?,
            ingest,
            no_build: flag(flags.no_build, "no-build")?,
            method: pick!(method, "method"),
            axis: pick!(axis, "axis").unwrap_or(Axis::Ratio),
            sweep: pick!(sweep, "sweep").unwrap_or(SweepKind::TupleLen),
            len: pick!(len, "len").unwrap_or(1000),
            num_sequences: pick!(num_sequences, "num-sequences").unwrap_or(50),
            max_n: pick!(max_n, "max-n").unwrap_or(Sweep::DEFAULT_MAX_TUPLE_LEN),
        })
    }

    fn store(&self) -> DistributionStore {
        let builder = DistributionBuilder::default();
        match &self.cache_dir {
            Some(dir) => DistributionStore::with_dir(dir, builder),
            None => DistributionStore::in_memory(builder),
        }
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(fs::File::create(path).map_err(CliError::file(path))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn dataset(&self, input: &Path) -> Result<Dataset> {
        ingest(input, &self.ingest)
    }
}

fn report_skipped(skipped: &[Skipped]) {
    for s in skipped {
        eprintln!("warning: {s}");
    }
    if !skipped.is_empty() {
        eprintln!("warning: {} record(s) skipped", skipped.len());
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path, CONFIG_KEYS)?,
        None => Config::default(),
    };
    let s = Settings::resolve(cli.flags, &config)?;

    match cli.command {
        Command::BuildDist => {
            let report = commands::build_dist(&s.store(), s.spec)?;
            write!(s.output()?, "{report}")?;
        }
        Command::Ratio { input } => {
            let dataset = s.dataset(&input)?;
            let dist = commands::distribution(&s.store(), s.spec, !s.no_build)?;
            let (rows, skipped) = commands::ratio_rows(&dataset, &dist)?;
            commands::write_ratio_csv(&rows, s.full_precision, s.output()?)?;
            report_skipped(&skipped);
        }
        Command::Crop { input } => {
            let method = s.method.ok_or_else(|| CliError::Validation("crop needs --method".into()))?;
            let out = s.out.clone().ok_or_else(|| CliError::Validation("crop needs --out".into()))?;
            s.crop.validate_for(method)?;
            let dataset = s.dataset(&input)?;
            let dist = match method {
                CropMethod::Ratio => Some(commands::distribution(&s.store(), s.crop.ratio_spec()?, !s.no_build)?),
                _ => None,
            };
            let cropped = commands::crop_dataset(&dataset, method, s.crop, dist.as_deref())?;
            dataset.write_with_sequences(&cropped, s.output()?)?;
            let sidecar = commands::crop_sidecar(method, &s.crop, &input, cropped.len());
            let sidecar_path = sidecar_path(&out);
            fs::write(&sidecar_path, format!("{sidecar:#}\n")).map_err(CliError::file(&sidecar_path))?;
        }
        Command::Profile => {
            let sweep = match s.sweep {
                SweepKind::TupleLen => Sweep::TupleLen { max_tuple_len: s.max_n },
                SweepKind::Blocks => Sweep::Blocks { tuple_len: s.spec.tuple_len() },
            };
            let points = monte_carlo_profiles(s.len, s.num_sequences, sweep, s.crop.seed)?;
            commands::write_profile_csv(&points, s.full_precision, s.output()?)?;
        }
        Command::Scatter { input } => {
            let dataset = s.dataset(&input)?;
            let dist = match s.axis {
                Axis::Ratio => Some(commands::distribution(&s.store(), s.spec, !s.no_build)?),
                _ => None,
            };
            let (rows, skipped) = commands::scatter_rows(&dataset, s.axis, s.spec.tuple_len(), dist.as_deref())?;
            commands::write_scatter_csv(&rows, s.full_precision, s.output()?)?;
            report_skipped(&skipped);
        }
        Command::IngestCheck { input } => {
            let dataset = s.dataset(&input)?;
            write!(s.output()?, "{}", ingest_summary(&dataset))?;
        }
    }
    Ok(())
}

/// `<out>.json`, next to the cropped dataset.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn ingest_summary(dataset: &Dataset) -> String {
    let mut labels = std::collections::BTreeMap::<u64, usize>::new();
    for r in &dataset.records {
        *labels.entry(r.label).or_default() += 1;
    }
    let lengths = dataset.records.iter().map(|r| r.sequence.len());
    let padded = dataset.records.iter().filter(|r| r.sequence.has_padding()).count();
    let classes: Vec<String> = labels.iter().map(|(l, c)| format!("{l}:{c}")).collect();
    format!(
        "format {}\nrecords {}\nclasses {}\nmin_len {}\nmax_len {}\npadded {}\n",
        dataset.format,
        dataset.len(),
        classes.join(" "),
        lengths.clone().min().unwrap_or(0),
        lengths.max().unwrap_or(0),
        padded,
    )
}
