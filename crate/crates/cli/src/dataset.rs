//! Labelled sequence datasets in CSV or FASTA form.
//!
//! CSV files need a header with a sequence and a label column (`sequence` and
//! `label` unless overridden); an `id` column is used when present, otherwise
//! records are named `row<k>`. Any other columns are carried through
//! untouched. FASTA records take their ID from the first word of the header
//! line and their label from a sidecar CSV with columns `id,label`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use entrank_core::EncodedSequence;

use crate::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Fasta,
}

impl Format {
    /// `.fa`, `.fasta`, `.fna` and `.fas` are FASTA; everything else is CSV.
    pub fn infer(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("fa" | "fasta" | "fna" | "fas") => Self::Fasta,
            _ => Self::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "fasta" | "fa" => Ok(Self::Fasta),
            _ => Err(format!("unknown format {s:?} (expected csv or fasta)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Fasta => "fasta",
        })
    }
}

#[derive(Clone, Debug)]
pub struct IngestOptions {
    /// Inferred from the file extension when unset.
    pub format: Option<Format>,
    pub sequence_col: String,
    pub label_col: String,
    /// Sidecar `id,label` CSV, required for FASTA.
    pub labels: Option<PathBuf>,
    /// Accept `.` as a padding token, for reading back cropped datasets.
    pub allow_padding: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            format: None,
            sequence_col: "sequence".into(),
            label_col: "label".into(),
            labels: None,
            allow_padding: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub id: String,
    pub label: u64,
    pub sequence: EncodedSequence,
    /// 1-based line of the record in its source file.
    pub line: u64,
    /// Original CSV row; empty for FASTA.
    pub fields: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub format: Format,
    /// CSV header; empty for FASTA.
    pub headers: Vec<String>,
    sequence_col: usize,
    label_col: usize,
    id_col: Option<usize>,
    pub records: Vec<Record>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Extra CSV columns of a record as `(header, value)` pairs.
    pub fn metadata<'a>(&'a self, record: &'a Record) -> impl Iterator<Item = (&'a str, &'a str)> {
        let core = [Some(self.sequence_col), Some(self.label_col), self.id_col];
        self.headers
            .iter()
            .zip(&record.fields)
            .enumerate()
            .filter(move |(i, _)| !core.contains(&Some(*i)))
            .map(|(_, (h, v))| (h.as_str(), v.as_str()))
    }

    /// Writes the dataset back in its own format with every sequence
    /// replaced. Padding is rendered as `.`.
    pub fn write_with_sequences(&self, sequences: &[EncodedSequence], out: impl Write) -> Result<()> {
        assert_eq!(sequences.len(), self.records.len(), "one sequence per record");
        match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.headers).map_err(csv_io)?;
                for (record, seq) in self.records.iter().zip(sequences) {
                    let mut row = record.fields.clone();
                    row[self.sequence_col] = seq.decode();
                    w.write_record(&row).map_err(csv_io)?;
                }
                w.flush()?;
            }
            Format::Fasta => {
                let mut out = out;
                for (record, seq) in self.records.iter().zip(sequences) {
                    writeln!(out, ">{}\n{}", record.id, seq.decode())?;
                }
                out.flush()?;
            }
        }
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::Io(e),
        other => CliError::Validation(format!("{other:?}")),
    }
}

pub fn ingest(path: &Path, opts: &IngestOptions) -> Result<Dataset> {
    let open = |p: &Path| std::fs::File::open(p).map_err(CliError::file(p));
    match opts.format.unwrap_or_else(|| Format::infer(path)) {
        Format::Csv => read_csv(open(path)?, path, opts),
        Format::Fasta => {
            let labels_path = opts
                .labels
                .as_deref()
                .ok_or_else(|| CliError::Validation("FASTA input needs a --labels sidecar CSV (id,label)".into()))?;
            read_fasta(open(path)?, path, open(labels_path)?, labels_path, opts)
        }
    }
}

fn encode(text: &str, allow_padding: bool) -> entrank_core::Result<EncodedSequence> {
    if allow_padding {
        EncodedSequence::encode_padded(text)
    } else {
        EncodedSequence::encode(text)
    }
}

fn parse_label(raw: &str) -> std::result::Result<u64, String> {
    raw.trim().parse().map_err(|_| format!("label {raw:?} is not a non-negative integer"))
}

pub fn read_csv(input: impl Read, origin: &Path, opts: &IngestOptions) -> Result<Dataset> {
    let err = |line: u64, message: String| CliError::Input { path: origin.to_path_buf(), line, message };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| err(1, e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| err(1, format!("missing column {name:?} in header")))
    };
    let sequence_col = column(&opts.sequence_col)?;
    let label_col = column(&opts.label_col)?;
    let id_col = headers.iter().position(|h| h == "id");

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (row, result) in reader.records().enumerate() {
        let row_record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            err(line, e.to_string())
        })?;
        let line = row_record.position().map_or(row as u64 + 2, |p| p.line());
        let fields: Vec<String> = row_record.iter().map(str::to_string).collect();
        let id = match id_col {
            Some(i) => fields[i].trim().to_string(),
            None => format!("row{}", row + 1),
        };
        if id.is_empty() {
            return Err(err(line, "empty id".into()));
        }
        let label = parse_label(&fields[label_col]).map_err(|m| err(line, m))?;
        let text = fields[sequence_col].trim();
        if text.is_empty() {
            return Err(err(line, format!("record {id}: empty sequence")));
        }
        let sequence = encode(text, opts.allow_padding).map_err(|e| err(line, format!("record {id}: {e}")))?;
        if !seen.insert(id.clone()) {
            return Err(err(line, format!("duplicate id {id:?}")));
        }
        records.push(Record { id, label, sequence, line, fields });
    }
    Ok(Dataset { format: Format::Csv, headers, sequence_col, label_col, id_col, records })
}

pub fn read_fasta(
    fasta: impl Read,
    origin: &Path,
    labels: impl Read,
    labels_origin: &Path,
    opts: &IngestOptions,
) -> Result<Dataset> {
    let label_map = read_labels(labels, labels_origin)?;

    let err = |line: u64, message: String| CliError::Input { path: origin.to_path_buf(), line, message };
    let mut text = String::new();
    let mut fasta = fasta;
    fasta.read_to_string(&mut text).map_err(CliError::file(origin))?;

    let mut raw: Vec<(String, u64, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.trim();
        if let Some(header) = line.strip_prefix('>') {
            let id = header.split_whitespace().next().unwrap_or("").to_string();
            if id.is_empty() {
                return Err(err(line_no, "record header without an id".into()));
            }
            raw.push((id, line_no, String::new()));
        } else if !line.is_empty() && !line.starts_with(';') {
            let (_, _, seq) = raw.last_mut().ok_or_else(|| err(line_no, "sequence data before the first header".into()))?;
            seq.push_str(line);
        }
    }

    let mut records = Vec::with_capacity(raw.len());
    let mut seen = HashSet::new();
    for (id, line, text) in raw {
        if !seen.insert(id.clone()) {
            return Err(err(line, format!("duplicate id {id:?}")));
        }
        if text.is_empty() {
            return Err(err(line, format!("record {id}: empty sequence")));
        }
        let sequence = encode(&text, opts.allow_padding).map_err(|e| err(line, format!("record {id}: {e}")))?;
        let label = *label_map
            .get(&id)
            .ok_or_else(|| err(line, format!("record {id} has no label in {}", labels_origin.display())))?;
        records.push(Record { id, label, sequence, line, fields: Vec::new() });
    }
    if let Some(extra) = label_map.keys().find(|id| !seen.contains(*id)) {
        return Err(CliError::Input {
            path: labels_origin.to_path_buf(),
            line: 0,
            message: format!("label for unknown record {extra:?}"),
        });
    }
    Ok(Dataset { format: Format::Fasta, headers: Vec::new(), sequence_col: 0, label_col: 0, id_col: None, records })
}

fn read_labels(input: impl Read, origin: &Path) -> Result<HashMap<String, u64>> {
    let err = |line: u64, message: String| CliError::Input { path: origin.to_path_buf(), line, message };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = reader.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name).ok_or_else(|| err(1, format!("missing column {name:?}")));
    let (id_col, label_col) = (col("id")?, col("label")?);
    let mut map = HashMap::new();
    for result in reader.records() {
        let row = result.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let id = row[id_col].trim().to_string();
        let label = parse_label(&row[label_col]).map_err(|m| err(line, m))?;
        if map.insert(id.clone(), label).is_some() {
            return Err(err(line, format!("duplicate id {id:?}")));
        }
    }
    Ok(map)
}
