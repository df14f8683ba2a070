//! Frame files.
//!
//! Files list one frame vector per row; the reader turns rows into columns
//! of the [`FrameMatrix`]. Two formats:
//!
//! * structured (`.json`): keys `n`, `N`, `vectors`, `metadata`, in that
//!   order;
//! * delimiter-separated (`.csv`, `.dsv`, `.tsv`, anything else): one vector
//!   per row, `n` columns, no header.
//!
//! Numbers are written with 17 significant digits, so write, read, write is
//! byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::FrameError;
use crate::frame::FrameMatrix;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid frame: {0}")]
    Frame(#[from] FrameError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Structured,
    Dsv,
}

impl Format {
    /// `.json` is structured; every other extension is delimiter-separated.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Structured,
            _ => Format::Dsv,
        }
    }
}

fn delimiter_for(path: Option<&Path>) -> u8 {
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("tsv") => b'\t',
        _ => b',',
    }
}

/// Seed recorded in metadata: an integer RNG seed or a seed vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedInfo {
    Integer(u64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Metadata {
    fn is_empty(&self) -> bool {
        self.name.is_none() && self.seed.is_none() && self.tolerance.is_none()
    }
}

/// On-disk frame: vectors as rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub n: usize,
    #[serde(rename = "N")]
    pub count: usize,
    pub vectors: Vec<Vec<f64>>,
    #[serde(default)]
    pub metadata: Metadata,
}

impl FrameFile {
    pub fn from_frame(frame: &FrameMatrix, metadata: Metadata) -> Self {
        Self {
            n: frame.dim(),
            count: frame.count(),
            vectors: frame.vectors(),
            metadata,
        }
    }

    fn validate(&self) -> Result<(), FileError> {
        if self.vectors.len() != self.count {
            return Err(FileError::Parse(format!(
                "N = {} but {} vectors listed",
                self.count,
                self.vectors.len()
            )));
        }
        if let Some((j, v)) = self
            .vectors
            .iter()
            .enumerate()
            .find(|(_, v)| v.len() != self.n)
        {
            return Err(FileError::Parse(format!(
                "vector {j} has {} entries, n = {}",
                v.len(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn to_frame(&self) -> Result<FrameMatrix, FileError> {
        self.validate()?;
        Ok(FrameMatrix::from_columns(&self.vectors)?)
    }

    pub fn parse(text: &str, format: Format, delimiter: u8) -> Result<Self, FileError> {
        match format {
            Format::Structured => {
                let file: FrameFile =
                    serde_json::from_str(text).map_err(|e| FileError::Parse(e.to_string()))?;
                file.validate()?;
                Ok(file)
            }
            Format::Dsv => {
                let vectors = parse_dsv(text, delimiter)?;
                let n = vectors.first().map(Vec::len).unwrap_or(0);
                Ok(Self {
                    n,
                    count: vectors.len(),
                    vectors,
                    metadata: Metadata::default(),
                })
            }
        }
    }

    pub fn render(&self, format: Format, delimiter: u8) -> String {
        match format {
            Format::Structured => self.render_structured(),
            Format::Dsv => render_dsv(&self.vectors, delimiter),
        }
    }

    fn render_structured(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"n\": {},", self.n);
        let _ = writeln!(out, "  \"N\": {},", self.count);
        out.push_str("  \"vectors\": [");
        for (j, v) in self.vectors.iter().enumerate() {
            out.push_str(if j == 0 { "\n    [" } else { ",\n    [" });
            out.push_str(&join_numbers(v, ", "));
            out.push(']');
        }
        out.push_str(if self.vectors.is_empty() {
            "]"
        } else {
            "\n  ]"
        });
        if !self.metadata.is_empty() {
            out.push_str(",\n  \"metadata\": {");
            let mut fields = Vec::new();
            if let Some(name) = &self.metadata.name {
                fields.push(format!(
                    "\"name\": {}",
                    serde_json::to_string(name).expect("string")
                ));
            }
            match &self.metadata.seed {
                Some(SeedInfo::Integer(s)) => fields.push(format!("\"seed\": {s}")),
                Some(SeedInfo::Vector(v)) => {
                    fields.push(format!("\"seed\": [{}]", join_numbers(v, ", ")))
                }
                None => {}
            }
            if let Some(t) = self.metadata.tolerance {
                fields.push(format!("\"tolerance\": {}", format_number(t)));
            }
            for (k, f) in fields.iter().enumerate() {
                out.push_str(if k == 0 { "\n    " } else { ",\n    " });
                out.push_str(f);
            }
            out.push_str("\n  }");
        }
        out.push_str("\n}\n");
        out
    }
}

/// 17 significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn join_numbers(v: &[f64], sep: &str) -> String {
    v.iter()
        .map(|x| format_number(*x))
        .collect::<Vec<_>>()
        .join(sep)
}

fn render_dsv(rows: &[Vec<f64>], delimiter: u8) -> String {
    let mut writer = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .from_writer(Vec::new());
    for row in rows {
        writer
            .write_record(row.iter().map(|x| format_number(*x)))
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Rows of reals; every row must have the same length.
pub fn parse_dsv(text: &str, delimiter: u8) -> Result<Vec<Vec<f64>>, FileError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FileError::Parse(e.to_string()))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                field.parse::<f64>().map_err(|_| {
                    FileError::Parse(format!("row {}, column {}: {field:?}", r + 1, c + 1))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(FileError::Parse("no vectors".into()));
    }
    Ok(rows)
}

pub fn read_frame_file(path: &Path, format: Option<Format>) -> Result<FrameFile, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let format = format.unwrap_or_else(|| Format::from_path(path));
    FrameFile::parse(&text, format, delimiter_for(Some(path)))
}

pub fn write_frame_file(
    path: &Path,
    file: &FrameFile,
    format: Option<Format>,
) -> Result<(), FileError> {
    let format = format.unwrap_or_else(|| Format::from_path(path));
    fs::write(path, file.render(format, delimiter_for(Some(path)))).map_err(|source| {
        FileError::Io {
            path: path.display().to_string(),
            source,
        }
    })
}

pub fn render_to_string(file: &FrameFile, format: Format) -> String {
    file.render(format, delimiter_for(None))
}
