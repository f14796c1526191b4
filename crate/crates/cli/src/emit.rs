//! CSV and JSON payloads, the manifest, and writing them to disk.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig, SCHEMA_VERSION};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    /// Floats use 17 significant digits in scientific notation, independent of locale.
    fn render(&self) -> String {
        match self {
            Self::Float(x) => format!("{x:.16e}"),
            Self::Int(i) => i.to_string(),
            Self::Text(s) => s.clone(),
            Self::Bool(b) => b.to_string(),
            Self::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Self::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Self::Int(i64::from(x))
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Self::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Self::Text(x.to_owned())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Self::Text(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Self::Empty, Self::Float)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Pretty JSON with a trailing newline. Struct fields keep declaration order and maps
/// are sorted, so the bytes are stable.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("payload serializes");
    bytes.push(b'\n');
    bytes
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Files produced by one task, held in memory until the run succeeds.
#[derive(Debug, Default)]
pub struct Bundle {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Bundle {
    pub fn csv(&mut self, cfg: &RunConfig, name: impl Into<String>, table: &Table) {
        if cfg.output.wants(Format::Csv) {
            self.files.push((name.into(), table.to_csv()));
        }
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, cfg: &RunConfig, name: impl Into<String>, value: &T) {
        if cfg.output.wants(Format::Json) {
            self.files.push((name.into(), to_json(value)));
        }
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema_version: u32,
    pub task: &'static str,
    pub config: &'a RunConfig,
    pub started_at: String,
    pub finished_at: String,
    pub files: Vec<FileEntry>,
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Writes every payload, then `manifest.json` listing them with checksums.
pub fn write_bundle(dir: &Path, cfg: &RunConfig, bundle: &Bundle, started_at: String) -> Result<Vec<FileEntry>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut entries = Vec::with_capacity(bundle.files.len());
    for (name, bytes) in &bundle.files {
        write(&dir.join(name), bytes)?;
        entries.push(FileEntry { name: name.clone(), sha256: sha256_hex(bytes), bytes: bytes.len() });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        schema_version: SCHEMA_VERSION,
        task: cfg.task.as_str(),
        config: cfg,
        started_at,
        finished_at: now(),
        files: entries.clone(),
    };
    write(&dir.join("manifest.json"), &to_json(&manifest))?;
    Ok(entries)
}

pub fn write_error(dir: &Path, report: &impl Serialize) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join("error.json");
    write(&path, &to_json(report))?;
    Ok(path)
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
