use std::path::{Path, PathBuf};

use radial_origin::distributional::DistributionalError;
use radial_origin::eigen::EigenError;
use radial_origin::indicial::IndicialError;
use radial_origin::CoreError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config syntax error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("config field `{field}`: {message}")]
    Schema { field: String, message: String },
    /// A numerical task failed; `name` is the variant name of the module error.
    #[error("{module} failed with {name}: {message}")]
    Task { module: &'static str, name: &'static str, message: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Schema { field: field.into(), message: message.into() }
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::Io { path: path.to_owned(), message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. } | Self::Schema { .. } => 2,
            Self::Task { .. } => 3,
            Self::Io { .. } => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Parse { .. } => "ParseError",
            Self::Schema { .. } => "SchemaError",
            Self::Task { name, .. } => name,
            Self::Io { .. } => "IoError",
        }
    }

    pub fn report(&self) -> ErrorReport {
        let (category, module) = match self {
            Self::Parse { .. } | Self::Schema { .. } => ("config", "cli-io"),
            Self::Task { module, .. } => ("numerical", *module),
            Self::Io { .. } => ("io", "cli-io"),
        };
        ErrorReport {
            error: self.name(),
            category,
            module,
            exit_code: self.exit_code(),
            message: self.to_string(),
            field: match self {
                Self::Schema { field, .. } => Some(field.clone()),
                _ => None,
            },
            line: match self {
                Self::Parse { line, .. } => Some(*line),
                _ => None,
            },
            column: match self {
                Self::Parse { column, .. } => Some(*column),
                _ => None,
            },
            path: match self {
                Self::Io { path, .. } => Some(path.display().to_string()),
                _ => None,
            },
        }
    }
}

/// Machine-readable form of a failed run, written to `error.json` and stderr.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub error: &'static str,
    pub category: &'static str,
    pub module: &'static str,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        Self::Task { module: "radial-core", name: e.name(), message: e.to_string() }
    }
}

impl From<IndicialError> for CliError {
    fn from(e: IndicialError) -> Self {
        Self::Task { module: "indicial", name: e.name(), message: e.to_string() }
    }
}

impl From<DistributionalError> for CliError {
    fn from(e: DistributionalError) -> Self {
        Self::Task { module: "distributional", name: e.name(), message: e.to_string() }
    }
}

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        let module = match &e {
            EigenError::Indicial(_) => "indicial",
            EigenError::Core(_) => "radial-core",
            _ => "eigensolver",
        };
        Self::Task { module, name: e.name(), message: e.to_string() }
    }
}
