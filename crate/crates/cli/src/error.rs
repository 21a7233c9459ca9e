use std::fmt;
use std::path::PathBuf;

use optosqueeze_core::{AnalysisError, ModelError};
use thiserror::Error;

/// One problem found while validating a config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// One problem found in an input CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|e| format!("\n  {e}")).collect()
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed JSON at line {line}, column {column}: {message}")]
    Json {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid config ({} problem(s)):{}", .0.len(), join(.0))]
    Config(Vec<FieldError>),

    #[error("{path}: malformed CSV ({} problem(s)):{}", .errors.len(), join(.errors))]
    Csv { path: String, errors: Vec<RowError> },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Analysis(#[from] AnalysisError),

    #[error("oracle deviation {deviation:e} exceeds {limit:e}")]
    OracleMismatch { deviation: f64, limit: f64 },
}

impl CliError {
    /// Process exit code: 2 for bad input, 3 when the model itself breaks
    /// down (parametric instability), 1 for a failed oracle check.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) | CliError::Analysis(AnalysisError::Model(e)) => model_exit_code(e),
            CliError::OracleMismatch { .. } => 1,
            _ => 2,
        }
    }
}

fn model_exit_code(e: &ModelError) -> i32 {
    match e {
        ModelError::Singular { .. } | ModelError::Unstable { .. } => 3,
        _ => 2,
    }
}
