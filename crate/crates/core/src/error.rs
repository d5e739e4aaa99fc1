use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the learning and evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid example: {0}")]
    InvalidExample(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("cluster table is empty")]
    EmptyTable,

    #[error("cumulative distribution is empty")]
    EmptyCdf,

    #[error("malformed cumulative distribution: {0}")]
    InvalidCdf(String),

    #[error("knee override {requested} is out of range 1..={clusters}")]
    OverrideOutOfRange { requested: usize, clusters: usize },

    #[error("cannot build a template for an empty cluster")]
    EmptyCluster,

    #[error("member {member:?} does not align with the template")]
    AlignmentFailure { member: String },

    #[error("generated regex {regex:?} failed to compile: {reason}")]
    CompileFailure { regex: String, reason: String },

    #[error("generated regex {regex:?} does not match training member {member:?}")]
    Unsound { regex: String, member: String },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: file is not valid UTF-8")]
    Encoding { path: PathBuf },

    #[error("line {0}: blank line in corpus")]
    EmptyLine(usize),

    #[error("line {line}: invalid or missing field `{field}`")]
    Schema { line: usize, field: String },

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// True for errors that can only come from a bug in the pipeline itself,
    /// never from bad input data.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::AlignmentFailure { .. } | Error::CompileFailure { .. } | Error::Unsound { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
