use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular model: discriminant is zero")]
    Singular,

    #[error("prime {p} is not of split multiplicative reduction")]
    NotSplit { p: u64 },

    #[error("{0}")]
    Precondition(String),

    #[error("requested {requested} bits of precision, at most {available} available")]
    PrecisionUnderflow { requested: u32, available: u32 },

    #[error("L-series truncated at {terms} terms, need at least {needed}")]
    Convergence { terms: usize, needed: usize },

    #[error("could not factor {0}")]
    Factorization(String),

    #[error("level {level}: eigenspace still has dimension {dim} after Hecke primes up to {bound}")]
    Separation { level: u64, dim: usize, bound: u64 },

    #[error("level {level}: no eigenvector with the given Hecke eigenvalues ({detail})")]
    Inconsistent { level: u64, detail: String },

    #[error("normalisation of {label} failed: {detail}")]
    Certification { label: String, detail: String },

    #[error("group ring: {0}")]
    GroupRing(String),

    #[error("element is not in I(R,G)^{level}")]
    Membership { level: usize },

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("dataset line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate label {0}")]
    DuplicateLabel(String),

    #[error("unknown curve label {0}")]
    UnknownLabel(String),

    #[error("{label}: {detail}")]
    Mismatch { label: String, detail: String },

    #[error("resume token does not match this dataset and configuration")]
    ResumeMismatch,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
