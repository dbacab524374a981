use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("EmptyCorpus: manifest lists no documents")]
    EmptyCorpus,
    #[error("InfeasibleSlicing: {0}")]
    InfeasibleSlicing(String),
    #[error("EmptyVocabulary: no word reaches min_count {min_count}")]
    EmptyVocabulary { min_count: u64 },
    #[error("EmptySlice: slice {0} has no tokens")]
    EmptySlice(u32),
    #[error("EmptyMatrix: co-occurrence matrix has no mass")]
    EmptyMatrix,
    #[error("UnknownWord: {0}")]
    UnknownWord(String),
    #[error("UnknownCorpus: {0}")]
    UnknownCorpus(String),
    #[error("InvalidDimension: d = {dim} outside 1..={max}")]
    InvalidDimension { dim: usize, max: usize },
    #[error("DimensionMismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("NoUsableSeeds: no seed word qualifies for {0}")]
    NoUsableSeeds(String),
    #[error("ConsistencyError: {0}")]
    Consistency(String),
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
    #[error("InvalidManifest: {0}")]
    InvalidManifest(String),
    #[error("InvalidLexicon: {0}")]
    InvalidLexicon(String),
    #[error("CorruptStore: {0}")]
    CorruptStore(String),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }

    /// Stable short name of the error kind, used in CLI and API messages.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyCorpus => "EmptyCorpus",
            Error::InfeasibleSlicing(_) => "InfeasibleSlicing",
            Error::EmptyVocabulary { .. } => "EmptyVocabulary",
            Error::EmptySlice(_) => "EmptySlice",
            Error::EmptyMatrix => "EmptyMatrix",
            Error::UnknownWord(_) => "UnknownWord",
            Error::UnknownCorpus(_) => "UnknownCorpus",
            Error::InvalidDimension { .. } => "InvalidDimension",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NoUsableSeeds(_) => "NoUsableSeeds",
            Error::Consistency(_) => "ConsistencyError",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::InvalidManifest(_) => "InvalidManifest",
            Error::InvalidLexicon(_) => "InvalidLexicon",
            Error::CorruptStore(_) => "CorruptStore",
            Error::File { .. } | Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
        }
    }
}
