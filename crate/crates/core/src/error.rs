use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Smallest Louvain community observed for one candidate k during k selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KDiagnostic {
    pub k: usize,
    pub core_nodes: usize,
    pub smallest_community: usize,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corpus format error in {path}: {malformed} of {total} lines malformed")]
    CorpusFormat {
        path: PathBuf,
        malformed: usize,
        total: usize,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("unknown node {0}")]
    UnknownNode(u64),

    #[error("no k yields communities of at least {min_size} users (tried {} values)", .diagnostics.len())]
    NoValidK {
        min_size: usize,
        diagnostics: Vec<KDiagnostic>,
    },

    #[error("training error: {0}")]
    Training(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("external scores missing for {} tweet(s): {}", .0.len(), preview_ids(.0))]
    MissingScores(Vec<u64>),

    #[error("malformed binary file: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

fn preview_ids(ids: &[u64]) -> String {
    const SHOWN: usize = 20;
    let mut s = ids
        .iter()
        .take(SHOWN)
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(", ");
    if ids.len() > SHOWN {
        s.push_str(", ...");
    }
    s
}
