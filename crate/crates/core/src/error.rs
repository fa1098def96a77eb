use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed workspace file: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("invalid workspace: {0}")]
    Invalid(String),

    #[error("{what} supports at most {cap} subpaths, got {n}")]
    TooLarge { what: &'static str, cap: usize, n: usize },

    #[error("invalid graph query: {0}")]
    Graph(String),

    #[error("matching needs an even number of vertices, got {0}")]
    OddVertexCount(usize),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code used by the CLI: 1 input error, 2 capability limit,
    /// 3 internal invariant failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse(_) | Error::Invalid(_) => 1,
            Error::TooLarge { .. } => 2,
            Error::Graph(_) | Error::OddVertexCount(_) | Error::Invariant(_) => 3,
        }
    }
}
