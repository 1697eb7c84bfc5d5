use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;
use vicinity_bench::BenchError;
use vicinity_core::{BuildError, GraphError, LoadError, QueryError};

pub mod exit {
    pub const OK: u8 = 0;
    pub const OTHER: u8 = 1;
    pub const INVALID_CONFIG: u8 = 2;
    pub const IO: u8 = 3;
    pub const GRAPH: u8 = 4;
    pub const BUILD: u8 = 5;
    pub const INDEX: u8 = 6;
    pub const QUERY: u8 = 7;
    pub const BENCH: u8 = 8;
    pub const SERVE: u8 = 9;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error("build: {0}")]
    Build(#[from] BuildError),
    #[error("index: {0}")]
    Load(#[from] LoadError),
    #[error("unknown node {0}")]
    UnknownNode(u64),
    #[error("query: {0}")]
    Query(#[from] QueryError),
    #[error("bench: {0}")]
    Bench(#[from] BenchError),
    #[error("server: {0}")]
    Serve(std::io::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => exit::INVALID_CONFIG,
            CliError::Io { .. } => exit::IO,
            CliError::Graph(GraphError::Io(_)) => exit::IO,
            CliError::Graph(GraphError::InvalidParameter(_)) => exit::INVALID_CONFIG,
            CliError::Graph(_) => exit::GRAPH,
            CliError::Build(BuildError::InvalidAlpha(_)) => exit::INVALID_CONFIG,
            CliError::Build(_) => exit::BUILD,
            CliError::Load(LoadError::Io(_)) => exit::IO,
            CliError::Load(_) => exit::INDEX,
            CliError::UnknownNode(_) | CliError::Query(_) => exit::QUERY,
            CliError::Bench(BenchError::InvalidConfig(_)) => exit::INVALID_CONFIG,
            CliError::Bench(BenchError::Io(_)) => exit::IO,
            CliError::Bench(_) => exit::BENCH,
            CliError::Serve(_) => exit::SERVE,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            exit::INVALID_CONFIG => "invalid_config",
            exit::IO => "io",
            exit::GRAPH => "graph",
            exit::BUILD => "build",
            exit::INDEX => "index",
            exit::QUERY if matches!(self, CliError::UnknownNode(_)) => "unknown_node",
            exit::QUERY => "query",
            exit::BENCH => "bench",
            exit::SERVE => "serve",
            _ => "other",
        }
    }

    /// `{"error": kind, "message": text}` as printed on stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            error: &'a str,
            message: String,
        }
        serde_json::to_string(&Body {
            error: self.kind(),
            message: self.to_string(),
        })
        .expect("plain struct")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_distinct_per_category() {
        let missing = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(
            CliError::Build(BuildError::InvalidAlpha(0.0)).exit_code(),
            exit::INVALID_CONFIG
        );
        assert_eq!(CliError::io("x", missing).exit_code(), exit::IO);
        assert_eq!(CliError::Load(LoadError::ChecksumMismatch).exit_code(), exit::INDEX);
        assert_eq!(CliError::UnknownNode(9).exit_code(), exit::QUERY);
        assert_eq!(CliError::UnknownNode(9).kind(), "unknown_node");
        let json: serde_json::Value = serde_json::from_str(&CliError::UnknownNode(9).to_json()).unwrap();
        assert_eq!(json["error"], "unknown_node");
    }
}
