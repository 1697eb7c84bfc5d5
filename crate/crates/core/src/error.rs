use std::io;

use crate::graph::NodeId;

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: weight {weight} is not a finite non-negative number")]
    InvalidWeight { line: usize, weight: f64 },
    #[error("edge {from}->{to} has no reverse edge and symmetrization is disabled")]
    Asymmetric { from: u64, to: u64 },
    #[error("graph has no nodes")]
    Empty,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("alpha must be a positive finite number, got {0}")]
    InvalidAlpha(f64),
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("hop-count distances require an unweighted graph")]
    WeightedGraph,
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
}

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("node {node} is out of range (graph has {node_count} nodes)")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("node {node} is out of range (graph has {node_count} nodes)")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("breadth-first search needs an unweighted graph; use Dijkstra instead")]
    WeightedGraph,
    #[error("all-pairs reference is capped at {cap} nodes, graph has {node_count}")]
    TooLarge { node_count: usize, cap: usize },
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported index format version {found} (supported: {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("index header is truncated")]
    TruncatedHeader,
    #[error("payload checksum mismatch")]
    ChecksumMismatch,
    #[error("index was built for a different graph ({0})")]
    GraphMismatch(String),
    #[error("index stores {found} distances but {expected} were requested")]
    DistanceKind {
        expected: &'static str,
        found: &'static str,
    },
    #[error("malformed payload: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}
