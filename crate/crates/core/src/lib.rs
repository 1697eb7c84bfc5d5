//! Exact shortest-path distance oracle built from per-node vicinities and a
//! degree-biased landmark set.
//!
//! Build once with [`build_oracle`], then answer queries with
//! [`Oracle::query_distance`] and [`Oracle::query_path`]. Pairs whose
//! vicinities do not meet come back as [`Method::NotFound`];
//! [`Oracle::query_with_fallback`] resolves those with an exact search.

pub mod baselines;
pub mod distance;
pub mod error;
pub mod generators;
pub mod graph;
pub mod landmarks;
pub mod oracle;
pub mod par;
pub mod persistence;
pub mod query;
mod sssp;
pub mod vicinity;

pub use baselines::{
    all_pairs_reference, bfs_distance, bidirectional_bfs, dijkstra_distance, exact_search, validate_path,
    DistanceMatrix, Search, SearchResult, SearchScratch, SearchStats,
};
pub use distance::{Distance, DistanceKind};
pub use error::{BuildError, GraphError, LoadError, QueryError, SearchError};
pub use graph::{
    connected_components, largest_connected_component, parse_edge_list, ComponentMap, Graph, NodeId, ParseOptions,
    NO_NODE,
};
pub use landmarks::{inclusion_probability, sample_landmarks, LandmarkSet, LandmarkTable};
pub use oracle::{build_oracle, build_oracle_with_landmarks, BuildStats, Oracle};
pub use par::{WorkerPool, PARALLEL};
pub use persistence::{inspect_index, load_oracle, read_header, save_oracle, IndexHeader, IndexSummary};
pub use query::{match_vicinities, Method, QueryResult};
pub use vicinity::{build_vicinity, Entry, VicinityTable};
