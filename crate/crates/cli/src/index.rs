//! Loading graphs and indexes whose distance type is only known at run
//! time.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use vicinity_core::{
    build_oracle, build_oracle_with_landmarks, load_oracle, parse_edge_list, read_header, save_oracle, BuildStats,
    Distance, DistanceKind, Graph, IndexHeader, NodeId, Oracle, ParseOptions, QueryResult, Search,
};

use crate::error::CliError;
use crate::response::{Dist, QueryResponse};

pub fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::io(path, e))
}

pub fn read_graph(path: &Path, options: ParseOptions) -> Result<Graph, CliError> {
    Ok(parse_edge_list(BufReader::new(open(path)?), options)?)
}

pub fn read_index_header(path: &Path) -> Result<IndexHeader, CliError> {
    Ok(read_header(BufReader::new(open(path)?))?)
}

pub enum AnyOracle {
    Hops(Oracle<u32>),
    Real(Oracle<f64>),
}

macro_rules! each {
    ($self:expr, $o:ident => $body:expr) => {
        match $self {
            AnyOracle::Hops($o) => $body,
            AnyOracle::Real($o) => $body,
        }
    };
}

/// What to compute for one query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuerySpec {
    pub want_path: bool,
    pub fallback: Option<Search>,
}

impl AnyOracle {
    /// Builds on `graph`; weighted graphs get real-valued distances.
    /// `landmarks` are original node labels.
    pub fn build(
        graph: Graph,
        alpha: f64,
        seed: u64,
        workers: usize,
        landmarks: Option<&[u64]>,
    ) -> Result<Self, CliError> {
        let members = match landmarks {
            Some(labels) => Some(
                labels
                    .iter()
                    .map(|&l| graph.node_by_label(l).ok_or(CliError::UnknownNode(l)))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            None => None,
        };
        fn go<D: Distance>(
            g: Graph,
            alpha: f64,
            seed: u64,
            workers: usize,
            members: Option<Vec<NodeId>>,
        ) -> Result<Oracle<D>, CliError> {
            Ok(match members {
                Some(m) => build_oracle_with_landmarks(g, alpha, seed, &m, workers)?,
                None => build_oracle(g, alpha, seed, workers)?,
            })
        }
        Ok(if graph.is_weighted() {
            AnyOracle::Real(go(graph, alpha, seed, workers, members)?)
        } else {
            AnyOracle::Hops(go(graph, alpha, seed, workers, members)?)
        })
    }

    /// Loads `index` against the edge list it was built from. The header
    /// decides whether the edge list is read with weights.
    pub fn load(index: &Path, graph_path: &Path, symmetric_input: bool) -> Result<Self, CliError> {
        let header = read_index_header(index)?;
        let weighted = header.distance_kind == DistanceKind::Real;
        let graph = read_graph(
            graph_path,
            ParseOptions {
                treat_as_undirected: !symmetric_input,
                weighted,
            },
        )?;
        let reader = BufReader::new(open(index)?);
        Ok(if weighted {
            AnyOracle::Real(load_oracle(reader, graph)?)
        } else {
            AnyOracle::Hops(load_oracle(reader, graph)?)
        })
    }

    pub fn save(&self, path: &Path) -> Result<u64, CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        each!(self, o => save_oracle(o, file)).map_err(|e| CliError::io(path, e))
    }

    pub fn stats(&self) -> &BuildStats {
        each!(self, o => o.stats())
    }

    pub fn graph(&self) -> &Graph {
        each!(self, o => o.graph())
    }

    pub fn header(&self) -> IndexHeader {
        each!(self, o => o.index_header())
    }

    /// Answers a query between original node labels.
    pub fn query(&self, s: u64, t: u64, spec: QuerySpec) -> Result<QueryResponse, CliError> {
        let g = self.graph();
        let si = g.node_by_label(s).ok_or(CliError::UnknownNode(s))?;
        let ti = g.node_by_label(t).ok_or(CliError::UnknownNode(t))?;
        let start = Instant::now();
        let response = match self {
            AnyOracle::Hops(o) => respond(o, run(o, si, ti, spec)?, spec, Dist::Hops),
            AnyOracle::Real(o) => respond(o, run(o, si, ti, spec)?, spec, Dist::Real),
        };
        let micros = (start.elapsed().as_secs_f64() * 1e9).round() / 1e3;
        Ok(QueryResponse { micros, ..response })
    }
}

fn run<D: Distance>(o: &Oracle<D>, s: NodeId, t: NodeId, spec: QuerySpec) -> Result<QueryResult<D>, CliError> {
    Ok(match spec.fallback {
        Some(search) => o.query_with_fallback(s, t, search, spec.want_path)?,
        None if spec.want_path => o.query_path(s, t)?,
        None => o.query_distance(s, t)?,
    })
}

fn respond<D: Distance>(o: &Oracle<D>, r: QueryResult<D>, spec: QuerySpec, wrap: fn(D) -> Dist) -> QueryResponse {
    let g = o.graph();
    QueryResponse {
        distance: r.distance.map(wrap),
        method: r.method.as_str(),
        path: spec
            .want_path
            .then(|| r.path.map(|p| p.into_iter().map(|v| g.label(v)).collect())),
        probes: r.probes,
        micros: 0.0,
    }
}
