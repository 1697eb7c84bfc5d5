use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vicinity_core::{generators, largest_connected_component, parse_edge_list, Graph, ParseOptions};

use crate::error::BenchError;

/// Where the experiment graph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSource {
    BarabasiAlbert {
        n: usize,
        k: usize,
        seed: u64,
    },
    ErdosRenyi {
        n: usize,
        p: f64,
        seed: u64,
    },
    /// Whitespace-separated edge list, read as undirected and unweighted.
    EdgeList {
        path: PathBuf,
        #[serde(default = "yes")]
        largest_component: bool,
    },
}

fn yes() -> bool {
    true
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph, BenchError> {
        Ok(match self {
            GraphSource::BarabasiAlbert { n, k, seed } => generators::barabasi_albert(*n, *k, *seed)?,
            GraphSource::ErdosRenyi { n, p, seed } => generators::erdos_renyi(*n, *p, *seed)?,
            GraphSource::EdgeList {
                path,
                largest_component,
            } => {
                let reader = BufReader::new(File::open(path)?);
                let g = parse_edge_list(
                    reader,
                    ParseOptions {
                        treat_as_undirected: true,
                        weighted: false,
                    },
                )?;
                if *largest_component {
                    largest_connected_component(&g)?.0
                } else {
                    g
                }
            }
        })
    }

    /// Human-readable account of how the graph was prepared.
    pub fn preprocessing(&self) -> String {
        match self {
            GraphSource::BarabasiAlbert { n, k, seed } => {
                format!("synthetic Barabasi-Albert n={n} k={k} seed={seed}; connected by construction")
            }
            GraphSource::ErdosRenyi { n, p, seed } => {
                format!("synthetic G(n,p) n={n} p={p} seed={seed}; used as generated")
            }
            GraphSource::EdgeList {
                path,
                largest_component,
            } => format!(
                "edge list {}; symmetrized, weights ignored, self-loops and duplicates dropped{}",
                path.display(),
                if *largest_component {
                    ", restricted to the largest connected component"
                } else {
                    ""
                }
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    /// Every unordered pair of distinct sampled nodes.
    #[default]
    AllPairsOfSample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    /// Sweep for the intersection and radius experiments.
    pub alphas: Vec<f64>,
    pub nodes_per_trial: usize,
    pub trials: usize,
    pub seed: u64,
    pub pair_mode: PairMode,
    /// Alpha for the boundary CDF.
    pub property_alpha: f64,
    /// Number of points on the boundary CDF, including both ends.
    pub cdf_points: usize,
    pub latency_alpha: f64,
    pub latency_pairs: usize,
    /// Share of oracle answers re-checked against bidirectional BFS.
    pub cross_check_rate: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph: GraphSource::BarabasiAlbert {
                n: 100_000,
                k: 5,
                seed: 1,
            },
            alphas: vec![1.0 / 16.0, 1.0 / 8.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            nodes_per_trial: 200,
            trials: 5,
            seed: 1,
            pair_mode: PairMode::AllPairsOfSample,
            property_alpha: 4.0,
            cdf_points: 101,
            latency_alpha: 4.0,
            latency_pairs: 1000,
            cross_check_rate: 0.01,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, BenchError> {
        let cfg: ExperimentConfig = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: String| Err(BenchError::InvalidConfig(msg));
        if self.alphas.is_empty() {
            return bad("alphas is empty".into());
        }
        for &a in self.alphas.iter().chain([&self.property_alpha, &self.latency_alpha]) {
            if !(a.is_finite() && a > 0.0) {
                return bad(format!("alpha {a} is not positive"));
            }
        }
        if self.nodes_per_trial < 2 {
            return bad(format!("nodes_per_trial is {}, need at least 2", self.nodes_per_trial));
        }
        if self.trials == 0 {
            return bad("trials is 0".into());
        }
        if self.cdf_points < 2 {
            return bad("cdf_points must be at least 2".into());
        }
        if !(0.0..=1.0).contains(&self.cross_check_rate) {
            return bad(format!("cross_check_rate {} outside [0, 1]", self.cross_check_rate));
        }
        Ok(())
    }
}
