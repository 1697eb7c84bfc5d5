//! Offline construction of the full index.

use std::time::Instant;

use serde::Serialize;

use crate::distance::{Distance, DistanceKind};
use crate::error::BuildError;
use crate::graph::{Graph, NodeId};
use crate::landmarks::{build_landmark_tables, sample_landmarks, LandmarkSet, LandmarkTable};
use crate::par::WorkerPool;
use crate::vicinity::{build_vicinity_with, VicinityScratch, VicinityTable};

/// A built distance oracle: landmark tables for every landmark and a
/// vicinity table for every node.
pub struct Oracle<D> {
    pub(crate) graph: Graph,
    pub(crate) alpha: f64,
    pub(crate) seed: u64,
    pub(crate) landmarks: LandmarkSet<D>,
    pub(crate) landmark_tables: Vec<LandmarkTable<D>>,
    pub(crate) vicinities: Vec<VicinityTable<D>>,
    pub(crate) stats: BuildStats,
}

/// Summary of a build, printed as JSON by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BuildStats {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub seed: u64,
    pub distance_kind: DistanceKind,
    pub landmark_count: usize,
    pub mean_vicinity_size: f64,
    pub max_vicinity_size: usize,
    pub mean_ball_size: f64,
    pub mean_boundary_size: f64,
    pub max_boundary_size: usize,
    /// Mean distance to the nearest landmark.
    pub mean_radius: f64,
    pub max_radius: f64,
    /// Σ|Γ(u)|
    pub vicinity_entries: u64,
    /// |L|·n
    pub landmark_entries: u64,
    pub transit_entries: u64,
    pub workers: usize,
    pub build_seconds: f64,
}

impl BuildStats {
    pub(crate) fn collect<D: Distance>(
        g: &Graph,
        alpha: f64,
        seed: u64,
        landmarks: &LandmarkSet<D>,
        vicinities: &[VicinityTable<D>],
        workers: usize,
        build_seconds: f64,
    ) -> Self {
        let n = g.node_count();
        let nf = n.max(1) as f64;
        let sum = |f: &dyn Fn(&VicinityTable<D>) -> usize| vicinities.iter().map(f).sum::<usize>();
        let max = |f: &dyn Fn(&VicinityTable<D>) -> usize| vicinities.iter().map(f).max().unwrap_or(0);
        let finite_radii = || landmarks.radii().iter().filter(|r| r.is_finite()).map(|r| r.to_f64());
        BuildStats {
            n,
            m: g.edge_count(),
            alpha,
            seed,
            distance_kind: D::KIND,
            landmark_count: landmarks.len(),
            mean_vicinity_size: sum(&|v| v.len()) as f64 / nf,
            max_vicinity_size: max(&|v| v.len()),
            mean_ball_size: sum(&|v| v.ball_size()) as f64 / nf,
            mean_boundary_size: sum(&|v| v.boundary_len()) as f64 / nf,
            max_boundary_size: max(&|v| v.boundary_len()),
            mean_radius: finite_radii().sum::<f64>() / nf,
            max_radius: finite_radii().fold(0.0, f64::max),
            vicinity_entries: sum(&|v| v.len()) as u64,
            landmark_entries: (landmarks.len() * n) as u64,
            transit_entries: sum(&|v| v.transit().len()) as u64,
            workers,
            build_seconds,
        }
    }
}

/// Samples landmarks from `(alpha, seed)` and builds the oracle on
/// `workers` threads (0 = all available). The result does not depend on
/// `workers`.
pub fn build_oracle<D: Distance>(g: Graph, alpha: f64, seed: u64, workers: usize) -> Result<Oracle<D>, BuildError> {
    check_inputs::<D>(&g, alpha)?;
    let start = Instant::now();
    let landmarks = sample_landmarks::<D>(&g, alpha, seed)?;
    finish_build(g, alpha, seed, landmarks, workers, start)
}

/// Builds with a caller-chosen landmark set (components without a member
/// still get their highest-degree node).
pub fn build_oracle_with_landmarks<D: Distance>(
    g: Graph,
    alpha: f64,
    seed: u64,
    members: &[NodeId],
    workers: usize,
) -> Result<Oracle<D>, BuildError> {
    check_inputs::<D>(&g, alpha)?;
    let start = Instant::now();
    let landmarks = LandmarkSet::from_members(&g, members.iter().copied());
    finish_build(g, alpha, seed, landmarks, workers, start)
}

fn check_inputs<D: Distance>(g: &Graph, alpha: f64) -> Result<(), BuildError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(BuildError::InvalidAlpha(alpha));
    }
    if g.node_count() == 0 {
        return Err(BuildError::EmptyGraph);
    }
    if D::HOPS && g.is_weighted() {
        return Err(BuildError::WeightedGraph);
    }
    Ok(())
}

fn finish_build<D: Distance>(
    g: Graph,
    alpha: f64,
    seed: u64,
    landmarks: LandmarkSet<D>,
    workers: usize,
    start: Instant,
) -> Result<Oracle<D>, BuildError> {
    let pool = WorkerPool::new(workers)?;
    let landmark_tables = build_landmark_tables(&g, &landmarks, &pool);
    let vicinities = build_vicinities(&g, &landmarks, &pool);
    let stats = BuildStats::collect(
        &g,
        alpha,
        seed,
        &landmarks,
        &vicinities,
        pool.threads(),
        start.elapsed().as_secs_f64(),
    );
    Ok(Oracle {
        graph: g,
        alpha,
        seed,
        landmarks,
        landmark_tables,
        vicinities,
        stats,
    })
}

/// Vicinity of every node, in node order.
pub fn build_vicinities<D: Distance>(
    g: &Graph,
    landmarks: &LandmarkSet<D>,
    pool: &WorkerPool,
) -> Vec<VicinityTable<D>> {
    let n = g.node_count();
    pool.map(
        n,
        || VicinityScratch::new(n),
        |scratch, u| build_vicinity_with(g, u as NodeId, landmarks, scratch),
    )
}

impl<D: Distance> Oracle<D> {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn landmarks(&self) -> &LandmarkSet<D> {
        &self.landmarks
    }

    pub fn landmark_tables(&self) -> &[LandmarkTable<D>] {
        &self.landmark_tables
    }

    /// Table of a landmark node.
    pub fn landmark_table(&self, u: NodeId) -> Option<&LandmarkTable<D>> {
        self.landmarks.position(u).map(|i| &self.landmark_tables[i])
    }

    pub fn vicinity(&self, u: NodeId) -> &VicinityTable<D> {
        &self.vicinities[u as usize]
    }

    pub fn vicinities(&self) -> &[VicinityTable<D>] {
        &self.vicinities
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Approximate in-memory size of the vicinity and landmark tables.
    pub fn heap_bytes(&self) -> usize {
        let vic: usize = self.vicinities.iter().map(|v| v.heap_bytes()).sum();
        let lm = self.landmark_tables.len() * self.node_count() * (D::WIDTH + 4);
        vic + lm
    }

    /// Releases the graph, e.g. to rebuild with another alpha.
    pub fn into_graph(self) -> Graph {
        self.graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::path;

    #[test]
    fn path_oracle_matches_hand_built_parts() {
        let oracle = build_oracle_with_landmarks::<u32>(path(5), 4.0, 1, &[2], 1).unwrap();
        assert_eq!(oracle.landmarks().members(), &[2]);
        let v0 = oracle.vicinity(0);
        assert_eq!(v0.boundary_nodes(), &[2]);
        assert_eq!(v0.distance(2), Some(2));
        assert!(oracle.vicinity(2).is_empty());
        let stats = oracle.stats();
        assert_eq!(stats.landmark_count, 1);
        // |Γ| per node: 3, 3, 0, 3, 3
        assert_eq!(stats.mean_vicinity_size, 12.0 / 5.0);
        assert_eq!(stats.max_boundary_size, 1);
        assert_eq!(stats.mean_radius, 6.0 / 5.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            build_oracle::<u32>(path(3), 0.0, 1, 1),
            Err(BuildError::InvalidAlpha(_))
        ));
        let empty = Graph::from_unweighted_edges(0, []).unwrap();
        assert!(matches!(
            build_oracle::<u32>(empty, 1.0, 1, 1),
            Err(BuildError::EmptyGraph)
        ));
        let weighted = Graph::from_edges(2, [(0, 1, 2.0)], true).unwrap();
        assert!(matches!(
            build_oracle::<u32>(weighted.clone(), 1.0, 1, 1),
            Err(BuildError::WeightedGraph)
        ));
        assert!(build_oracle::<f64>(weighted, 1.0, 1, 1).is_ok());
    }
}
