//! Seeded synthetic graphs: preferential attachment and G(n, p), plus the
//! small fixed shapes used throughout the tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;
use crate::graph::{Graph, NodeId};

/// Barabási–Albert preferential attachment.
///
/// Starts from a clique on `edges_per_node + 1` nodes; every later node
/// attaches to `edges_per_node` distinct existing nodes picked with
/// probability proportional to their current degree. The result is
/// connected and has `k(k+1)/2 + (n-k-1)k` edges.
pub fn barabasi_albert(n: usize, edges_per_node: usize, seed: u64) -> Result<Graph, GraphError> {
    let k = edges_per_node;
    if k < 1 || n <= k {
        return Err(GraphError::InvalidParameter(format!(
            "preferential attachment needs n > edges_per_node >= 1 (n={n}, edges_per_node={k})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(n * k);
    // Each endpoint occurrence; sampling uniformly from it is degree-proportional.
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * n * k);
    for u in 0..=k as NodeId {
        for v in 0..u {
            edges.push((v, u));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut chosen: Vec<NodeId> = Vec::with_capacity(k);
    for u in (k + 1) as NodeId..n as NodeId {
        chosen.clear();
        while chosen.len() < k {
            let v = endpoints[rng.gen_range(0..endpoints.len())];
            if !chosen.contains(&v) {
                chosen.push(v);
            }
        }
        for &v in &chosen {
            edges.push((v, u));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    Graph::from_unweighted_edges(n, edges)
}

/// Erdős–Rényi G(n, p): every unordered pair independently with
/// probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidParameter(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in (u + 1)..n as NodeId {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_unweighted_edges(n, edges)
}

/// Copies `g` with independent uniform integer weights in `1..=max_weight`.
/// Integer weights keep every path sum exact in `f64`.
pub fn with_random_weights(g: &Graph, max_weight: u32, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<_> = g
        .edges()
        .map(|(u, v, _)| (u, v, rng.gen_range(1..=max_weight.max(1)) as f64))
        .collect();
    Graph::from_edges(g.node_count(), edges, true).expect("weights are valid")
}

/// `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Graph {
    Graph::from_unweighted_edges(n, (1..n as NodeId).map(|v| (v - 1, v))).expect("valid path")
}

pub fn cycle(n: usize) -> Graph {
    let edges = (0..n as NodeId).map(|v| (v, (v + 1) % n as NodeId));
    Graph::from_unweighted_edges(n, edges).expect("valid cycle")
}

/// Hub `0` joined to `leaves` leaf nodes.
pub fn star(leaves: usize) -> Graph {
    Graph::from_unweighted_edges(leaves + 1, (1..=leaves as NodeId).map(|v| (0, v))).expect("valid star")
}

pub fn complete(n: usize) -> Graph {
    let edges = (0..n as NodeId).flat_map(|u| ((u + 1)..n as NodeId).map(move |v| (u, v)));
    Graph::from_unweighted_edges(n, edges).expect("valid clique")
}
