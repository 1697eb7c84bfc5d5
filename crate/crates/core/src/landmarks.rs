//! Degree-proportional landmark sampling, nearest-landmark radii, and full
//! per-landmark shortest-path tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distance::Distance;
use crate::error::BuildError;
use crate::graph::{connected_components, Graph, NodeId, NO_NODE};
use crate::par::WorkerPool;
use crate::sssp;

/// Probability that a node of degree `degree` is sampled as a landmark:
/// `min(1, 2·deg / (alpha·√n))`.
pub fn inclusion_probability(degree: usize, node_count: usize, alpha: f64) -> f64 {
    if node_count == 0 {
        return 0.0;
    }
    (2.0 * degree as f64 / (alpha * (node_count as f64).sqrt())).min(1.0)
}

/// Landmark members plus each node's nearest landmark and its distance.
#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkSet<D> {
    members: Vec<NodeId>,
    /// Position of a node in `members`, or `NO_NODE`.
    slot: Vec<u32>,
    nearest: Vec<NodeId>,
    radius: Vec<D>,
}

impl<D: Distance> LandmarkSet<D> {
    /// Uses `members` as the landmark set, adding the highest-degree node
    /// (smallest id on ties) of every component that has none.
    pub fn from_members(g: &Graph, members: impl IntoIterator<Item = NodeId>) -> Self {
        let n = g.node_count();
        let mut chosen = vec![false; n];
        for m in members {
            chosen[m as usize] = true;
        }
        let comps = connected_components(g);
        let mut covered = vec![false; comps.count()];
        // Per component: (degree, node) of the best fallback candidate.
        let mut best: Vec<Option<(usize, NodeId)>> = vec![None; comps.count()];
        for (u, &is_chosen) in chosen.iter().enumerate() {
            let c = comps.component_id[u] as usize;
            covered[c] |= is_chosen;
            let d = g.degree(u as NodeId);
            if best[c].is_none_or(|(bd, _)| d > bd) {
                best[c] = Some((d, u as NodeId));
            }
        }
        for (c, is_covered) in covered.iter().enumerate() {
            if !is_covered {
                chosen[best[c].unwrap().1 as usize] = true;
            }
        }
        let members: Vec<NodeId> = (0..n as NodeId).filter(|&u| chosen[u as usize]).collect();
        let mut slot = vec![NO_NODE; n];
        for (i, &m) in members.iter().enumerate() {
            slot[m as usize] = i as u32;
        }
        let (nearest, radius) = sssp::nearest_sources::<D>(g, &members);
        LandmarkSet {
            members,
            slot,
            nearest,
            radius,
        }
    }

    pub(crate) fn from_parts(members: Vec<NodeId>, nearest: Vec<NodeId>, radius: Vec<D>) -> Self {
        let mut slot = vec![NO_NODE; nearest.len()];
        for (i, &m) in members.iter().enumerate() {
            slot[m as usize] = i as u32;
        }
        LandmarkSet {
            members,
            slot,
            nearest,
            radius,
        }
    }

    /// Sorted landmark ids.
    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, u: NodeId) -> bool {
        self.slot[u as usize] != NO_NODE
    }

    /// Index of `u` in [`LandmarkSet::members`].
    #[inline]
    pub fn position(&self, u: NodeId) -> Option<usize> {
        let s = self.slot[u as usize];
        (s != NO_NODE).then_some(s as usize)
    }

    #[inline]
    pub fn nearest(&self, u: NodeId) -> NodeId {
        self.nearest[u as usize]
    }

    /// Distance from `u` to its nearest landmark.
    #[inline]
    pub fn radius(&self, u: NodeId) -> D {
        self.radius[u as usize]
    }

    pub fn radii(&self) -> &[D] {
        &self.radius
    }

    pub fn nearest_all(&self) -> &[NodeId] {
        &self.nearest
    }
}

/// Samples each node independently with [`inclusion_probability`], using
/// one draw per node in id order from a ChaCha8 stream seeded by `seed`.
/// Components left without a landmark receive their highest-degree node.
pub fn sample_landmarks<D: Distance>(g: &Graph, alpha: f64, seed: u64) -> Result<LandmarkSet<D>, BuildError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(BuildError::InvalidAlpha(alpha));
    }
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members = Vec::new();
    for u in 0..n as NodeId {
        let p = inclusion_probability(g.degree(u), n, alpha);
        let draw: f64 = rng.gen();
        if draw < p {
            members.push(u);
        }
    }
    Ok(LandmarkSet::from_members(g, members))
}

/// Exact distances and shortest-path-tree parents from one landmark to
/// every node.
#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkTable<D> {
    landmark: NodeId,
    dist: Vec<D>,
    parent: Vec<NodeId>,
}

impl<D: Distance> LandmarkTable<D> {
    pub fn build(g: &Graph, landmark: NodeId) -> Self {
        let (dist, parent) = sssp::shortest_path_tree(g, landmark);
        LandmarkTable { landmark, dist, parent }
    }

    pub(crate) fn from_parts(landmark: NodeId, dist: Vec<D>, parent: Vec<NodeId>) -> Self {
        LandmarkTable { landmark, dist, parent }
    }

    pub fn landmark(&self) -> NodeId {
        self.landmark
    }

    /// `INFINITY` when `v` is in another component.
    #[inline]
    pub fn distance(&self, v: NodeId) -> D {
        self.dist[v as usize]
    }

    /// Next node from `v` toward the landmark; `NO_NODE` at the landmark
    /// and for unreachable nodes.
    #[inline]
    pub fn parent(&self, v: NodeId) -> NodeId {
        self.parent[v as usize]
    }

    pub fn distances(&self) -> &[D] {
        &self.dist
    }

    pub fn parents(&self) -> &[NodeId] {
        &self.parent
    }

    /// Nodes from `v` up to the landmark, inclusive. `None` if unreachable.
    pub fn path_to_landmark(&self, v: NodeId) -> Option<Vec<NodeId>> {
        if !self.dist[v as usize].is_finite() {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while cur != self.landmark {
            cur = self.parent[cur as usize];
            path.push(cur);
        }
        Some(path)
    }
}

/// One full table per landmark, in member order.
pub fn build_landmark_tables<D: Distance>(
    g: &Graph,
    landmarks: &LandmarkSet<D>,
    pool: &WorkerPool,
) -> Vec<LandmarkTable<D>> {
    let members = landmarks.members();
    pool.map(members.len(), || (), |_, i| LandmarkTable::build(g, members[i]))
}
