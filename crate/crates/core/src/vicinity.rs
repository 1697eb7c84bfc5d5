//! Per-node vicinities: the ball of nodes strictly closer than the nearest
//! landmark, its neighbors, exact distances, and shortest-path-tree parents.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::distance::Distance;
use crate::graph::{Graph, NodeId, NO_NODE};
use crate::landmarks::LandmarkSet;

/// Open-addressing index from node id to entry position.
///
/// Linear probing over `2·len + 1` slots. Narrow slots are used whenever
/// the entry count fits in 16 bits.
#[derive(Clone, Debug)]
enum SlotIndex {
    Narrow(Box<[u16]>),
    Wide(Box<[u32]>),
}

#[inline]
fn home_slot(key: NodeId, capacity: usize) -> usize {
    let h = key.wrapping_mul(0x9E37_79B1);
    ((h as u64 * capacity as u64) >> 32) as usize
}

impl SlotIndex {
    fn build(nodes: &[NodeId]) -> Self {
        let capacity = if nodes.is_empty() { 0 } else { 2 * nodes.len() + 1 };
        if nodes.len() < u16::MAX as usize {
            let mut slots = vec![u16::MAX; capacity];
            for (i, &v) in nodes.iter().enumerate() {
                let mut s = home_slot(v, capacity);
                while slots[s] != u16::MAX {
                    s = if s + 1 == capacity { 0 } else { s + 1 };
                }
                slots[s] = i as u16;
            }
            SlotIndex::Narrow(slots.into_boxed_slice())
        } else {
            let mut slots = vec![u32::MAX; capacity];
            for (i, &v) in nodes.iter().enumerate() {
                let mut s = home_slot(v, capacity);
                while slots[s] != u32::MAX {
                    s = if s + 1 == capacity { 0 } else { s + 1 };
                }
                slots[s] = i as u32;
            }
            SlotIndex::Wide(slots.into_boxed_slice())
        }
    }

    #[inline]
    fn find(&self, nodes: &[NodeId], key: NodeId) -> Option<usize> {
        match self {
            SlotIndex::Narrow(slots) => probe(slots, u16::MAX, nodes, key),
            SlotIndex::Wide(slots) => probe(slots, u32::MAX, nodes, key),
        }
    }

    fn heap_bytes(&self) -> usize {
        match self {
            SlotIndex::Narrow(s) => s.len() * 2,
            SlotIndex::Wide(s) => s.len() * 4,
        }
    }
}

#[inline]
fn probe<S: Copy + PartialEq + Into<u32>>(slots: &[S], empty: S, nodes: &[NodeId], key: NodeId) -> Option<usize> {
    let capacity = slots.len();
    if capacity == 0 {
        return None;
    }
    let mut s = home_slot(key, capacity);
    loop {
        let e = slots[s];
        if e == empty {
            return None;
        }
        let idx = e.into() as usize;
        if nodes[idx] == key {
            return Some(idx);
        }
        s = if s + 1 == capacity { 0 } else { s + 1 };
    }
}

/// One stored vicinity entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry<D> {
    pub node: NodeId,
    pub dist: D,
    /// Neighbor of `node` preceding it on a shortest path from the owner;
    /// `NO_NODE` for the owner itself.
    pub parent: NodeId,
}

/// The vicinity of one node.
///
/// Entries are laid out boundary-first: positions `0..boundary_len` hold
/// the boundary nodes, the rest the interior, each run sorted by node id.
/// On weighted graphs a shortest path to a vicinity node can pass through
/// nodes outside the vicinity; those are kept as `transit` entries so every
/// parent chain resolves inside this table.
#[derive(Clone, Debug)]
pub struct VicinityTable<D> {
    owner: NodeId,
    nodes: Box<[NodeId]>,
    dist: Box<[D]>,
    parent: Box<[NodeId]>,
    boundary_len: u32,
    ball_size: u32,
    index: SlotIndex,
    transit: Box<[Entry<D>]>,
}

impl<D: Distance> VicinityTable<D> {
    /// Empty table, as stored for landmarks.
    pub fn empty(owner: NodeId) -> Self {
        Self::from_entries(owner, Vec::new(), &[], 0, Vec::new())
    }

    /// Assembles a table from its entries. `is_boundary[i]` flags
    /// `entries[i]`; `transit` entries are not vicinity members.
    pub fn from_entries(
        owner: NodeId,
        entries: Vec<Entry<D>>,
        is_boundary: &[bool],
        ball_size: usize,
        mut transit: Vec<Entry<D>>,
    ) -> Self {
        debug_assert_eq!(entries.len(), is_boundary.len());
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_unstable_by_key(|&i| (!is_boundary[i], entries[i].node));
        let nodes: Box<[NodeId]> = order.iter().map(|&i| entries[i].node).collect();
        let dist = order.iter().map(|&i| entries[i].dist).collect();
        let parent = order.iter().map(|&i| entries[i].parent).collect();
        let boundary_len = is_boundary.iter().filter(|&&b| b).count() as u32;
        let index = SlotIndex::build(&nodes);
        transit.sort_unstable_by_key(|e| e.node);
        VicinityTable {
            owner,
            nodes,
            dist,
            parent,
            boundary_len,
            ball_size: ball_size as u32,
            index,
            transit: transit.into_boxed_slice(),
        }
    }

    pub fn owner(&self) -> NodeId {
        self.owner
    }

    /// |Γ(u)|
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// |B(u)|
    pub fn ball_size(&self) -> usize {
        self.ball_size as usize
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary_len as usize
    }

    /// Position of `v` among the entries.
    #[inline]
    pub fn find(&self, v: NodeId) -> Option<usize> {
        self.index.find(&self.nodes, v)
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.find(v).is_some()
    }

    /// Exact distance from the owner to `v` if `v` is in the vicinity.
    #[inline]
    pub fn distance(&self, v: NodeId) -> Option<D> {
        self.find(v).map(|i| self.dist[i])
    }

    #[inline]
    pub fn entry(&self, idx: usize) -> Entry<D> {
        Entry {
            node: self.nodes[idx],
            dist: self.dist[idx],
            parent: self.parent[idx],
        }
    }

    /// Boundary nodes with their distances, ascending by node id.
    #[inline]
    pub fn boundary(&self) -> impl Iterator<Item = (NodeId, D)> + '_ {
        let b = self.boundary_len as usize;
        self.nodes[..b].iter().copied().zip(self.dist[..b].iter().copied())
    }

    pub fn boundary_nodes(&self) -> &[NodeId] {
        &self.nodes[..self.boundary_len as usize]
    }

    pub fn is_boundary_entry(&self, idx: usize) -> bool {
        idx < self.boundary_len as usize
    }

    /// All entries in storage order (boundary first).
    pub fn entries(&self) -> impl Iterator<Item = Entry<D>> + '_ {
        (0..self.nodes.len()).map(move |i| self.entry(i))
    }

    pub fn transit(&self) -> &[Entry<D>] {
        &self.transit
    }

    /// Parent of `v` in the owner's shortest-path tree, looking through
    /// vicinity and transit entries.
    pub fn parent_of(&self, v: NodeId) -> Option<NodeId> {
        if let Some(i) = self.find(v) {
            return Some(self.parent[i]);
        }
        self.transit
            .binary_search_by_key(&v, |e| e.node)
            .ok()
            .map(|i| self.transit[i].parent)
    }

    /// Walks parents from `v` back to the owner: `[v, ..., owner]`.
    pub fn path_to_owner(&self, v: NodeId) -> Option<Vec<NodeId>> {
        let mut path = vec![v];
        let mut cur = v;
        while cur != self.owner {
            cur = self.parent_of(cur)?;
            if cur == NO_NODE {
                return None;
            }
            path.push(cur);
        }
        Some(path)
    }

    /// Approximate heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        self.nodes.len() * (8 + D::WIDTH)
            + self.index.heap_bytes()
            + self.transit.len() * std::mem::size_of::<Entry<D>>()
    }
}

/// Reusable per-worker buffers for [`build_vicinity_with`].
pub struct VicinityScratch<D> {
    epoch: u32,
    seen: Vec<u32>,
    member: Vec<u32>,
    settled: Vec<u32>,
    transit: Vec<u32>,
    dist: Vec<D>,
    parent: Vec<NodeId>,
    order: Vec<NodeId>,
    heap: BinaryHeap<Reverse<(u64, NodeId)>>,
}

impl<D: Distance> VicinityScratch<D> {
    pub fn new(node_count: usize) -> Self {
        VicinityScratch {
            epoch: 0,
            seen: vec![0; node_count],
            member: vec![0; node_count],
            settled: vec![0; node_count],
            transit: vec![0; node_count],
            dist: vec![D::INFINITY; node_count],
            parent: vec![NO_NODE; node_count],
            order: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.seen.fill(0);
            self.member.fill(0);
            self.settled.fill(0);
            self.transit.fill(0);
            self.epoch = 1;
        }
        self.order.clear();
        self.heap.clear();
        self.epoch
    }
}

/// Builds the vicinity of `u` with fresh scratch buffers.
pub fn build_vicinity<D: Distance>(g: &Graph, u: NodeId, landmarks: &LandmarkSet<D>) -> VicinityTable<D> {
    build_vicinity_with(g, u, landmarks, &mut VicinityScratch::new(g.node_count()))
}

/// Builds the vicinity of `u`: a shortest-path expansion from `u` truncated
/// once the ball (nodes closer than the nearest landmark) and all of its
/// neighbors carry exact distances. Landmarks get an empty table.
pub fn build_vicinity_with<D: Distance>(
    g: &Graph,
    u: NodeId,
    landmarks: &LandmarkSet<D>,
    scratch: &mut VicinityScratch<D>,
) -> VicinityTable<D> {
    let radius = landmarks.radius(u);
    if radius == D::ZERO {
        return VicinityTable::empty(u);
    }
    if D::HOPS {
        expand_hops(g, u, radius, scratch)
    } else {
        expand_weighted(g, u, radius, scratch)
    }
}

/// Unweighted case: the vicinity is exactly the nodes within `radius` hops,
/// and only nodes closer than `radius` are expanded.
fn expand_hops<D: Distance>(g: &Graph, u: NodeId, radius: D, s: &mut VicinityScratch<D>) -> VicinityTable<D> {
    let epoch = s.next_epoch();
    s.seen[u as usize] = epoch;
    s.dist[u as usize] = D::ZERO;
    s.parent[u as usize] = NO_NODE;
    s.order.push(u);
    let mut head = 0;
    let mut ball_size = 0;
    while head < s.order.len() {
        let x = s.order[head];
        head += 1;
        let dx = s.dist[x as usize];
        if dx >= radius {
            continue;
        }
        ball_size += 1;
        let next = dx + D::from_hops(1);
        for &y in g.neighbors(x) {
            if s.seen[y as usize] != epoch {
                s.seen[y as usize] = epoch;
                s.dist[y as usize] = next;
                s.parent[y as usize] = x;
                s.order.push(y);
            }
        }
    }
    let mut entries = Vec::with_capacity(s.order.len());
    let mut is_boundary = Vec::with_capacity(s.order.len());
    for &v in &s.order {
        let dv = s.dist[v as usize];
        // Ball nodes had every neighbor labelled.
        let boundary = dv >= radius && g.neighbors(v).iter().any(|&y| s.seen[y as usize] != epoch);
        entries.push(Entry {
            node: v,
            dist: dv,
            parent: s.parent[v as usize],
        });
        is_boundary.push(boundary);
    }
    VicinityTable::from_entries(u, entries, &is_boundary, ball_size, Vec::new())
}

/// Weighted case: Dijkstra from `u` runs until the ball is complete and
/// every neighbor of a ball node is settled, so vicinity distances are
/// exact even when a neighbor's shortest path leaves the ball.
fn expand_weighted<D: Distance>(g: &Graph, u: NodeId, radius: D, s: &mut VicinityScratch<D>) -> VicinityTable<D> {
    let epoch = s.next_epoch();
    s.seen[u as usize] = epoch;
    s.dist[u as usize] = D::ZERO;
    s.parent[u as usize] = NO_NODE;
    s.member[u as usize] = epoch;
    let mut members: Vec<NodeId> = vec![u];
    let mut ball_size = 0;
    let mut ball_done = false;
    // Vicinity members not yet settled.
    let mut pending = 0usize;
    s.heap.push(Reverse((D::ZERO.order_key(), u)));
    while let Some(Reverse((key, x))) = s.heap.pop() {
        let xi = x as usize;
        if s.settled[xi] == epoch || key != s.dist[xi].order_key() {
            continue;
        }
        s.settled[xi] = epoch;
        s.order.push(x);
        if x != u && s.member[xi] == epoch {
            pending -= 1;
        }
        let dx = s.dist[xi];
        if dx < radius {
            ball_size += 1;
            for &y in g.neighbors(x) {
                let yi = y as usize;
                if s.member[yi] != epoch {
                    s.member[yi] = epoch;
                    members.push(y);
                    // a settled non-member would be closer than a ball node
                    debug_assert!(s.settled[yi] != epoch);
                    pending += 1;
                }
            }
        } else {
            ball_done = true;
        }
        if ball_done && pending == 0 {
            break;
        }
        for e in g.edge_range(x) {
            let y = g.target(e);
            let yi = y as usize;
            if s.settled[yi] == epoch {
                continue;
            }
            let nd = dx + D::edge(g, e);
            if s.seen[yi] != epoch || nd < s.dist[yi] {
                s.seen[yi] = epoch;
                s.dist[yi] = nd;
                s.parent[yi] = x;
                s.heap.push(Reverse((nd.order_key(), y)));
            }
        }
    }

    let mut entries = Vec::with_capacity(members.len());
    let mut is_boundary = Vec::with_capacity(members.len());
    for &v in &members {
        let vi = v as usize;
        let dv = s.dist[vi];
        let boundary = dv >= radius && g.neighbors(v).iter().any(|&y| s.member[y as usize] != epoch);
        entries.push(Entry {
            node: v,
            dist: dv,
            parent: s.parent[vi],
        });
        is_boundary.push(boundary);
    }
    // Settled nodes outside the vicinity on the way back to `u`.
    let mut transit = Vec::new();
    for &v in &members {
        let mut p = s.parent[v as usize];
        while p != NO_NODE && s.member[p as usize] != epoch && s.transit[p as usize] != epoch {
            let pi = p as usize;
            s.transit[pi] = epoch;
            transit.push(Entry {
                node: p,
                dist: s.dist[pi],
                parent: s.parent[pi],
            });
            p = s.parent[pi];
        }
    }
    VicinityTable::from_entries(u, entries, &is_boundary, ball_size, transit)
}

/// Nodes of the vicinity having at least one neighbor outside it.
pub fn compute_boundary<D: Distance>(g: &Graph, vic: &VicinityTable<D>) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = vic
        .entries()
        .map(|e| e.node)
        .filter(|&v| g.neighbors(v).iter().any(|&x| !vic.contains(x)))
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, path};

    fn sorted_nodes<D: Distance>(vic: &VicinityTable<D>) -> Vec<NodeId> {
        let mut v: Vec<_> = vic.entries().map(|e| e.node).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn path_vicinity_of_endpoint() {
        let g = path(5);
        let l = LandmarkSet::<u32>::from_members(&g, [2]);
        let vic = build_vicinity(&g, 0, &l);
        assert_eq!(vic.ball_size(), 2);
        assert_eq!(sorted_nodes(&vic), vec![0, 1, 2]);
        assert_eq!(vic.boundary_nodes(), &[2]);
        assert_eq!(vic.distance(2), Some(2));
        assert_eq!(vic.parent_of(2), Some(1));
        assert_eq!(vic.path_to_owner(2), Some(vec![2, 1, 0]));
        assert_eq!(compute_boundary(&g, &vic), vec![2]);
    }

    #[test]
    fn landmark_has_empty_vicinity() {
        let g = path(5);
        let l = LandmarkSet::<u32>::from_members(&g, [2]);
        let vic = build_vicinity(&g, 2, &l);
        assert!(vic.is_empty());
        assert!(!vic.contains(2));
        assert_eq!(vic.boundary_len(), 0);
    }

    #[test]
    fn path_vicinity_next_to_landmark() {
        let g = path(5);
        let l = LandmarkSet::<u32>::from_members(&g, [2]);
        let vic = build_vicinity(&g, 1, &l);
        assert_eq!(vic.ball_size(), 1);
        assert_eq!(sorted_nodes(&vic), vec![0, 1, 2]);
        // 0's only neighbor is 1, inside the vicinity
        assert_eq!(vic.boundary_nodes(), &[2]);
    }

    #[test]
    fn whole_component_vicinity_has_no_boundary() {
        // 0 - 1 - 2 with landmark 2: from 0 the vicinity is every node.
        let g = path(3);
        let l = LandmarkSet::<u32>::from_members(&g, [2]);
        let vic = build_vicinity(&g, 0, &l);
        assert_eq!(vic.len(), 3);
        assert!(compute_boundary(&g, &vic).is_empty());
        assert_eq!(vic.boundary_len(), 0);
    }

    #[test]
    fn clique_boundary_is_everything_seen() {
        let g = complete(4);
        let entries = vec![
            Entry {
                node: 0,
                dist: 0u32,
                parent: NO_NODE,
            },
            Entry {
                node: 1,
                dist: 1,
                parent: 0,
            },
        ];
        let vic = VicinityTable::from_entries(0, entries, &[true, true], 1, Vec::new());
        assert_eq!(compute_boundary(&g, &vic), vec![0, 1]);
    }

    #[test]
    fn weighted_neighbor_reached_around_the_ball() {
        // u=0, landmark 3 at distance 2 via 0-2-3. Ball {0, 1}. Node 4 is a
        // neighbor of ball node 1 through a heavy edge, but its shortest path
        // runs 0-2-5-4 outside the vicinity.
        let g = Graph::from_edges(
            6,
            [
                (0, 1, 1.0),
                (1, 4, 10.0),
                (0, 2, 2.0),
                (2, 3, 0.0),
                (2, 5, 1.0),
                (5, 4, 1.0),
            ],
            true,
        )
        .unwrap();
        let l = LandmarkSet::<f64>::from_members(&g, [3]);
        assert_eq!(l.radius(0), 2.0);
        let vic = build_vicinity(&g, 0, &l);
        assert_eq!(vic.ball_size(), 2);
        assert_eq!(sorted_nodes(&vic), vec![0, 1, 2, 4]);
        assert_eq!(vic.distance(4), Some(4.0));
        assert_eq!(vic.path_to_owner(4), Some(vec![4, 5, 2, 0]));
        assert_eq!(vic.transit().iter().map(|e| e.node).collect::<Vec<_>>(), vec![5]);
        assert!(!vic.contains(5));
    }

    #[test]
    fn slot_index_finds_every_key() {
        let nodes: Vec<NodeId> = (0..500).map(|i| i * 7919 % 100_003).collect();
        let index = SlotIndex::build(&nodes);
        for (i, &v) in nodes.iter().enumerate() {
            assert_eq!(index.find(&nodes, v), Some(i));
        }
        assert_eq!(index.find(&nodes, 100_004), None);
        let wide: Vec<NodeId> = (0..70_000).collect();
        let index = SlotIndex::build(&wide);
        assert!(matches!(index, SlotIndex::Wide(_)));
        assert_eq!(index.find(&wide, 69_999), Some(69_999));
        assert_eq!(index.find(&wide, 70_000), None);
    }
}
