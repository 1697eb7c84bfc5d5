//! Exact reference searches: BFS, bidirectional BFS, Dijkstra, and a dense
//! all-pairs matrix for small graphs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::distance::Distance;
use crate::error::SearchError;
use crate::graph::{Graph, NodeId, NO_NODE};
use crate::sssp;

/// Default node cap for [`all_pairs_reference`].
pub const DEFAULT_ALL_PAIRS_CAP: usize = 2000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SearchStats {
    /// Nodes labelled with a final distance.
    pub settled_nodes: usize,
    pub edge_scans: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult<D> {
    /// `None` when `t` is unreachable from `s`.
    pub distance: Option<D>,
    pub stats: SearchStats,
    pub path: Option<Vec<NodeId>>,
}

/// Which exact search to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Search {
    Bfs,
    BidirectionalBfs,
    Dijkstra,
}

fn check_node(g: &Graph, u: NodeId) -> Result<(), SearchError> {
    if (u as usize) < g.node_count() {
        Ok(())
    } else {
        Err(SearchError::NodeOutOfRange {
            node: u,
            node_count: g.node_count(),
        })
    }
}

fn check_unweighted(g: &Graph) -> Result<(), SearchError> {
    if g.is_weighted() {
        Err(SearchError::WeightedGraph)
    } else {
        Ok(())
    }
}

/// Reusable buffers for the breadth-first searches. Visited flags are
/// epoch-stamped so a search costs nothing proportional to `n` up front.
pub struct SearchScratch {
    epoch: u32,
    mark_s: Vec<u32>,
    mark_t: Vec<u32>,
    dist_s: Vec<u32>,
    dist_t: Vec<u32>,
    parent_s: Vec<NodeId>,
    parent_t: Vec<NodeId>,
    frontier_s: Vec<NodeId>,
    frontier_t: Vec<NodeId>,
    next: Vec<NodeId>,
}

impl SearchScratch {
    pub fn new(node_count: usize) -> Self {
        SearchScratch {
            epoch: 0,
            mark_s: vec![0; node_count],
            mark_t: vec![0; node_count],
            dist_s: vec![0; node_count],
            dist_t: vec![0; node_count],
            parent_s: vec![NO_NODE; node_count],
            parent_t: vec![NO_NODE; node_count],
            frontier_s: Vec::new(),
            frontier_t: Vec::new(),
            next: Vec::new(),
        }
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark_s.fill(0);
            self.mark_t.fill(0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Breadth-first search from `s`, stopping as soon as `t` is labelled.
    pub fn bfs(&mut self, g: &Graph, s: NodeId, t: NodeId, want_path: bool) -> Result<SearchResult<u32>, SearchError> {
        check_unweighted(g)?;
        check_node(g, s)?;
        check_node(g, t)?;
        let start = Instant::now();
        let epoch = self.next_epoch();
        let mut stats = SearchStats {
            settled_nodes: 1,
            ..Default::default()
        };
        self.mark_s[s as usize] = epoch;
        self.dist_s[s as usize] = 0;
        self.parent_s[s as usize] = NO_NODE;
        let mut found = s == t;
        let queue = &mut self.frontier_s;
        queue.clear();
        queue.push(s);
        let mut head = 0;
        'search: while !found && head < queue.len() {
            let x = queue[head];
            head += 1;
            let next = self.dist_s[x as usize] + 1;
            for &y in g.neighbors(x) {
                stats.edge_scans += 1;
                if self.mark_s[y as usize] != epoch {
                    self.mark_s[y as usize] = epoch;
                    self.dist_s[y as usize] = next;
                    self.parent_s[y as usize] = x;
                    stats.settled_nodes += 1;
                    if y == t {
                        found = true;
                        break 'search;
                    }
                    queue.push(y);
                }
            }
        }
        let distance = found.then(|| self.dist_s[t as usize]);
        let path = (found && want_path).then(|| {
            let mut p = chain(&self.parent_s, t);
            p.reverse();
            p
        });
        stats.elapsed = start.elapsed();
        Ok(SearchResult { distance, stats, path })
    }

    /// Level-synchronous bidirectional BFS. Each round expands one full
    /// level of whichever side has the smaller frontier; the first round
    /// that finds an edge into the other side's labels yields the exact
    /// distance as the minimum candidate over that round.
    pub fn bidirectional_bfs(
        &mut self,
        g: &Graph,
        s: NodeId,
        t: NodeId,
        want_path: bool,
    ) -> Result<SearchResult<u32>, SearchError> {
        check_unweighted(g)?;
        check_node(g, s)?;
        check_node(g, t)?;
        let start = Instant::now();
        if s == t {
            let stats = SearchStats {
                settled_nodes: 1,
                elapsed: start.elapsed(),
                ..Default::default()
            };
            return Ok(SearchResult {
                distance: Some(0),
                stats,
                path: want_path.then(|| vec![s]),
            });
        }
        let epoch = self.next_epoch();
        let mut stats = SearchStats {
            settled_nodes: 2,
            ..Default::default()
        };
        self.mark_s[s as usize] = epoch;
        self.dist_s[s as usize] = 0;
        self.parent_s[s as usize] = NO_NODE;
        self.mark_t[t as usize] = epoch;
        self.dist_t[t as usize] = 0;
        self.parent_t[t as usize] = NO_NODE;
        self.frontier_s.clear();
        self.frontier_s.push(s);
        self.frontier_t.clear();
        self.frontier_t.push(t);

        // Best (length, node on the expanding side, node on the other side, expanding side is s).
        let mut best: Option<(u32, NodeId, NodeId, bool)> = None;
        while best.is_none() && !self.frontier_s.is_empty() && !self.frontier_t.is_empty() {
            let forward = self.frontier_s.len() <= self.frontier_t.len();
            let (mark_a, dist_a, parent_a, frontier, mark_b, dist_b) = if forward {
                (
                    &mut self.mark_s,
                    &mut self.dist_s,
                    &mut self.parent_s,
                    &mut self.frontier_s,
                    &self.mark_t,
                    &self.dist_t,
                )
            } else {
                (
                    &mut self.mark_t,
                    &mut self.dist_t,
                    &mut self.parent_t,
                    &mut self.frontier_t,
                    &self.mark_s,
                    &self.dist_s,
                )
            };
            self.next.clear();
            for &x in frontier.iter() {
                let next = dist_a[x as usize] + 1;
                for &y in g.neighbors(x) {
                    stats.edge_scans += 1;
                    let yi = y as usize;
                    if mark_b[yi] == epoch {
                        let length = next + dist_b[yi];
                        if best.is_none_or(|b| length < b.0) {
                            best = Some((length, x, y, forward));
                        }
                    } else if mark_a[yi] != epoch {
                        mark_a[yi] = epoch;
                        dist_a[yi] = next;
                        parent_a[yi] = x;
                        stats.settled_nodes += 1;
                        self.next.push(y);
                    }
                }
            }
            std::mem::swap(frontier, &mut self.next);
        }

        let distance = best.map(|b| b.0);
        let path = match best {
            Some((_, x, y, forward)) if want_path => {
                let (on_s, on_t) = if forward { (x, y) } else { (y, x) };
                let mut p = chain(&self.parent_s, on_s);
                p.reverse();
                p.extend(chain(&self.parent_t, on_t));
                Some(p)
            }
            _ => None,
        };
        stats.elapsed = start.elapsed();
        Ok(SearchResult { distance, stats, path })
    }
}

/// `[v, parent(v), ...]` up to the root.
fn chain(parent: &[NodeId], v: NodeId) -> Vec<NodeId> {
    let mut out = vec![v];
    let mut cur = v;
    while parent[cur as usize] != NO_NODE {
        cur = parent[cur as usize];
        out.push(cur);
    }
    out
}

pub fn bfs_distance(g: &Graph, s: NodeId, t: NodeId) -> Result<SearchResult<u32>, SearchError> {
    SearchScratch::new(g.node_count()).bfs(g, s, t, true)
}

pub fn bidirectional_bfs(g: &Graph, s: NodeId, t: NodeId) -> Result<SearchResult<u32>, SearchError> {
    SearchScratch::new(g.node_count()).bidirectional_bfs(g, s, t, true)
}

/// Dijkstra from `s`, stopping when `t` is settled. With `D = u32` every
/// edge counts one hop.
pub fn dijkstra_distance<D: Distance>(g: &Graph, s: NodeId, t: NodeId) -> Result<SearchResult<D>, SearchError> {
    check_node(g, s)?;
    check_node(g, t)?;
    if D::HOPS {
        check_unweighted(g)?;
    }
    let start = Instant::now();
    let n = g.node_count();
    let mut dist = vec![D::INFINITY; n];
    let mut parent = vec![NO_NODE; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut stats = SearchStats::default();
    dist[s as usize] = D::ZERO;
    heap.push(Reverse((D::ZERO.order_key(), s)));
    let mut found = false;
    while let Some(Reverse((_, x))) = heap.pop() {
        if settled[x as usize] {
            continue;
        }
        settled[x as usize] = true;
        stats.settled_nodes += 1;
        if x == t {
            found = true;
            break;
        }
        let dx = dist[x as usize];
        for e in g.edge_range(x) {
            stats.edge_scans += 1;
            let y = g.target(e) as usize;
            let nd = dx + D::edge(g, e);
            if !settled[y] && nd < dist[y] {
                dist[y] = nd;
                parent[y] = x;
                heap.push(Reverse((nd.order_key(), y as NodeId)));
            }
        }
    }
    let path = found.then(|| {
        let mut p = chain(&parent, t);
        p.reverse();
        p
    });
    stats.elapsed = start.elapsed();
    Ok(SearchResult {
        distance: found.then(|| dist[t as usize]),
        stats,
        path,
    })
}

/// Runs `search` between `s` and `t`, converting hop counts into `D`.
pub fn exact_search<D: Distance>(
    g: &Graph,
    search: Search,
    s: NodeId,
    t: NodeId,
) -> Result<SearchResult<D>, SearchError> {
    let convert = |r: SearchResult<u32>| SearchResult {
        distance: r.distance.map(D::from_hops),
        stats: r.stats,
        path: r.path,
    };
    match search {
        Search::Bfs => bfs_distance(g, s, t).map(convert),
        Search::BidirectionalBfs => bidirectional_bfs(g, s, t).map(convert),
        Search::Dijkstra => dijkstra_distance::<D>(g, s, t),
    }
}

/// Dense `n × n` distance matrix; `INFINITY` marks unreachable pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix<D> {
    n: usize,
    data: Vec<D>,
}

impl<D: Distance> DistanceMatrix<D> {
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, s: NodeId, t: NodeId) -> D {
        self.data[s as usize * self.n + t as usize]
    }

    /// `None` for unreachable pairs.
    pub fn distance(&self, s: NodeId, t: NodeId) -> Option<D> {
        let d = self.get(s, t);
        d.is_finite().then_some(d)
    }

    pub fn row(&self, s: NodeId) -> &[D] {
        &self.data[s as usize * self.n..(s as usize + 1) * self.n]
    }
}

/// All-pairs distances by one full search per node. Refuses graphs with
/// more than `cap` nodes.
pub fn all_pairs_reference<D: Distance>(g: &Graph, cap: usize) -> Result<DistanceMatrix<D>, SearchError> {
    let n = g.node_count();
    if n > cap {
        return Err(SearchError::TooLarge { node_count: n, cap });
    }
    if D::HOPS {
        check_unweighted(g)?;
    }
    let mut data = Vec::with_capacity(n * n);
    for s in 0..n as NodeId {
        data.extend(sssp::shortest_path_tree::<D>(g, s).0);
    }
    Ok(DistanceMatrix { n, data })
}

/// Checks that `path` is a walk from `s` to `t` whose edge weights sum to
/// `distance`. Returns a description of the first violation.
pub fn validate_path<D: Distance>(g: &Graph, path: &[NodeId], s: NodeId, t: NodeId, distance: D) -> Result<(), String> {
    match (path.first(), path.last()) {
        (Some(&a), Some(&b)) if a == s && b == t => {}
        _ => return Err(format!("path {path:?} does not run from {s} to {t}")),
    }
    let mut total = D::ZERO;
    for w in path.windows(2) {
        let range = g.edge_range(w[0]);
        let Ok(i) = g.neighbors(w[0]).binary_search(&w[1]) else {
            return Err(format!("{} and {} are not adjacent", w[0], w[1]));
        };
        total = total + D::edge(g, range.start + i);
    }
    if total == distance {
        Ok(())
    } else {
        Err(format!("path length {total:?} differs from distance {distance:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, erdos_renyi, path};

    #[test]
    fn bfs_on_path() {
        let g = path(5);
        let r = bfs_distance(&g, 0, 4).unwrap();
        assert_eq!(r.distance, Some(4));
        assert_eq!(r.path, Some(vec![0, 1, 2, 3, 4]));
        assert_eq!(bfs_distance(&g, 3, 3).unwrap().distance, Some(0));
    }

    #[test]
    fn unreachable_pairs() {
        let g = Graph::from_unweighted_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(bfs_distance(&g, 0, 3).unwrap().distance, None);
        assert_eq!(bidirectional_bfs(&g, 0, 3).unwrap().distance, None);
        assert_eq!(dijkstra_distance::<u32>(&g, 0, 3).unwrap().distance, None);
    }

    #[test]
    fn bidirectional_on_path_settles_no_more_than_bfs() {
        let g = path(5);
        let bi = bidirectional_bfs(&g, 0, 4).unwrap();
        let uni = bfs_distance(&g, 0, 4).unwrap();
        assert_eq!(bi.distance, Some(4));
        assert!(bi.stats.settled_nodes <= uni.stats.settled_nodes);
        assert_eq!(bi.path, Some(vec![0, 1, 2, 3, 4]));
    }

    #[test]
    fn bidirectional_on_even_and_odd_cycles() {
        let g = cycle(10);
        assert_eq!(bidirectional_bfs(&g, 0, 5).unwrap().distance, Some(5));
        let g = cycle(9);
        assert_eq!(bidirectional_bfs(&g, 0, 4).unwrap().distance, Some(4));
        assert_eq!(bidirectional_bfs(&g, 2, 2).unwrap().distance, Some(0));
    }

    #[test]
    fn bfs_rejects_weighted_graph() {
        let g = Graph::from_edges(2, [(0, 1, 2.0)], true).unwrap();
        assert!(matches!(bfs_distance(&g, 0, 1), Err(SearchError::WeightedGraph)));
        assert!(matches!(bidirectional_bfs(&g, 0, 1), Err(SearchError::WeightedGraph)));
        assert_eq!(dijkstra_distance::<f64>(&g, 0, 1).unwrap().distance, Some(2.0));
    }

    #[test]
    fn out_of_range_node() {
        let g = path(3);
        assert!(matches!(
            bfs_distance(&g, 0, 3),
            Err(SearchError::NodeOutOfRange { node: 3, .. })
        ));
    }

    #[test]
    fn weighted_triangle() {
        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)], true).unwrap();
        let r = dijkstra_distance::<f64>(&g, 0, 2).unwrap();
        assert_eq!(r.distance, Some(2.0));
        assert_eq!(r.path, Some(vec![0, 1, 2]));
        assert_eq!(dijkstra_distance::<f64>(&g, 1, 1).unwrap().distance, Some(0.0));
    }

    #[test]
    fn unit_dijkstra_matches_bfs() {
        let g = erdos_renyi(120, 0.04, 5).unwrap();
        let mut scratch = SearchScratch::new(g.node_count());
        for i in 0..100u32 {
            let (s, t) = ((i * 37) % 120, (i * 91 + 7) % 120);
            let bfs = scratch.bfs(&g, s, t, false).unwrap().distance;
            let dij = dijkstra_distance::<u32>(&g, s, t).unwrap().distance;
            let bi = scratch.bidirectional_bfs(&g, s, t, false).unwrap().distance;
            assert_eq!(bfs, dij, "pair ({s}, {t})");
            assert_eq!(bfs, bi, "pair ({s}, {t})");
        }
    }

    #[test]
    fn all_pairs_on_path_and_clique() {
        let m = all_pairs_reference::<u32>(&path(6), DEFAULT_ALL_PAIRS_CAP).unwrap();
        for i in 0..6u32 {
            for j in 0..6u32 {
                assert_eq!(m.get(i, j), i.abs_diff(j));
            }
        }
        let m = all_pairs_reference::<u32>(&crate::generators::complete(4), 10).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), u32::from(i != j));
            }
        }
        assert!(matches!(
            all_pairs_reference::<u32>(&path(11), 10),
            Err(SearchError::TooLarge { .. })
        ));
    }

    #[test]
    fn path_validation() {
        let g = path(4);
        assert!(validate_path(&g, &[0, 1, 2], 0, 2, 2u32).is_ok());
        assert!(validate_path(&g, &[0, 2], 0, 2, 1u32).is_err());
        assert!(validate_path(&g, &[0, 1, 2], 0, 2, 3u32).is_err());
        assert!(validate_path(&g, &[1, 2], 0, 2, 1u32).is_err());
    }
}
