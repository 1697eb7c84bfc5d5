//! Full single-source and multi-source shortest-path sweeps shared by the
//! landmark machinery.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::distance::Distance;
use crate::graph::{Graph, NodeId, NO_NODE};

/// Shortest-path tree from `source`: distances and parent pointers toward
/// the source. Parents are the first node (in settle order, scanning
/// neighbors ascending) to reach a node at its final distance.
pub(crate) fn shortest_path_tree<D: Distance>(g: &Graph, source: NodeId) -> (Vec<D>, Vec<NodeId>) {
    let n = g.node_count();
    let mut dist = vec![D::INFINITY; n];
    let mut parent = vec![NO_NODE; n];
    dist[source as usize] = D::ZERO;
    if D::HOPS {
        let mut queue = Vec::with_capacity(n);
        queue.push(source);
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            let next = dist[x as usize] + D::from_hops(1);
            for &y in g.neighbors(x) {
                if !dist[y as usize].is_finite() {
                    dist[y as usize] = next;
                    parent[y as usize] = x;
                    queue.push(y);
                }
            }
        }
    } else {
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0u64, source)));
        while let Some(Reverse((_, x))) = heap.pop() {
            if settled[x as usize] {
                continue;
            }
            settled[x as usize] = true;
            let dx = dist[x as usize];
            for e in g.edge_range(x) {
                let y = g.target(e);
                let nd = dx + D::edge(g, e);
                if !settled[y as usize] && nd < dist[y as usize] {
                    dist[y as usize] = nd;
                    parent[y as usize] = x;
                    heap.push(Reverse((nd.order_key(), y)));
                }
            }
        }
    }
    (dist, parent)
}

/// Nearest source and its distance for every node, ties resolved toward
/// the smallest source id. Unreachable nodes get `(NO_NODE, INFINITY)`.
pub(crate) fn nearest_sources<D: Distance>(g: &Graph, sources: &[NodeId]) -> (Vec<NodeId>, Vec<D>) {
    let n = g.node_count();
    let mut nearest = vec![NO_NODE; n];
    let mut dist = vec![D::INFINITY; n];
    if D::HOPS {
        let mut frontier: Vec<NodeId> = Vec::new();
        for &s in sources {
            if !dist[s as usize].is_finite() {
                dist[s as usize] = D::ZERO;
                nearest[s as usize] = s;
                frontier.push(s);
            }
        }
        let mut next = Vec::new();
        let mut level = D::ZERO;
        while !frontier.is_empty() {
            level = level + D::from_hops(1);
            for &x in &frontier {
                let owner = nearest[x as usize];
                for &y in g.neighbors(x) {
                    let y = y as usize;
                    if !dist[y].is_finite() {
                        dist[y] = level;
                        nearest[y] = owner;
                        next.push(y as NodeId);
                    } else if dist[y] == level && owner < nearest[y] {
                        // every level-(d) owner is final before level d+1 is labelled
                        nearest[y] = owner;
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
            next.clear();
        }
    } else {
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s as usize] = D::ZERO;
            nearest[s as usize] = s;
            heap.push(Reverse((0u64, s, s)));
        }
        // Lexicographic (distance, source) keys give the smallest source id
        // among equally near ones.
        while let Some(Reverse((_, owner, x))) = heap.pop() {
            if settled[x as usize] || owner != nearest[x as usize] {
                continue;
            }
            settled[x as usize] = true;
            let dx = dist[x as usize];
            for e in g.edge_range(x) {
                let y = g.target(e) as usize;
                if settled[y] {
                    continue;
                }
                let nd = dx + D::edge(g, e);
                if nd < dist[y] || (nd == dist[y] && owner < nearest[y]) {
                    dist[y] = nd;
                    nearest[y] = owner;
                    heap.push(Reverse((nd.order_key(), owner, y as NodeId)));
                }
            }
        }
    }
    (nearest, dist)
}
