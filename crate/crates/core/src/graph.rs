//! Immutable undirected graphs in compressed sparse row layout, plus
//! edge-list ingestion and connectivity helpers.

use std::collections::VecDeque;
use std::io::{BufRead, Write};
use std::ops::Range;

use sha2::{Digest, Sha256};

use crate::error::GraphError;

pub type NodeId = u32;

/// Sentinel for "no node" in parent and landmark arrays.
pub const NO_NODE: NodeId = NodeId::MAX;

/// Undirected graph with dense node ids in `[0, n)`.
///
/// Every undirected edge is stored twice, once per endpoint, and each
/// neighbor list is sorted by node id. Self-loops and parallel edges are
/// rejected at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Option<Vec<f64>>,
    labels: Option<Vec<u64>>,
}

impl Graph {
    /// Builds a graph from undirected edges over nodes `0..node_count`.
    ///
    /// Self-loops are dropped and parallel edges collapse to the lightest
    /// one. With `weighted == false` the third tuple field is ignored.
    pub fn from_edges<I>(node_count: usize, edges: I, weighted: bool) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        if node_count > NO_NODE as usize {
            return Err(GraphError::InvalidParameter(format!(
                "{node_count} nodes exceed the 32-bit id space"
            )));
        }
        let mut pairs = Vec::new();
        for (u, v, w) in edges {
            if u as usize >= node_count || v as usize >= node_count {
                return Err(GraphError::InvalidParameter(format!(
                    "edge ({u}, {v}) references a node outside 0..{node_count}"
                )));
            }
            if weighted && !(w.is_finite() && w >= 0.0) {
                return Err(GraphError::InvalidWeight { line: 0, weight: w });
            }
            if u != v {
                pairs.push((u.min(v), u.max(v), if weighted { w } else { 1.0 }));
            }
        }
        Ok(Self::from_canonical_pairs(node_count, pairs, weighted))
    }

    /// Unweighted convenience constructor.
    pub fn from_unweighted_edges<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Self::from_edges(node_count, edges.into_iter().map(|(u, v)| (u, v, 1.0)), false)
    }

    /// `pairs` hold `(min, max, weight)` with `min != max`, in range.
    fn from_canonical_pairs(node_count: usize, mut pairs: Vec<(NodeId, NodeId, f64)>, weighted: bool) -> Self {
        pairs.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        // Sorted by weight within a key, so dedup keeps the minimum.
        pairs.dedup_by(|next, kept| next.0 == kept.0 && next.1 == kept.1);

        let mut degree = vec![0usize; node_count];
        for &(u, v, _) in &pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut targets = vec![0; total];
        let mut weights = weighted.then(|| vec![0.0; total]);
        let mut cursor: Vec<usize> = offsets[..node_count].to_vec();
        // Visiting pairs in (min, max) order appends every node's smaller
        // neighbors before its larger ones, each run ascending, so the lists
        // come out sorted.
        for &(u, v, w) in &pairs {
            for (a, b) in [(u, v), (v, u)] {
                let slot = cursor[a as usize];
                targets[slot] = b;
                if let Some(ws) = weights.as_mut() {
                    ws[slot] = w;
                }
                cursor[a as usize] += 1;
            }
        }
        Graph {
            offsets,
            targets,
            weights,
            labels: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn degree(&self, u: NodeId) -> usize {
        let u = u as usize;
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count())
            .map(|u| self.degree(u as NodeId))
            .max()
            .unwrap_or(0)
    }

    /// Sorted neighbor ids of `u`.
    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.targets[self.edge_range(u)]
    }

    /// Positions of `u`'s half-edges, usable with [`Graph::target`] and
    /// [`Graph::weight`].
    #[inline]
    pub fn edge_range(&self, u: NodeId) -> Range<usize> {
        let u = u as usize;
        self.offsets[u]..self.offsets[u + 1]
    }

    #[inline]
    pub fn target(&self, edge: usize) -> NodeId {
        self.targets[edge]
    }

    /// Weight of a half-edge; 1 for unweighted graphs.
    #[inline]
    pub fn weight(&self, edge: usize) -> f64 {
        match &self.weights {
            Some(ws) => ws[edge],
            None => 1.0,
        }
    }

    /// Iterates `(neighbor, weight)` pairs of `u`.
    pub fn weighted_neighbors(&self, u: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.edge_range(u).map(move |e| (self.targets[e], self.weight(e)))
    }

    /// Weight of edge `{u, v}` if it exists.
    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let range = self.edge_range(u);
        self.targets[range.clone()]
            .binary_search(&v)
            .ok()
            .map(|i| self.weight(range.start + i))
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Iterates each undirected edge once as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| {
            self.edge_range(u)
                .filter(move |&e| self.targets[e] > u)
                .map(move |e| (u, self.targets[e], self.weight(e)))
        })
    }

    /// Original id of a node as it appeared in the ingested edge list.
    /// Graphs built in memory report their dense id.
    pub fn label(&self, u: NodeId) -> u64 {
        match &self.labels {
            Some(l) => l[u as usize],
            None => u as u64,
        }
    }

    pub(crate) fn with_labels(mut self, labels: Vec<u64>) -> Self {
        assert_eq!(labels.len(), self.node_count(), "one label per node");
        self.labels = Some(labels);
        self
    }

    /// Dense id of an original label, if present.
    pub fn node_by_label(&self, label: u64) -> Option<NodeId> {
        match &self.labels {
            // labels ascend with dense ids
            Some(l) => l.binary_search(&label).ok().map(|i| i as NodeId),
            None => (label < self.node_count() as u64).then_some(label as NodeId),
        }
    }

    /// Hash of node count, edge count, and the full adjacency (including
    /// weights). Used to bind a saved index to the graph it was built from.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        h.update((self.node_count() as u64).to_le_bytes());
        h.update((self.edge_count() as u64).to_le_bytes());
        h.update([self.is_weighted() as u8]);
        for u in 0..self.node_count() as NodeId {
            h.update((self.degree(u) as u32).to_le_bytes());
        }
        for &t in &self.targets {
            h.update(t.to_le_bytes());
        }
        if let Some(ws) = &self.weights {
            for w in ws {
                h.update(w.to_bits().to_le_bytes());
            }
        }
        let digest = h.finalize();
        u64::from_le_bytes(digest[..8].try_into().unwrap())
    }

    /// Writes `u v` (or `u v w`) lines, one per undirected edge, using
    /// dense ids.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v, w) in self.edges() {
            if self.is_weighted() {
                writeln!(out, "{u} {v} {w}")?;
            } else {
                writeln!(out, "{u} {v}")?;
            }
        }
        Ok(())
    }

    /// Writes the `dense original` id mapping, one node per line.
    pub fn write_id_map<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for u in 0..self.node_count() as NodeId {
            writeln!(out, "{u} {}", self.label(u))?;
        }
        Ok(())
    }

    /// Subgraph induced by nodes with `keep[u]`, renumbered in ascending
    /// old-id order. Returns the graph and the old-to-new mapping.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (Graph, Vec<Option<NodeId>>) {
        let mut mapping = vec![None; self.node_count()];
        let mut next = 0;
        for (u, &k) in keep.iter().enumerate() {
            if k {
                mapping[u] = Some(next);
                next += 1;
            }
        }
        let pairs = self
            .edges()
            .filter_map(|(u, v, w)| Some((mapping[u as usize]?, mapping[v as usize]?, w)))
            .collect();
        let mut sub = Graph::from_canonical_pairs(next as usize, pairs, self.is_weighted());
        let labels = (0..self.node_count())
            .filter(|&u| keep[u])
            .map(|u| self.label(u as NodeId))
            .collect();
        sub.labels = Some(labels);
        (sub, mapping)
    }
}

/// Options for [`parse_edge_list`].
#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    /// Add the reverse of every edge. When false the input must already
    /// list both directions of each edge.
    pub treat_as_undirected: bool,
    /// Read a third column as the edge weight.
    pub weighted: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            treat_as_undirected: true,
            weighted: false,
        }
    }
}

/// Reads a whitespace-separated edge list (`u v` or `u v w` per line,
/// `#`/`%` comments), remapping the original ids to `[0, n)` in ascending
/// order.
pub fn parse_edge_list<R: BufRead>(source: R, options: ParseOptions) -> Result<Graph, GraphError> {
    let mut raw: Vec<(u64, u64, f64)> = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let mut id = |name: &str| -> Result<u64, GraphError> {
            let field = fields.next().ok_or_else(|| GraphError::Parse {
                line: lineno,
                message: format!("missing {name} node id"),
            })?;
            field.parse::<u64>().map_err(|_| GraphError::Parse {
                line: lineno,
                message: format!("{name} node id {field:?} is not a non-negative integer"),
            })
        };
        let u = id("source")?;
        let v = id("target")?;
        let w = if options.weighted {
            let field = fields.next().ok_or_else(|| GraphError::Parse {
                line: lineno,
                message: "missing weight column".into(),
            })?;
            let w: f64 = field.parse().map_err(|_| GraphError::Parse {
                line: lineno,
                message: format!("weight {field:?} is not a number"),
            })?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(GraphError::InvalidWeight {
                    line: lineno,
                    weight: w,
                });
            }
            w
        } else {
            1.0
        };
        raw.push((u, v, w));
    }

    if !options.treat_as_undirected {
        let mut arcs: Vec<(u64, u64)> = raw.iter().filter(|e| e.0 != e.1).map(|e| (e.0, e.1)).collect();
        arcs.sort_unstable();
        for &(u, v) in &arcs {
            if arcs.binary_search(&(v, u)).is_err() {
                return Err(GraphError::Asymmetric { from: u, to: v });
            }
        }
    }

    let mut labels: Vec<u64> = raw.iter().flat_map(|e| [e.0, e.1]).collect();
    labels.sort_unstable();
    labels.dedup();
    if labels.len() > NO_NODE as usize {
        return Err(GraphError::InvalidParameter("too many distinct node ids".into()));
    }
    let dense = |label: u64| labels.binary_search(&label).unwrap() as NodeId;
    let pairs = raw
        .iter()
        .filter(|e| e.0 != e.1)
        .map(|&(u, v, w)| {
            let (a, b) = (dense(u), dense(v));
            (a.min(b), a.max(b), w)
        })
        .collect();
    let g = Graph::from_canonical_pairs(labels.len(), pairs, options.weighted);
    Ok(g.with_labels(labels))
}

/// Connected-component labelling. Components are numbered in order of
/// their smallest node id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentMap {
    pub component_id: Vec<u32>,
    pub component_sizes: Vec<usize>,
}

impl ComponentMap {
    pub fn count(&self) -> usize {
        self.component_sizes.len()
    }

    pub fn same_component(&self, u: NodeId, v: NodeId) -> bool {
        self.component_id[u as usize] == self.component_id[v as usize]
    }
}

pub fn connected_components(g: &Graph) -> ComponentMap {
    let n = g.node_count();
    let mut component_id = vec![u32::MAX; n];
    let mut component_sizes = Vec::new();
    let mut queue = VecDeque::new();
    for root in 0..n {
        if component_id[root] != u32::MAX {
            continue;
        }
        let label = component_sizes.len() as u32;
        component_id[root] = label;
        queue.push_back(root as NodeId);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in g.neighbors(u) {
                if component_id[v as usize] == u32::MAX {
                    component_id[v as usize] = label;
                    queue.push_back(v);
                }
            }
        }
        component_sizes.push(size);
    }
    ComponentMap {
        component_id,
        component_sizes,
    }
}

/// Restricts `g` to its largest connected component. Ties go to the
/// component holding the smallest original id.
pub fn largest_connected_component(g: &Graph) -> Result<(Graph, Vec<Option<NodeId>>), GraphError> {
    if g.node_count() == 0 {
        return Err(GraphError::Empty);
    }
    let comps = connected_components(g);
    // Original labels ascend with dense ids, and components are numbered by
    // smallest member, so the first maximal component wins the tie.
    let mut best = 0;
    for (c, &size) in comps.component_sizes.iter().enumerate() {
        if size > comps.component_sizes[best] {
            best = c;
        }
    }
    let keep: Vec<bool> = comps.component_id.iter().map(|&c| c as usize == best).collect();
    Ok(g.induced_subgraph(&keep))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, weighted: bool) -> Result<Graph, GraphError> {
        parse_edge_list(
            text.as_bytes(),
            ParseOptions {
                treat_as_undirected: true,
                weighted,
            },
        )
    }

    #[test]
    fn smallest_path_graph() {
        let g = parse("0 1\n1 2", false).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn comment_dedup_and_remap() {
        let g = parse("# comment\n5 7\n7 5", false).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!((g.label(0), g.label(1)), (5, 7));
        assert_eq!(g.node_by_label(7), Some(1));
        assert_eq!(g.node_by_label(6), None);
    }

    #[test]
    fn zero_weight_is_legal() {
        let g = parse("0 1 2.5\n1 2 0.0", true).unwrap();
        assert_eq!(g.edge_weight(0, 1), Some(2.5));
        assert_eq!(g.edge_weight(2, 1), Some(0.0));
    }

    #[test]
    fn duplicate_weighted_edges_keep_minimum() {
        let g = parse("0 1 4\n1 0 3\n0 1 5", true).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(3.0));
    }

    #[test]
    fn self_loops_dropped_percent_comments_skipped() {
        let g = parse("% header\n0 0\n0 1\n\n", false).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degree(0), 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match parse("0 1\n1 x\n", false) {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("0\n", false), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(parse("0 1\n", true), Err(GraphError::Parse { line: 1, .. })));
    }

    #[test]
    fn negative_weight_rejected() {
        match parse("0 1 1\n1 2 -0.5", true) {
            Err(GraphError::InvalidWeight { line, weight }) => {
                assert_eq!(line, 2);
                assert_eq!(weight, -0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn strict_mode_requires_both_directions() {
        let strict = ParseOptions {
            treat_as_undirected: false,
            weighted: false,
        };
        assert!(parse_edge_list("0 1\n1 0\n".as_bytes(), strict).is_ok());
        assert!(matches!(
            parse_edge_list("0 1\n1 2\n2 1\n".as_bytes(), strict),
            Err(GraphError::Asymmetric { from: 0, to: 1 })
        ));
    }

    #[test]
    fn largest_component_tie_prefers_smallest_id() {
        let g = Graph::from_unweighted_edges(6, [(3, 4), (4, 5), (5, 3), (0, 1), (1, 2), (2, 0)]).unwrap();
        let (lcc, map) = largest_connected_component(&g).unwrap();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(map[0], Some(0));
        assert_eq!(map[3], None);

        // Same shape, but the smaller ids sit in the second triangle listed.
        let g = parse("10 11\n11 12\n12 10\n1 2\n2 3\n3 1\n", false).unwrap();
        let (lcc, _) = largest_connected_component(&g).unwrap();
        assert_eq!((0..3).map(|u| lcc.label(u)).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn largest_component_drops_isolated_node() {
        let g = Graph::from_unweighted_edges(4, [(0, 1), (1, 2)]).unwrap();
        let (lcc, map) = largest_connected_component(&g).unwrap();
        assert_eq!((lcc.node_count(), lcc.edge_count()), (3, 2));
        assert_eq!(map, vec![Some(0), Some(1), Some(2), None]);
    }

    #[test]
    fn largest_component_of_connected_graph_is_identity() {
        let g = Graph::from_unweighted_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let (lcc, map) = largest_connected_component(&g).unwrap();
        assert_eq!(lcc.fingerprint(), g.fingerprint());
        assert!(map.iter().enumerate().all(|(i, m)| *m == Some(i as NodeId)));
    }

    #[test]
    fn empty_graph_has_no_largest_component() {
        let g = Graph::from_unweighted_edges(0, []).unwrap();
        assert!(matches!(largest_connected_component(&g), Err(GraphError::Empty)));
    }

    #[test]
    fn components_partition_nodes() {
        let g = Graph::from_unweighted_edges(5, [(0, 1), (3, 4)]).unwrap();
        let comps = connected_components(&g);
        assert_eq!(comps.component_id, vec![0, 0, 1, 2, 2]);
        assert_eq!(comps.component_sizes.iter().sum::<usize>(), 5);
    }

    #[test]
    fn id_map_lists_original_ids() {
        let g = parse("10 20\n20 30\n", false).unwrap();
        let mut out = Vec::new();
        g.write_id_map(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 10\n1 20\n2 30\n");
    }
}
