//! Online query answering by vicinity intersection.

use serde::Serialize;

use crate::baselines::{exact_search, Search};
use crate::distance::Distance;
use crate::error::QueryError;
use crate::graph::NodeId;
use crate::oracle::Oracle;
use crate::vicinity::VicinityTable;

/// How a query was resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    SameNode,
    SourceLandmark,
    TargetLandmark,
    TargetInSourceVicinity,
    SourceInTargetVicinity,
    Intersection,
    Fallback,
    NotFound,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::SameNode,
        Method::SourceLandmark,
        Method::TargetLandmark,
        Method::TargetInSourceVicinity,
        Method::SourceInTargetVicinity,
        Method::Intersection,
        Method::Fallback,
        Method::NotFound,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::SameNode => "SAME_NODE",
            Method::SourceLandmark => "SOURCE_LANDMARK",
            Method::TargetLandmark => "TARGET_LANDMARK",
            Method::TargetInSourceVicinity => "TARGET_IN_SOURCE_VICINITY",
            Method::SourceInTargetVicinity => "SOURCE_IN_TARGET_VICINITY",
            Method::Intersection => "INTERSECTION",
            Method::Fallback => "FALLBACK",
            Method::NotFound => "NOT_FOUND",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryResult<D> {
    /// `None` is the NOT_FOUND outcome.
    pub distance: Option<D>,
    pub method: Method,
    /// Set when `method == Intersection`.
    pub meeting_node: Option<NodeId>,
    /// Membership lookups: the direct checks performed plus one per
    /// scanned boundary node.
    pub probes: u32,
    pub path: Option<Vec<NodeId>>,
    /// The pair is known to be disconnected (a landmark table or an exact
    /// fallback search proved it).
    pub unreachable: bool,
}

impl<D> QueryResult<D> {
    fn found(distance: D, method: Method, probes: u32) -> Self {
        QueryResult {
            distance: Some(distance),
            method,
            meeting_node: None,
            probes,
            path: None,
            unreachable: false,
        }
    }

    fn not_found(probes: u32, unreachable: bool) -> Self {
        QueryResult {
            distance: None,
            method: Method::NotFound,
            meeting_node: None,
            probes,
            path: None,
            unreachable,
        }
    }

    pub fn is_found(&self) -> bool {
        self.distance.is_some()
    }
}

/// Resolves a pair of distinct non-landmark nodes from their vicinity
/// tables alone: containment first, then the boundary scan. `limit` is
/// `radius(s) + radius(t)`.
pub fn match_vicinities<D: Distance>(
    s: NodeId,
    t: NodeId,
    vs: &VicinityTable<D>,
    vt: &VicinityTable<D>,
    limit: D,
) -> QueryResult<D> {
    if let Some(d) = vs.distance(t) {
        return QueryResult::found(d, Method::TargetInSourceVicinity, 3);
    }
    if let Some(d) = vt.distance(s) {
        return QueryResult::found(d, Method::SourceInTargetVicinity, 4);
    }

    let (scan, other) = if vt.boundary_len() < vs.boundary_len() {
        (vt, vs)
    } else {
        (vs, vt)
    };
    let mut probes = 4u32;
    let mut best: Option<(D, NodeId)> = None;
    for (w, d_scan) in scan.boundary() {
        probes += 1;
        if let Some(d_other) = other.distance(w) {
            let total = d_scan + d_other;
            if best.is_none_or(|(b, _)| total < b) {
                best = Some((total, w));
            }
        }
    }
    // Any meeting total within the two radii is exact. Beyond that an
    // unweighted graph cannot produce a candidate at all, but a weighted
    // one can, when the shortest path crosses a gap between the two
    // vicinities; such totals are not certified.
    match best {
        Some((total, w)) if total <= limit => QueryResult {
            distance: Some(total),
            method: Method::Intersection,
            meeting_node: Some(w),
            probes,
            path: None,
            unreachable: false,
        },
        _ => QueryResult::not_found(probes, false),
    }
}

impl<D: Distance> Oracle<D> {
    fn check(&self, u: NodeId) -> Result<(), QueryError> {
        if (u as usize) < self.node_count() {
            Ok(())
        } else {
            Err(QueryError::NodeOutOfRange {
                node: u,
                node_count: self.node_count(),
            })
        }
    }

    /// Exact distance between `s` and `t` if the index can answer it.
    ///
    /// Checks, cheapest first: identical endpoints, either endpoint a
    /// landmark, either endpoint inside the other's vicinity. Otherwise
    /// scans the smaller boundary set against the other vicinity and keeps
    /// the smallest `d(s,w) + d(w,t)`.
    pub fn query_distance(&self, s: NodeId, t: NodeId) -> Result<QueryResult<D>, QueryError> {
        self.check(s)?;
        self.check(t)?;
        if s == t {
            return Ok(QueryResult::found(D::ZERO, Method::SameNode, 0));
        }
        if let Some(table) = self.landmark_table(s) {
            return Ok(landmark_answer(table.distance(t), Method::SourceLandmark, 1));
        }
        if let Some(table) = self.landmark_table(t) {
            return Ok(landmark_answer(table.distance(s), Method::TargetLandmark, 2));
        }
        Ok(match_vicinities(
            s,
            t,
            self.vicinity(s),
            self.vicinity(t),
            self.landmarks.radius(s) + self.landmarks.radius(t),
        ))
    }

    /// [`Oracle::query_distance`] plus the shortest path itself, stitched
    /// from stored parent pointers.
    pub fn query_path(&self, s: NodeId, t: NodeId) -> Result<QueryResult<D>, QueryError> {
        let mut result = self.query_distance(s, t)?;
        result.path = match result.method {
            Method::SameNode => Some(vec![s]),
            Method::SourceLandmark => {
                let table = self.landmark_table(s).expect("source is a landmark");
                table.path_to_landmark(t).map(reversed)
            }
            Method::TargetLandmark => self
                .landmark_table(t)
                .expect("target is a landmark")
                .path_to_landmark(s),
            Method::TargetInSourceVicinity => self.vicinity(s).path_to_owner(t).map(reversed),
            Method::SourceInTargetVicinity => self.vicinity(t).path_to_owner(s),
            Method::Intersection => {
                let w = result.meeting_node.expect("intersection has a meeting node");
                let head = self.vicinity(s).path_to_owner(w).map(reversed);
                let tail = self.vicinity(t).path_to_owner(w);
                match (head, tail) {
                    (Some(mut head), Some(tail)) => {
                        head.extend_from_slice(&tail[1..]);
                        Some(head)
                    }
                    _ => None,
                }
            }
            Method::Fallback | Method::NotFound => None,
        };
        debug_assert!(result.distance.is_none() || result.path.is_some());
        Ok(result)
    }

    /// Answers from the index when possible, otherwise runs `fallback`
    /// and reports its exact answer with method `Fallback`.
    pub fn query_with_fallback(
        &self,
        s: NodeId,
        t: NodeId,
        fallback: Search,
        want_path: bool,
    ) -> Result<QueryResult<D>, QueryError> {
        let result = if want_path {
            self.query_path(s, t)?
        } else {
            self.query_distance(s, t)?
        };
        if result.is_found() || result.unreachable {
            return Ok(result);
        }
        let search = exact_search::<D>(&self.graph, fallback, s, t)?;
        Ok(match search.distance {
            Some(d) => QueryResult {
                distance: Some(d),
                method: Method::Fallback,
                meeting_node: None,
                probes: result.probes,
                path: if want_path { search.path } else { None },
                unreachable: false,
            },
            None => QueryResult::not_found(result.probes, true),
        })
    }
}

fn landmark_answer<D: Distance>(d: D, method: Method, probes: u32) -> QueryResult<D> {
    if d.is_finite() {
        QueryResult::found(d, method, probes)
    } else {
        QueryResult::not_found(probes, true)
    }
}

fn reversed(mut v: Vec<NodeId>) -> Vec<NodeId> {
    v.reverse();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::validate_path;
    use crate::generators::path;
    use crate::graph::Graph;
    use crate::oracle::build_oracle_with_landmarks;

    fn path5() -> Oracle<u32> {
        build_oracle_with_landmarks(path(5), 4.0, 0, &[2], 1).unwrap()
    }

    #[test]
    fn intersection_on_path() {
        let o = path5();
        let r = o.query_path(0, 4).unwrap();
        assert_eq!(r.distance, Some(4));
        assert_eq!(r.method, Method::Intersection);
        assert_eq!(r.meeting_node, Some(2));
        assert_eq!(r.path, Some(vec![0, 1, 2, 3, 4]));
        assert!(r.probes <= 1 + 4);
    }

    #[test]
    fn landmark_endpoints() {
        let o = path5();
        let r = o.query_path(2, 4).unwrap();
        assert_eq!((r.distance, r.method), (Some(2), Method::SourceLandmark));
        assert_eq!(r.path, Some(vec![2, 3, 4]));
        let r = o.query_path(4, 2).unwrap();
        assert_eq!((r.distance, r.method), (Some(2), Method::TargetLandmark));
        assert_eq!(r.path, Some(vec![4, 3, 2]));
    }

    #[test]
    fn containment_and_identity() {
        let o = path5();
        let r = o.query_path(1, 0).unwrap();
        assert_eq!((r.distance, r.method), (Some(1), Method::TargetInSourceVicinity));
        assert_eq!(r.path, Some(vec![1, 0]));
        let r = o.query_path(3, 3).unwrap();
        assert_eq!(
            (r.distance, r.method, r.path),
            (Some(0), Method::SameNode, Some(vec![3]))
        );
    }

    #[test]
    fn target_in_source_vicinity_next_to_landmark() {
        // 2 is a landmark, so query (1, 2) resolves through its table first;
        // with landmark 4 instead, Γ(1) = {0, 1, 2, 3} holds 2 directly.
        let o = build_oracle_with_landmarks::<u32>(path(5), 4.0, 0, &[4], 1).unwrap();
        let r = o.query_path(1, 2).unwrap();
        assert_eq!(r.method, Method::TargetInSourceVicinity);
        assert_eq!(r.path, Some(vec![1, 2]));
    }

    #[test]
    fn disjoint_vicinities_not_found_then_fallback() {
        let o = build_oracle_with_landmarks::<u32>(path(11), 4.0, 0, &[2, 8], 1).unwrap();
        let r = o.query_distance(0, 10).unwrap();
        assert_eq!(r.method, Method::NotFound);
        assert_eq!(r.distance, None);
        assert!(!r.unreachable);
        for search in [Search::Bfs, Search::BidirectionalBfs, Search::Dijkstra] {
            let r = o.query_with_fallback(0, 10, search, true).unwrap();
            assert_eq!((r.distance, r.method), (Some(10), Method::Fallback));
            validate_path(o.graph(), r.path.as_ref().unwrap(), 0, 10, 10).unwrap();
        }
    }

    #[test]
    fn fallback_untriggered_matches_plain_query() {
        let o = path5();
        assert_eq!(
            o.query_with_fallback(0, 4, Search::Bfs, true).unwrap(),
            o.query_path(0, 4).unwrap()
        );
    }

    #[test]
    fn disconnected_pair_stays_not_found() {
        let g = Graph::from_unweighted_edges(8, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7)]).unwrap();
        let o = build_oracle_with_landmarks::<u32>(g, 4.0, 0, &[3, 7], 1).unwrap();
        let r = o.query_with_fallback(0, 4, Search::BidirectionalBfs, false).unwrap();
        assert_eq!(r.method, Method::NotFound);
        assert!(r.unreachable);
        let r = o.query_distance(3, 5).unwrap();
        assert_eq!(r.method, Method::NotFound);
        assert!(r.unreachable);
    }

    #[test]
    fn out_of_range_is_an_error() {
        let o = path5();
        assert!(matches!(
            o.query_distance(0, 5),
            Err(QueryError::NodeOutOfRange { node: 5, .. })
        ));
        assert!(o.query_path(9, 0).is_err());
    }

    #[test]
    fn weighted_gap_is_not_reported_as_exact() {
        // s=0 and t=5 meet only at w=6 through heavy edges (total 202),
        // while the true path 0-1-2-3-4-5 has length 10.
        let g = Graph::from_edges(
            9,
            [
                (0, 1, 2.0),
                (1, 2, 2.0),
                (2, 3, 2.0),
                (3, 4, 2.0),
                (4, 5, 2.0),
                (0, 7, 1.0),
                (7, 6, 100.0),
                (5, 8, 1.0),
                (8, 6, 100.0),
            ],
            true,
        )
        .unwrap();
        let o = build_oracle_with_landmarks::<f64>(g, 4.0, 0, &[1, 4], 1).unwrap();
        assert!(o.vicinity(0).contains(6) && o.vicinity(5).contains(6));
        let r = o.query_distance(0, 5).unwrap();
        assert_eq!(r.method, Method::NotFound);
        let r = o.query_with_fallback(0, 5, Search::Dijkstra, true).unwrap();
        assert_eq!(r.distance, Some(10.0));
    }
}
