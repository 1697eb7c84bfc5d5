use std::collections::BTreeSet;

use proptest::prelude::*;
use vicinity_core::generators::with_random_weights;
use vicinity_core::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let edge = (0..n as NodeId, 0..n as NodeId);
        proptest::collection::vec(edge, 0..=3 * n)
            .prop_map(move |edges| Graph::from_unweighted_edges(n, edges).unwrap())
    })
}

fn alpha_strategy() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.25, 1.0, 4.0, 16.0])
}

/// Hop distances by plain BFS from every node.
fn brute_hops(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let n = g.node_count();
    (0..n)
        .map(|s| {
            let mut d = vec![None; n];
            d[s] = Some(0);
            let mut queue = std::collections::VecDeque::from([s as NodeId]);
            while let Some(u) = queue.pop_front() {
                let du = d[u as usize].unwrap();
                for &v in g.neighbors(u) {
                    if d[v as usize].is_none() {
                        d[v as usize] = Some(du + 1);
                        queue.push_back(v);
                    }
                }
            }
            d
        })
        .collect()
}

fn path_ok<D: Distance>(g: &Graph, path: &[NodeId], s: NodeId, t: NodeId, d: D) -> Result<(), TestCaseError> {
    validate_path(g, path, s, t, d).map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn answers_are_exact_and_paths_valid(g in graph_strategy(40), alpha in alpha_strategy(), seed in any::<u64>()) {
        let truth = brute_hops(&g);
        let oracle = build_oracle::<u32>(g.clone(), alpha, seed, 1).unwrap();
        for s in 0..g.node_count() as NodeId {
            for t in 0..g.node_count() as NodeId {
                let r = oracle.query_path(s, t).unwrap();
                let want = truth[s as usize][t as usize];
                if let Some(d) = r.distance {
                    prop_assert_eq!(Some(d), want, "pair ({}, {}) via {:?}", s, t, r.method);
                    path_ok(&g, r.path.as_deref().unwrap(), s, t, d)?;
                }
                if r.unreachable {
                    prop_assert_eq!(want, None);
                }
                let back = oracle.query_distance(t, s).unwrap();
                prop_assert_eq!(back.distance, r.distance);
                let f = oracle.query_with_fallback(s, t, Search::BidirectionalBfs, true).unwrap();
                prop_assert_eq!(f.distance, want);
                if let Some(d) = f.distance {
                    path_ok(&g, f.path.as_deref().unwrap(), s, t, d)?;
                }
            }
        }
    }

    #[test]
    fn probes_stay_within_boundary_bound(g in graph_strategy(40), alpha in alpha_strategy(), seed in any::<u64>()) {
        let oracle = build_oracle::<u32>(g.clone(), alpha, seed, 1).unwrap();
        for s in 0..g.node_count() as NodeId {
            for t in 0..g.node_count() as NodeId {
                let r = oracle.query_distance(s, t).unwrap();
                let bound = oracle.vicinity(s).boundary_len().min(oracle.vicinity(t).boundary_len()) + 4;
                prop_assert!(r.probes as usize <= bound);
            }
        }
    }

    #[test]
    fn vicinities_match_their_definition(g in graph_strategy(40), alpha in alpha_strategy(), seed in any::<u64>()) {
        let truth = brute_hops(&g);
        let oracle = build_oracle::<u32>(g.clone(), alpha, seed, 1).unwrap();
        let lm = oracle.landmarks();
        let comps = connected_components(&g);
        for c in 0..comps.count() {
            prop_assert!(lm.members().iter().any(|&m| comps.component_id[m as usize] == c as u32));
        }
        for u in 0..g.node_count() as NodeId {
            let row = &truth[u as usize];
            let radius = lm.members().iter().filter_map(|&m| row[m as usize]).min().unwrap();
            prop_assert_eq!(lm.radius(u), radius);
            prop_assert_eq!(row[lm.nearest(u) as usize], Some(radius));
            let ball: BTreeSet<NodeId> =
                (0..g.node_count() as NodeId).filter(|&v| row[v as usize].is_some_and(|d| d < radius)).collect();
            let mut gamma = ball.clone();
            for &b in &ball {
                gamma.extend(g.neighbors(b));
            }
            let vic = oracle.vicinity(u);
            let keys: BTreeSet<NodeId> = vic.entries().map(|e| e.node).collect();
            prop_assert_eq!(&keys, &gamma);
            prop_assert_eq!(vic.ball_size(), ball.len());
            let boundary: BTreeSet<NodeId> =
                gamma.iter().copied().filter(|&v| g.neighbors(v).iter().any(|x| !gamma.contains(x))).collect();
            let stored: BTreeSet<NodeId> = vic.boundary_nodes().iter().copied().collect();
            prop_assert_eq!(stored, boundary);
            for e in vic.entries() {
                prop_assert_eq!(Some(e.dist), row[e.node as usize]);
                let chain = vic.path_to_owner(e.node).unwrap();
                prop_assert_eq!(chain.len() as u32, e.dist + 1);
                prop_assert!(chain.iter().all(|x| keys.contains(x)));
                if e.node != u {
                    prop_assert!(ball.contains(&e.parent));
                }
            }
        }
        for table in oracle.landmark_tables() {
            let row = &truth[table.landmark() as usize];
            for v in 0..g.node_count() as NodeId {
                match row[v as usize] {
                    Some(d) => {
                        prop_assert_eq!(table.distance(v), d);
                        path_ok(&g, &table.path_to_landmark(v).unwrap(), v, table.landmark(), d)?;
                    }
                    None => prop_assert_eq!(table.distance(v), u32::MAX),
                }
            }
        }
    }

    #[test]
    fn boundary_scan_equals_full_scan(g in graph_strategy(40), alpha in alpha_strategy(), seed in any::<u64>()) {
        let oracle = build_oracle::<u32>(g.clone(), alpha, seed, 1).unwrap();
        for s in 0..g.node_count() as NodeId {
            for t in 0..g.node_count() as NodeId {
                let (vs, vt) = (oracle.vicinity(s), oracle.vicinity(t));
                if s == t || vs.is_empty() || vt.is_empty() || vs.contains(t) || vt.contains(s) {
                    continue;
                }
                let full = vs.entries().filter_map(|e| vt.distance(e.node).map(|d| e.dist + d)).min();
                let r = oracle.query_distance(s, t).unwrap();
                prop_assert_eq!(r.distance, full);
            }
        }
    }

    #[test]
    fn weighted_answers_match_dijkstra(g in graph_strategy(30), alpha in alpha_strategy(), seed in any::<u64>()) {
        let wg = with_random_weights(&g, 8, seed);
        let truth = all_pairs_reference::<f64>(&wg, 100).unwrap();
        let oracle = build_oracle::<f64>(wg.clone(), alpha, seed, 1).unwrap();
        for s in 0..wg.node_count() as NodeId {
            for t in 0..wg.node_count() as NodeId {
                let r = oracle.query_path(s, t).unwrap();
                if let Some(d) = r.distance {
                    prop_assert_eq!(Some(d), truth.distance(s, t), "pair ({}, {}) via {:?}", s, t, r.method);
                    path_ok(&wg, r.path.as_deref().unwrap(), s, t, d)?;
                }
                let f = oracle.query_with_fallback(s, t, Search::Dijkstra, false).unwrap();
                prop_assert_eq!(f.distance, truth.distance(s, t));
            }
            for e in oracle.vicinity(s).entries() {
                prop_assert_eq!(Some(e.dist), truth.distance(s, e.node));
                let chain = oracle.vicinity(s).path_to_owner(e.node).unwrap();
                path_ok(&wg, &chain, e.node, s, e.dist)?;
            }
        }
    }

    #[test]
    fn saved_index_round_trips(g in graph_strategy(40), alpha in alpha_strategy(), seed in any::<u64>()) {
        let oracle = build_oracle::<u32>(g.clone(), alpha, seed, 1).unwrap();
        let mut bytes = Vec::new();
        save_oracle(&oracle, &mut bytes).unwrap();
        let loaded: Oracle<u32> = load_oracle(bytes.as_slice(), g.clone()).unwrap();
        for s in 0..g.node_count() as NodeId {
            for t in 0..g.node_count() as NodeId {
                prop_assert_eq!(oracle.query_path(s, t).unwrap(), loaded.query_path(s, t).unwrap());
            }
        }
        let mut again = Vec::new();
        save_oracle(&loaded, &mut again).unwrap();
        prop_assert_eq!(bytes, again);
    }
}

#[test]
fn worker_count_does_not_change_the_index() {
    let g = generators::barabasi_albert(2000, 3, 11).unwrap();
    let save = |workers| {
        let o = build_oracle::<u32>(g.clone(), 4.0, 5, workers).unwrap();
        let mut bytes = Vec::new();
        save_oracle(&o, &mut bytes).unwrap();
        bytes
    };
    let one = save(1);
    assert_eq!(one, save(4));
    assert_eq!(one, save(0));
}

#[test]
fn complete_graph_always_resolves() {
    let g = generators::complete(50);
    for alpha in [0.5, 4.0, 64.0] {
        let oracle = build_oracle::<u32>(g.clone(), alpha, 3, 1).unwrap();
        assert!(!oracle.landmarks().is_empty());
        for s in 0..50 {
            for t in 0..50 {
                let r = oracle.query_distance(s, t).unwrap();
                assert_eq!(r.distance, Some(u32::from(s != t)));
            }
        }
    }
}

#[test]
fn all_landmarks_means_zero_radius() {
    let g = generators::cycle(12);
    let oracle = build_oracle_with_landmarks::<u32>(g, 1.0, 0, &(0..12).collect::<Vec<_>>(), 1).unwrap();
    assert!(oracle.landmarks().radii().iter().all(|&r| r == 0));
    assert_eq!(oracle.stats().vicinity_entries, 0);
}
