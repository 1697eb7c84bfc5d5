//! Measurement protocols. The alpha sweeps only build vicinities for the
//! sampled nodes; the latency run needs a full oracle.

use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vicinity_core::vicinity::{build_vicinity_with, VicinityScratch};
use vicinity_core::{
    connected_components, match_vicinities, sample_landmarks, ComponentMap, Graph, LandmarkSet, NodeId, Oracle,
    SearchScratch, VicinityTable, WorkerPool,
};

use crate::config::ExperimentConfig;
use crate::error::BenchError;

/// Seed for one (trial, stream) pair. Landmark and node streams are shared
/// across alphas so trials stay paired.
fn trial_seed(base: u64, trial: usize, stream: u64) -> u64 {
    base.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ ((trial as u64) << 8 | stream)
}

const LANDMARK_STREAM: u64 = 1;
const NODE_STREAM: u64 = 2;
const CHECK_STREAM: u64 = 3;
const PAIR_STREAM: u64 = 4;

/// Nodes sampled for `trial`, ascending.
pub fn trial_nodes(g: &Graph, cfg: &ExperimentConfig, trial: usize) -> Vec<NodeId> {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, trial, NODE_STREAM));
    let mut nodes: Vec<NodeId> = sample(&mut rng, n, cfg.nodes_per_trial.min(n))
        .into_iter()
        .map(|v| v as NodeId)
        .collect();
    nodes.sort_unstable();
    nodes
}

pub fn trial_landmarks(
    g: &Graph,
    alpha: f64,
    cfg: &ExperimentConfig,
    trial: usize,
) -> Result<LandmarkSet<u32>, BenchError> {
    Ok(sample_landmarks(
        g,
        alpha,
        trial_seed(cfg.seed, trial, LANDMARK_STREAM),
    )?)
}

/// Landmark set plus vicinities of a node sample.
pub struct SampledVicinities {
    pub landmarks: LandmarkSet<u32>,
    pub nodes: Vec<NodeId>,
    pub tables: Vec<VicinityTable<u32>>,
}

impl SampledVicinities {
    pub fn build(g: &Graph, landmarks: LandmarkSet<u32>, nodes: Vec<NodeId>, pool: &WorkerPool) -> Self {
        let n = g.node_count();
        let tables = pool.map(
            nodes.len(),
            || VicinityScratch::new(n),
            |scratch, i| build_vicinity_with(g, nodes[i], &landmarks, scratch),
        );
        SampledVicinities {
            landmarks,
            nodes,
            tables,
        }
    }

    /// Distance the full oracle would return for sampled nodes `i != j`,
    /// or `None` for NOT_FOUND. Landmark endpoints resolve from their
    /// (unbuilt) tables, which answer exactly within a component.
    pub fn resolve(&self, comps: &ComponentMap, i: usize, j: usize) -> Resolution {
        let (s, t) = (self.nodes[i], self.nodes[j]);
        if self.landmarks.contains(s) || self.landmarks.contains(t) {
            return if comps.same_component(s, t) {
                Resolution::Landmark
            } else {
                Resolution::NotFound
            };
        }
        let limit = self.landmarks.radius(s) + self.landmarks.radius(t);
        match match_vicinities(s, t, &self.tables[i], &self.tables[j], limit).distance {
            Some(d) => Resolution::Vicinity(d),
            None => Resolution::NotFound,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolution {
    Landmark,
    Vicinity(u32),
    NotFound,
}

/// Oracle answers re-run through bidirectional BFS.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub checked: u64,
    pub mismatches: u64,
}

impl CrossCheck {
    fn record(&mut self, scratch: &mut SearchScratch, g: &Graph, s: NodeId, t: NodeId, answer: u32) {
        let exact = scratch
            .bidirectional_bfs(g, s, t, false)
            .expect("unweighted, in range")
            .distance;
        self.checked += 1;
        if exact != Some(answer) {
            self.mismatches += 1;
        }
    }

    pub fn merge(&mut self, other: CrossCheck) {
        self.checked += other.checked;
        self.mismatches += other.mismatches;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionRow {
    pub alpha: f64,
    pub trial: usize,
    /// Pairs answered without fallback.
    pub fraction: f64,
    pub pairs: u64,
    pub landmark_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionReport {
    pub rows: Vec<IntersectionRow>,
    pub cross_check: CrossCheck,
}

impl IntersectionReport {
    /// Mean fraction over trials for each alpha, in sweep order.
    pub fn mean_by_alpha(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64, usize)> = Vec::new();
        for row in &self.rows {
            match out.iter_mut().find(|(a, _, _)| *a == row.alpha) {
                Some(slot) => {
                    slot.1 += row.fraction;
                    slot.2 += 1;
                }
                None => out.push((row.alpha, row.fraction, 1)),
            }
        }
        out.into_iter().map(|(a, sum, k)| (a, sum / k as f64)).collect()
    }
}

/// Share of sampled pairs each alpha answers without fallback.
pub fn run_intersection_experiment(g: &Graph, cfg: &ExperimentConfig) -> Result<IntersectionReport, BenchError> {
    cfg.validate()?;
    let pool = WorkerPool::new(0)?;
    let comps = connected_components(g);
    let mut scratch = SearchScratch::new(g.node_count());
    let mut cross_check = CrossCheck::default();
    let mut rows = Vec::new();
    for trial in 0..cfg.trials {
        let nodes = trial_nodes(g, cfg, trial);
        for &alpha in &cfg.alphas {
            let landmarks = trial_landmarks(g, alpha, cfg, trial)?;
            let landmark_count = landmarks.len();
            let sampled = SampledVicinities::build(g, landmarks, nodes.clone(), &pool);
            let mut check_rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, trial, CHECK_STREAM));
            let (mut pairs, mut found) = (0u64, 0u64);
            for i in 0..nodes.len() {
                for j in i + 1..nodes.len() {
                    pairs += 1;
                    let r = sampled.resolve(&comps, i, j);
                    if r != Resolution::NotFound {
                        found += 1;
                    }
                    if let Resolution::Vicinity(d) = r {
                        if check_rng.gen_bool(cfg.cross_check_rate) {
                            cross_check.record(&mut scratch, g, nodes[i], nodes[j], d);
                        }
                    }
                }
            }
            rows.push(IntersectionRow {
                alpha,
                trial,
                fraction: if pairs == 0 { 1.0 } else { found as f64 / pairs as f64 },
                pairs,
                landmark_count,
            });
        }
    }
    Ok(IntersectionReport { rows, cross_check })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CdfPoint {
    pub quantile: f64,
    pub fraction_of_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub alpha: f64,
    pub points: Vec<CdfPoint>,
    pub sampled_nodes: usize,
    pub max_fraction: f64,
    pub mean_fraction: f64,
    /// Sampled nodes whose boundary exceeds their vicinity (must be 0).
    pub oversized: usize,
}

/// Empirical CDF of |boundary| / n over the nodes sampled in every trial,
/// at `cfg.property_alpha`. Points use the nearest-rank quantile, so the
/// last one is the maximum observed.
pub fn run_boundary_cdf(g: &Graph, cfg: &ExperimentConfig) -> Result<BoundaryReport, BenchError> {
    cfg.validate()?;
    let pool = WorkerPool::new(0)?;
    let n = g.node_count() as f64;
    let mut fractions = Vec::new();
    let mut oversized = 0;
    for trial in 0..cfg.trials {
        let landmarks = trial_landmarks(g, cfg.property_alpha, cfg, trial)?;
        let sampled = SampledVicinities::build(g, landmarks, trial_nodes(g, cfg, trial), &pool);
        for t in &sampled.tables {
            if t.boundary_len() > t.len() {
                oversized += 1;
            }
            fractions.push(t.boundary_len() as f64 / n);
        }
    }
    fractions.sort_by(f64::total_cmp);
    let k = fractions.len();
    let points = (0..cfg.cdf_points)
        .map(|i| {
            let quantile = i as f64 / (cfg.cdf_points - 1) as f64;
            let rank = ((quantile * k as f64).ceil() as usize).clamp(1, k);
            CdfPoint {
                quantile,
                fraction_of_n: fractions[rank - 1],
            }
        })
        .collect();
    Ok(BoundaryReport {
        alpha: cfg.property_alpha,
        points,
        sampled_nodes: k,
        max_fraction: fractions.last().copied().unwrap_or(0.0),
        mean_fraction: fractions.iter().sum::<f64>() / k.max(1) as f64,
        oversized,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusRow {
    pub alpha: f64,
    /// Mean over all nodes of the distance to the nearest landmark,
    /// averaged over trials.
    pub mean_hops: f64,
    pub landmark_count: f64,
}

pub fn run_radius_stats(g: &Graph, cfg: &ExperimentConfig) -> Result<Vec<RadiusRow>, BenchError> {
    cfg.validate()?;
    let n = g.node_count() as f64;
    let mut rows = Vec::new();
    for &alpha in &cfg.alphas {
        let (mut radius, mut count) = (0.0, 0.0);
        for trial in 0..cfg.trials {
            let landmarks = trial_landmarks(g, alpha, cfg, trial)?;
            radius += landmarks.radii().iter().map(|&r| r as f64).sum::<f64>() / n;
            count += landmarks.len() as f64;
        }
        let trials = cfg.trials as f64;
        rows.push(RadiusRow {
            alpha,
            mean_hops: radius / trials,
            landmark_count: count / trials,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatencyRow {
    pub method: String,
    pub mean_us: f64,
    pub worst_us: f64,
    /// Empty for the search baselines.
    pub mean_probes: Option<f64>,
    /// Bidirectional BFS mean over the same pairs divided by this mean.
    pub speedup: f64,
    pub pairs: usize,
    pub p50_us: f64,
    pub p99_us: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatencyReport {
    pub alpha: f64,
    pub rows: Vec<LatencyRow>,
    pub pairs: usize,
    pub intersecting_pairs: usize,
    pub not_found_pairs: usize,
    /// Queries whose probe count exceeded min(|B(s)|, |B(t)|) + 4.
    pub probe_bound_violations: usize,
    pub max_probes: u32,
    pub max_boundary: usize,
    /// Every found oracle answer is compared with bidirectional BFS.
    pub cross_check: CrossCheck,
}

impl LatencyReport {
    pub fn row(&self, method: &str) -> Option<&LatencyRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

/// Per-query wall times in microseconds.
struct Timings(Vec<f64>);

impl Timings {
    /// Mean after dropping the fastest and slowest 1%.
    fn robust_mean(&self) -> f64 {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        let cut = v.len() / 100;
        let kept = &v[cut..v.len() - cut];
        kept.iter().sum::<f64>() / kept.len().max(1) as f64
    }

    fn quantile(&self, q: f64) -> f64 {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len().max(1));
        v.get(rank - 1).copied().unwrap_or(0.0)
    }

    fn worst(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    fn subset(&self, keep: &[bool]) -> Timings {
        Timings(self.0.iter().zip(keep).filter(|(_, &k)| k).map(|(&t, _)| t).collect())
    }
}

fn time_each<F: FnMut(NodeId, NodeId)>(pairs: &[(NodeId, NodeId)], mut f: F) -> Timings {
    Timings(
        pairs
            .iter()
            .map(|&(s, t)| {
                let start = Instant::now();
                f(s, t);
                start.elapsed().as_secs_f64() * 1e6
            })
            .collect(),
    )
}

/// Random ordered pairs of distinct nodes.
pub fn latency_pairs(g: &Graph, cfg: &ExperimentConfig) -> Vec<(NodeId, NodeId)> {
    let n = g.node_count() as NodeId;
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, 0, PAIR_STREAM));
    let mut pairs = Vec::with_capacity(cfg.latency_pairs);
    while pairs.len() < cfg.latency_pairs && n > 1 {
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if s != t {
            pairs.push((s, t));
        }
    }
    pairs
}

/// Times the oracle against plain and bidirectional BFS on the calling
/// thread. Each method gets one untimed warm-up pass first.
pub fn run_latency_bench(oracle: &Oracle<u32>, cfg: &ExperimentConfig) -> Result<LatencyReport, BenchError> {
    cfg.validate()?;
    let g = oracle.graph();
    let pairs = latency_pairs(g, cfg);
    let mut scratch = SearchScratch::new(g.node_count());

    let mut answers = Vec::with_capacity(pairs.len());
    let mut exact = Vec::with_capacity(pairs.len());
    for &(s, t) in &pairs {
        answers.push(oracle.query_distance(s, t)?);
        exact.push(
            scratch
                .bidirectional_bfs(g, s, t, false)
                .expect("unweighted, in range")
                .distance,
        );
        scratch.bfs(g, s, t, false).expect("unweighted, in range");
        oracle.query_with_fallback(s, t, vicinity_core::Search::BidirectionalBfs, false)?;
    }

    let oracle_t = time_each(&pairs, |s, t| {
        std::hint::black_box(oracle.query_distance(s, t).unwrap());
    });
    let fallback_t = time_each(&pairs, |s, t| {
        std::hint::black_box(
            oracle
                .query_with_fallback(s, t, vicinity_core::Search::BidirectionalBfs, false)
                .unwrap(),
        );
    });
    let bidi_t = time_each(&pairs, |s, t| {
        std::hint::black_box(scratch.bidirectional_bfs(g, s, t, false).unwrap());
    });
    let bfs_t = time_each(&pairs, |s, t| {
        std::hint::black_box(scratch.bfs(g, s, t, false).unwrap());
    });

    let found: Vec<bool> = answers.iter().map(|a| a.is_found()).collect();
    let mut cross_check = CrossCheck::default();
    let mut probe_bound_violations = 0;
    for (((s, t), a), e) in pairs.iter().zip(&answers).zip(&exact) {
        if let Some(d) = a.distance {
            cross_check.checked += 1;
            if Some(d) != *e {
                cross_check.mismatches += 1;
            }
        }
        let bound = oracle
            .vicinity(*s)
            .boundary_len()
            .min(oracle.vicinity(*t).boundary_len())
            + 4;
        if a.probes as usize > bound {
            probe_bound_violations += 1;
        }
    }
    let probes = |keep: &dyn Fn(usize) -> bool| {
        let picked: Vec<f64> = (0..pairs.len())
            .filter(|&i| keep(i))
            .map(|i| answers[i].probes as f64)
            .collect();
        picked.iter().sum::<f64>() / picked.len().max(1) as f64
    };

    let bidi_mean = bidi_t.robust_mean();
    let bidi_found = bidi_t.subset(&found);
    let oracle_found = oracle_t.subset(&found);
    let row = |method: &str, t: &Timings, mean_probes: Option<f64>, reference: f64| {
        let mean = t.robust_mean();
        LatencyRow {
            method: method.to_string(),
            mean_us: mean,
            worst_us: t.worst(),
            mean_probes,
            speedup: if mean > 0.0 { reference / mean } else { f64::INFINITY },
            pairs: t.0.len(),
            p50_us: t.quantile(0.5),
            p99_us: t.quantile(0.99),
        }
    };
    let rows = vec![
        row("oracle_all_pairs", &oracle_t, Some(probes(&|_| true)), bidi_mean),
        row(
            "oracle_intersecting",
            &oracle_found,
            Some(probes(&|i| found[i])),
            bidi_found.robust_mean(),
        ),
        row("oracle_with_fallback", &fallback_t, None, bidi_mean),
        row("bidirectional_bfs", &bidi_t, None, bidi_mean),
        row(
            "bidirectional_bfs_intersecting",
            &bidi_found,
            None,
            bidi_found.robust_mean(),
        ),
        row("bfs", &bfs_t, None, bidi_mean),
    ];
    let intersecting_pairs = found.iter().filter(|&&f| f).count();
    Ok(LatencyReport {
        alpha: oracle.alpha(),
        rows,
        pairs: pairs.len(),
        intersecting_pairs,
        not_found_pairs: pairs.len() - intersecting_pairs,
        probe_bound_violations,
        max_probes: answers.iter().map(|a| a.probes).max().unwrap_or(0),
        max_boundary: oracle.stats().max_boundary_size,
        cross_check,
    })
}
