//! CSV outputs and the JSON metadata sidecar.
//!
//! | file | columns |
//! |---|---|
//! | `intersection.csv` | alpha, trial, fraction, pairs, landmark_count |
//! | `boundary_cdf.csv` | quantile, fraction_of_n |
//! | `radius.csv` | alpha, mean_hops, landmark_count |
//! | `latency.csv` | method, mean_us, worst_us, mean_probes, speedup, pairs, p50_us, p99_us |
//!
//! The leading columns of each file are fixed; later ones may be appended.

use std::fs::{self, File};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use vicinity_core::{build_oracle, BuildStats, Graph};

use crate::config::ExperimentConfig;
use crate::error::BenchError;
use crate::experiments::{
    run_boundary_cdf, run_intersection_experiment, run_latency_bench, run_radius_stats, BoundaryReport,
    IntersectionReport, LatencyReport, RadiusRow,
};

pub const BFS_POLICY: &str = "BFS and bidirectional BFS stop as soon as the target's distance is fixed";
pub const LATENCY_PROTOCOL: &str = "single thread, one untimed warm-up pass per method, per-query monotonic timing, \
mean drops the fastest and slowest 1%, worst is the maximum; oracle rows are reported over all pairs and over \
the intersecting subset, each with bidirectional BFS timed on the same pairs";

#[derive(Clone, Debug, Serialize)]
pub struct GraphInfo {
    pub n: usize,
    pub m: usize,
    pub fingerprint: String,
    pub preprocessing: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Hardware {
    pub os: &'static str,
    pub arch: &'static str,
    pub logical_cpus: usize,
    pub cpu_model: Option<String>,
    pub parallel_feature: bool,
}

impl Hardware {
    pub fn detect() -> Self {
        let cpu_model = fs::read_to_string("/proc/cpuinfo").ok().and_then(|text| {
            text.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|s| s.trim().to_string())
        });
        Hardware {
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            logical_cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cpu_model,
            parallel_feature: vicinity_core::PARALLEL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunMetadata {
    pub config: ExperimentConfig,
    pub graph: GraphInfo,
    pub hardware: Hardware,
    pub bfs_policy: &'static str,
    pub latency_protocol: &'static str,
    pub latency_oracle: BuildStats,
    pub intersection_cross_check: crate::experiments::CrossCheck,
    pub boundary_max_fraction: f64,
    pub boundary_mean_fraction: f64,
    pub latency: LatencyReport,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub intersection: IntersectionReport,
    pub boundary: BoundaryReport,
    pub radius: Vec<RadiusRow>,
    pub latency: LatencyReport,
    pub metadata: RunMetadata,
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

impl BenchReport {
    pub fn write(&self, dir: &Path) -> Result<(), BenchError> {
        fs::create_dir_all(dir)?;
        write_rows(&dir.join("intersection.csv"), &self.intersection.rows)?;
        write_rows(&dir.join("boundary_cdf.csv"), &self.boundary.points)?;
        write_rows(&dir.join("radius.csv"), &self.radius)?;
        write_rows(&dir.join("latency.csv"), &self.latency.rows)?;
        let meta = File::create(dir.join("metadata.json"))?;
        serde_json::to_writer_pretty(meta, &self.metadata)?;
        Ok(())
    }
}

/// Runs every experiment on `cfg.graph`. `workers` only affects the build
/// of the latency oracle; timing itself is single-threaded.
pub fn run_all(cfg: &ExperimentConfig, workers: usize) -> Result<BenchReport, BenchError> {
    cfg.validate()?;
    let start = Instant::now();
    let g = cfg.graph.load()?;
    run_on_graph(cfg, g, workers, start)
}

pub fn run_on_graph(
    cfg: &ExperimentConfig,
    g: Graph,
    workers: usize,
    start: Instant,
) -> Result<BenchReport, BenchError> {
    let graph = GraphInfo {
        n: g.node_count(),
        m: g.edge_count(),
        fingerprint: format!("{:016x}", g.fingerprint()),
        preprocessing: cfg.graph.preprocessing(),
    };
    let intersection = run_intersection_experiment(&g, cfg)?;
    let boundary = run_boundary_cdf(&g, cfg)?;
    let radius = run_radius_stats(&g, cfg)?;
    let oracle = build_oracle::<u32>(g, cfg.latency_alpha, cfg.seed, workers)?;
    let latency = run_latency_bench(&oracle, cfg)?;
    let metadata = RunMetadata {
        config: cfg.clone(),
        graph,
        hardware: Hardware::detect(),
        bfs_policy: BFS_POLICY,
        latency_protocol: LATENCY_PROTOCOL,
        latency_oracle: oracle.stats().clone(),
        intersection_cross_check: intersection.cross_check,
        boundary_max_fraction: boundary.max_fraction,
        boundary_mean_fraction: boundary.mean_fraction,
        latency: latency.clone(),
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok(BenchReport {
        intersection,
        boundary,
        radius,
        latency,
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GraphSource;

    #[test]
    fn writes_all_files_with_stable_headers() {
        let cfg = ExperimentConfig {
            graph: GraphSource::BarabasiAlbert { n: 500, k: 3, seed: 4 },
            alphas: vec![1.0, 4.0],
            nodes_per_trial: 20,
            trials: 2,
            cdf_points: 5,
            latency_pairs: 50,
            ..Default::default()
        };
        let report = run_all(&cfg, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        report.write(dir.path()).unwrap();
        let header = |name: &str| {
            let text = fs::read_to_string(dir.path().join(name)).unwrap();
            (text.lines().next().unwrap().to_string(), text.lines().count())
        };
        assert_eq!(
            header("intersection.csv"),
            ("alpha,trial,fraction,pairs,landmark_count".into(), 5)
        );
        assert_eq!(header("boundary_cdf.csv"), ("quantile,fraction_of_n".into(), 6));
        assert_eq!(header("radius.csv"), ("alpha,mean_hops,landmark_count".into(), 3));
        assert_eq!(
            header("latency.csv"),
            (
                "method,mean_us,worst_us,mean_probes,speedup,pairs,p50_us,p99_us".into(),
                7
            )
        );
        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("metadata.json")).unwrap()).unwrap();
        assert_eq!(meta["graph"]["n"], 500);
        assert_eq!(meta["bfs_policy"], BFS_POLICY);
    }

    #[test]
    fn reports_repeat_except_for_timings() {
        let cfg = ExperimentConfig {
            graph: GraphSource::ErdosRenyi {
                n: 300,
                p: 0.03,
                seed: 9,
            },
            alphas: vec![0.5, 2.0],
            nodes_per_trial: 30,
            trials: 2,
            latency_pairs: 40,
            ..Default::default()
        };
        let a = run_all(&cfg, 1).unwrap();
        let b = run_all(&cfg, 1).unwrap();
        assert_eq!(a.intersection, b.intersection);
        assert_eq!(a.boundary, b.boundary);
        assert_eq!(a.radius, b.radius);
        assert_eq!(a.latency.intersecting_pairs, b.latency.intersecting_pairs);
    }
}
