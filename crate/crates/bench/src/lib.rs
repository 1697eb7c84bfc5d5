//! Desk-scale measurement harness: vicinity intersection rate, boundary
//! sizes, and radii across alpha, plus query latency against BFS.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod suite;

pub use config::{ExperimentConfig, GraphSource, PairMode};
pub use error::BenchError;
pub use experiments::{
    run_boundary_cdf, run_intersection_experiment, run_latency_bench, run_radius_stats, BoundaryReport, CdfPoint,
    CrossCheck, IntersectionReport, IntersectionRow, LatencyReport, LatencyRow, RadiusRow,
};
pub use report::{run_all, BenchReport, RunMetadata};
