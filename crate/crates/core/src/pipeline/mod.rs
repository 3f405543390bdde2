//! End-to-end tracking: ingest, costs, network, solve, decode, refine.

pub mod bench;
pub mod config;
pub mod ingest;
pub mod metrics;
pub mod output;
pub mod run;
pub mod synth;
pub mod trajectories;

pub use bench::{bench_network, benchmark, BenchConfig, BenchRow, BenchTable};
pub use config::{SolverKind, TrackConfig};
pub use ingest::{parse_detections, read_detections, InputFormat};
pub use metrics::id_switches;
pub use output::write_trajectories_csv;
pub use run::{run_tracking, solve_with, track_detections, track_detections_with, IterationReport, RunReport};
pub use synth::{generate_scene, Scene, SceneConfig};
pub use trajectories::flow_to_trajectories;
