use std::fmt;
use std::time::Instant;

use crate::costs::{probabilistic_costs, CostModelConfig};
use crate::error::PipelineError;
use crate::graph::{build_network, CirculationNetwork};

use super::config::SolverKind;
use super::run::solve_with;
use super::synth::{generate_scene, SceneConfig};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub solvers: Vec<SolverKind>,
    /// Approximate detection counts.
    pub sizes: Vec<usize>,
    pub seed: u64,
    /// Targets visible per frame.
    pub per_frame: usize,
    pub gating_k: usize,
    pub jump_window: u32,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            solvers: SolverKind::ALL.to_vec(),
            sizes: vec![1_000, 10_000],
            seed: 0,
            per_frame: 50,
            gating_k: 3,
            jump_window: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub solver: SolverKind,
    pub size: usize,
    pub detections: usize,
    pub arcs: usize,
    pub seconds: f64,
    pub cost: i64,
}

#[derive(Debug, Clone, Default)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
}

impl fmt::Display for BenchTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "solver,size,detections,arcs,seconds,cost")?;
        for r in &self.rows {
            writeln!(
                f,
                "{},{},{},{},{:.6},{}",
                r.solver, r.size, r.detections, r.arcs, r.seconds, r.cost
            )?;
        }
        Ok(())
    }
}

/// The synthetic tracking network used for a benchmark size.
pub fn bench_network(cfg: &BenchConfig, size: usize) -> Result<CirculationNetwork, PipelineError> {
    let scene = generate_scene(&SceneConfig::sized(size, cfg.per_frame), cfg.seed ^ size as u64);
    let cost_cfg = CostModelConfig::<f64> {
        gating_k: cfg.gating_k,
        jump_window: cfg.jump_window,
        ..Default::default()
    };
    let costs = probabilistic_costs(&scene.detections, &cost_cfg)
        .map_err(|source| PipelineError::Cost { stage: "bench costs", source })?;
    build_network(&scene.detections, &costs, cost_cfg.cost_scale)
        .map_err(|source| PipelineError::Graph { stage: "bench build", source })
}

/// Runs every solver on every size; fails if any two solvers report
/// different optimal costs on the same instance.
pub fn benchmark(cfg: &BenchConfig) -> Result<BenchTable, PipelineError> {
    let mut table = BenchTable::default();
    for &size in &cfg.sizes {
        let net = bench_network(cfg, size)?;
        let mut rows: Vec<BenchRow> = Vec::new();
        for &solver in &cfg.solvers {
            let t = Instant::now();
            let (_, cost, _) = solve_with(&net, solver, true)?;
            rows.push(BenchRow {
                solver,
                size,
                detections: net.detection_count(),
                arcs: net.arc_count(),
                seconds: t.elapsed().as_secs_f64(),
                cost,
            });
        }
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.cost != first.cost) {
                let detail = rows
                    .iter()
                    .map(|r| format!("{}={}", r.solver, r.cost))
                    .collect::<Vec<_>>()
                    .join(", ");
                return Err(PipelineError::Disagreement {
                    instance: format!("size {size} seed {}", cfg.seed),
                    detail,
                });
            }
        }
        table.rows.extend(rows);
    }
    Ok(table)
}
