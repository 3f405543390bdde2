use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::time::{Duration, Instant};

use crate::baseline::{dssp_solve, ssp_solve};
use crate::costs::{probabilistic_costs, refine_costs, CostAssignment};
use crate::error::PipelineError;
use crate::graph::{build_network, CirculationNetwork, Detection};
use crate::scalar::Real;
use crate::solver::{solve, SolveOptions, SolverStats};
use crate::trajectory::TrajectorySet;

use super::config::{SolverKind, TrackConfig};
use super::ingest::read_detections;
use super::output::write_trajectories_csv;
use super::trajectories::flow_to_trajectories;

#[derive(Debug, Clone)]
pub struct IterationReport {
    pub cost: i64,
    pub trajectories: usize,
    pub arcs: usize,
    /// Jump probability used for this iteration's costs (refined passes).
    pub p_jump: Option<f64>,
    pub build: Duration,
    pub solve: Duration,
    pub decode: Duration,
    pub stats: Option<SolverStats>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub detections: usize,
    pub iterations: Vec<IterationReport>,
    pub config: String,
}

impl RunReport {
    pub fn total(&self, stage: fn(&IterationReport) -> Duration) -> Duration {
        self.iterations.iter().map(stage).sum()
    }

    pub fn final_cost(&self) -> i64 {
        self.iterations.last().map_or(0, |r| r.cost)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[run]")?;
        writeln!(f, "detections = {}", self.detections)?;
        writeln!(f, "build_seconds = {:.6}", self.total(|r| r.build).as_secs_f64())?;
        writeln!(f, "solve_seconds = {:.6}", self.total(|r| r.solve).as_secs_f64())?;
        writeln!(f, "decode_seconds = {:.6}", self.total(|r| r.decode).as_secs_f64())?;
        writeln!(f, "cost = {}", self.final_cost())?;
        writeln!(
            f,
            "trajectories = {}",
            self.iterations.last().map_or(0, |r| r.trajectories)
        )?;
        for (k, it) in self.iterations.iter().enumerate() {
            writeln!(f, "\n[iteration {}]", k + 1)?;
            writeln!(f, "cost = {}", it.cost)?;
            writeln!(f, "trajectories = {}", it.trajectories)?;
            writeln!(f, "arcs = {}", it.arcs)?;
            if let Some(p) = it.p_jump {
                writeln!(f, "p_jump = {p}")?;
            }
            writeln!(f, "build_seconds = {:.6}", it.build.as_secs_f64())?;
            writeln!(f, "solve_seconds = {:.6}", it.solve.as_secs_f64())?;
            writeln!(f, "decode_seconds = {:.6}", it.decode.as_secs_f64())?;
            if let Some(s) = &it.stats {
                write!(f, "{s}")?;
            }
        }
        writeln!(f, "\n[config]")?;
        writeln!(f, "{}", self.config)
    }
}

/// Solves `net` with the chosen solver: flow, cost and (for the
/// cost-scaling solver) statistics.
pub fn solve_with(
    net: &CirculationNetwork,
    kind: SolverKind,
    arc_fixing: bool,
) -> Result<(Vec<bool>, i64, Option<SolverStats>), PipelineError> {
    let stage = "solve";
    let wrap = |source| PipelineError::Solve { stage, source };
    Ok(match kind {
        SolverKind::Cinda => {
            let opts = SolveOptions {
                arc_fixing,
                ..Default::default()
            };
            let s = solve(net, &opts).map_err(wrap)?;
            (s.flow, s.total_cost, Some(s.stats))
        }
        SolverKind::Ssp => {
            let r = ssp_solve(net, None).map_err(wrap)?;
            (r.flow, r.total_cost, None)
        }
        SolverKind::Dssp => {
            let r = dssp_solve(net, None).map_err(wrap)?;
            (r.flow, r.total_cost, None)
        }
    })
}

/// Runs all configured iterations on in-memory detections, calling
/// `observe` with every iteration's trajectories.
pub fn track_detections_with<T: Real, F>(
    detections: &[Detection<T>],
    config: &TrackConfig,
    mut observe: F,
) -> Result<(TrajectorySet, RunReport), PipelineError>
where
    F: FnMut(usize, &TrajectorySet),
{
    config.validate()?;
    let cost_cfg = config_in::<T>(config);
    let frames: Vec<u32> = detections.iter().map(|d| d.frame).collect();
    let mut report = RunReport {
        detections: detections.len(),
        iterations: Vec::new(),
        config: config.to_string(),
    };
    let mut current = TrajectorySet::default();
    for k in 0..config.iterations {
        let t0 = Instant::now();
        let (costs, p_jump): (CostAssignment<T>, Option<f64>) = if k == 0 {
            let c = probabilistic_costs(detections, &cost_cfg)
                .map_err(|source| PipelineError::Cost { stage: "costs", source })?;
            (c, None)
        } else {
            let r = refine_costs(&current, detections, &cost_cfg)
                .map_err(|source| PipelineError::Cost { stage: "refine", source })?;
            (r.costs, r.p_jump.and_then(|p| p.to_f64()))
        };
        let net = build_network(detections, &costs, cost_cfg.cost_scale)
            .map_err(|source| PipelineError::Graph { stage: "build", source })?;
        let t1 = Instant::now();
        let (flow, cost, stats) = solve_with(&net, config.solver, config.arc_fixing)?;
        let t2 = Instant::now();
        current = flow_to_trajectories(&flow, &net)?;
        if let Err(detail) = current.check(&frames) {
            return Err(PipelineError::Disagreement {
                instance: format!("iteration {}", k + 1),
                detail,
            });
        }
        debug_assert_eq!(current.total_cost(), cost);
        let t3 = Instant::now();
        observe(k, &current);
        report.iterations.push(IterationReport {
            cost,
            trajectories: current.len(),
            arcs: net.arc_count(),
            p_jump,
            build: t1 - t0,
            solve: t2 - t1,
            decode: t3 - t2,
            stats,
        });
    }
    Ok((current, report))
}

pub fn track_detections<T: Real>(
    detections: &[Detection<T>],
    config: &TrackConfig,
) -> Result<(TrajectorySet, RunReport), PipelineError> {
    track_detections_with(detections, config, |_, _| {})
}

// the cost model is configured in f64; convert to the working scalar
fn config_in<T: Real>(config: &TrackConfig) -> crate::costs::CostModelConfig<T> {
    use crate::costs::{BetaPolicy, CostModelConfig, EndpointProbability};
    let c = &config.costs;
    let conv = |p: EndpointProbability<f64>| match p {
        EndpointProbability::Fixed(p) => EndpointProbability::Fixed(T::lit(p)),
        EndpointProbability::FromCounts => EndpointProbability::FromCounts,
    };
    CostModelConfig {
        p_enter: conv(c.p_enter),
        p_exit: conv(c.p_exit),
        beta: match c.beta {
            BetaPolicy::PerDetection => BetaPolicy::PerDetection,
            BetaPolicy::Global(b) => BetaPolicy::Global(T::lit(b)),
        },
        observation: c.observation,
        gating_k: c.gating_k,
        jump_window: c.jump_window,
        distance_scale: T::lit(c.distance_scale),
        distance_samples: c
            .distance_samples
            .as_ref()
            .map(|s| s.iter().map(|&v| T::lit(v)).collect()),
        cost_scale: c.cost_scale,
    }
}

/// File-to-file run: reads `config.input`, writes the trajectory CSV and
/// the report when their paths are set.
pub fn run_tracking(config: &TrackConfig) -> Result<(TrajectorySet, RunReport), PipelineError> {
    config.validate()?;
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| PipelineError::Config("no input file given".into()))?;
    let detections = read_detections(input, config.format)?;
    let (set, report) = track_detections(&detections, config)?;
    let io = |path: &std::path::Path| {
        let label = path.display().to_string();
        move |e: std::io::Error| PipelineError::Io { path: label, source: e }
    };
    if let Some(path) = &config.output {
        let file = File::create(path).map_err(io(path))?;
        write_trajectories_csv(BufWriter::new(file), &set, &detections).map_err(|e| {
            PipelineError::Io {
                path: path.display().to_string(),
                source: e.into(),
            }
        })?;
    }
    if let Some(path) = &config.report {
        std::fs::write(path, report.to_string()).map_err(io(path))?;
    }
    Ok((set, report))
}
