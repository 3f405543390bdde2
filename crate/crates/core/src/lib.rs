//! Minimum-cost circulation data association for multi-object tracking.
//!
//! Detections become a unit-capacity circulation network whose optimal
//! circulation decomposes into trajectories. The network is solved by a
//! cost-scaling algorithm ([`solver`]); [`baseline`] holds successive
//! shortest path references and an exhaustive oracle, [`fw`] a Frank-Wolfe
//! loop for quadratic objectives and [`pipeline`] the end-to-end tracker.
//!
//! Real-valued parts are generic over [`Real`] (`f32`/`f64`); the solver
//! works on exact `i64` costs.

pub mod baseline;
pub mod costs;
pub mod error;
pub mod fw;
pub mod graph;
pub mod instances;
pub mod pipeline;
mod scalar;
pub mod solver;
pub mod trajectory;

pub use error::{CostError, GraphError, PipelineError, SolveError};
pub use graph::{build_network, validate_network, ArcKind, CirculationNetwork, Detection};
pub use scalar::Real;
pub use solver::{solve, SolveOptions, Solution};
pub use trajectory::{Trajectory, TrajectorySet};

pub type DetectionF64 = graph::Detection<f64>;
pub type DetectionF32 = graph::Detection<f32>;
pub type CostAssignmentF64 = costs::CostAssignment<f64>;
pub type CostAssignmentF32 = costs::CostAssignment<f32>;
pub type CostModelConfigF64 = costs::CostModelConfig<f64>;
pub type QuadraticObjectiveF64 = fw::QuadraticObjective<f64>;

