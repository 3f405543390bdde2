use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("duplicate detection id {0}")]
    DuplicateDetection(u64),
    #[error("transition {from} -> {to} does not go forward in time (frames {from_frame} -> {to_frame})")]
    TemporalOrder {
        from: usize,
        to: usize,
        from_frame: u32,
        to_frame: u32,
    },
    #[error("transition references detection index {0} which does not exist")]
    UnknownDetection(usize),
    #[error("non-finite cost for {0}")]
    NonFiniteCost(String),
    #[error("scaled cost {value} for {what} exceeds the supported magnitude {bound}")]
    CostOverflow { what: String, value: f64, bound: i64 },
    #[error("cost vectors have {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("positions have mixed dimensionality ({0} vs {1})")]
    MixedDimension(usize, usize),
    #[error("arc {arc} references node {node} outside 0..{n}")]
    NodeOutOfRange { arc: usize, node: usize, n: usize },
    #[error("graph dump line {line}: {msg}")]
    Dump { line: usize, msg: String },
}

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("empirical distance model needs at least one sample")]
    EmptySample,
    #[error("non-finite {what} for detection {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("invalid cost model configuration: {0}")]
    Config(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("costs too large: C * (n + 1) * n overflows 64-bit prices (C = {max_cost}, n = {nodes})")]
    CostRange { max_cost: i64, nodes: usize },
    #[error("excess node {0} cannot reach any deficit node in the residual graph")]
    UnreachableExcess(usize),
    #[error("brute-force oracle supports at most {limit} detections, got {got}")]
    TooLarge { limit: usize, got: usize },
    #[error("non-finite gradient at arc {0}")]
    NonFiniteGradient(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Graph {
        stage: &'static str,
        #[source]
        source: GraphError,
    },
    #[error("{stage}: {source}")]
    Cost {
        stage: &'static str,
        #[source]
        source: CostError,
    },
    #[error("{stage}: {source}")]
    Solve {
        stage: &'static str,
        #[source]
        source: SolveError,
    },
    #[error("flow violates conservation at node {node} (in {inflow}, out {outflow})")]
    Conservation {
        node: usize,
        inflow: usize,
        outflow: usize,
    },
    #[error("solvers disagree on instance {instance}: {detail}")]
    Disagreement { instance: String, detail: String },
}

impl PipelineError {
    /// Input problems map to 1, broken internal invariants to 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Parse { .. }
            | PipelineError::Io { .. }
            | PipelineError::Config(_)
            | PipelineError::Cost { .. } => 1,
            PipelineError::Graph { .. } => 1,
            PipelineError::Solve { source, .. } => match source {
                SolveError::CostRange { .. } | SolveError::InvalidArgument(_) => 1,
                _ => 2,
            },
            PipelineError::Conservation { .. } | PipelineError::Disagreement { .. } => 2,
        }
    }
}
