//! Reference solvers on the source/sink flow formulation and an exhaustive
//! oracle, used to cross-check the circulation solver.

mod dssp;
mod flow_network;
mod oracle;
mod ssp;

pub use dssp::dssp_solve;
pub use flow_network::FlowNetwork;
pub use oracle::{brute_force_oracle, enumerate_circulations, OracleResult, ORACLE_MAX_DETECTIONS};
pub use ssp::{ssp_solve, SspResult};
