//! Cost-scaling minimum-cost circulation solver.
//!
//! Starting from the zero circulation with zero prices and `eps = C`, each
//! refine iteration halves `eps`, saturates all admissible arcs and restores
//! a circulation through alternating set-relabel and blocking-guided pushes.
//! When the admissible network is acyclic afterwards, a capped price-only
//! refinement may halve `eps` again without touching the flow.

mod refine;
mod restore;
mod state;

use std::fmt;

pub use refine::{admissible_topological_order, price_refinement, price_refinement_cap, update_arc_fixing};
pub use restore::{push_relabel_along_blocking, set_relabel, BlockingStructure, PushOutcome};
pub use state::{check_epsilon_optimality, SolverState};

use crate::error::SolveError;
use crate::graph::CirculationNetwork;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub arc_fixing: bool,
    /// Arcs with `|c_p| > fixing_factor * n * eps` are fixed.
    pub fixing_factor: i64,
    /// Push budget per blocking step is `push_budget_factor * m`.
    pub push_budget_factor: u64,
    pub collect_stats: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            arc_fixing: true,
            fixing_factor: 2,
            push_budget_factor: 2,
            collect_stats: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub refine_iterations: u64,
    pub restore_iterations: u64,
    pub pushes: u64,
    /// Price raises applied to individual nodes by set-relabel.
    pub relabels: u64,
    pub set_relabel_calls: u64,
    /// Epsilon rounds summed over set-relabel calls.
    pub set_relabel_rounds: u64,
    pub price_refinement_attempts: u64,
    pub price_refinement_successes: u64,
    pub scanned_arcs: u64,
    pub fixed_arcs: u64,
    pub polished: bool,
}

impl fmt::Display for SolverStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "refine_iterations={}", self.refine_iterations)?;
        writeln!(f, "restore_iterations={}", self.restore_iterations)?;
        writeln!(f, "pushes={}", self.pushes)?;
        writeln!(f, "relabels={}", self.relabels)?;
        writeln!(f, "set_relabel_calls={}", self.set_relabel_calls)?;
        writeln!(f, "set_relabel_rounds={}", self.set_relabel_rounds)?;
        writeln!(f, "price_refinement_attempts={}", self.price_refinement_attempts)?;
        writeln!(f, "price_refinement_successes={}", self.price_refinement_successes)?;
        writeln!(f, "scanned_arcs={}", self.scanned_arcs)?;
        writeln!(f, "fixed_arcs={}", self.fixed_arcs)?;
        writeln!(f, "polished={}", self.polished)
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Per original arc: carries one unit of flow.
    pub flow: Vec<bool>,
    /// Total cost in the network's integer units.
    pub total_cost: i64,
    pub prices: Vec<i64>,
    pub stats: SolverStats,
}

/// One halving step: fixing re-check, saturation, RESTORE, price refinement.
pub fn refine_once(state: &mut SolverState, net: &CirculationNetwork) -> Result<(), SolveError> {
    update_arc_fixing(state, net);
    state.epsilon = (state.epsilon + 1) / 2;
    state.saturate_admissible(net);
    restore(state, net)?;
    let cap = price_refinement_cap(state.node_count);
    while state.epsilon > 1 && price_refinement(state, net, cap) {}
    state.stats.refine_iterations += 1;
    Ok(())
}

/// Alternates set-relabel and push/relabel rounds until no excess remains.
pub fn restore(state: &mut SolverState, net: &CirculationNetwork) -> Result<(), SolveError> {
    let budget = (state.opts.push_budget_factor * net.arc_count() as u64).max(1);
    while state.total_excess() > 0 {
        let blocking = set_relabel(state, net)?;
        let outcome = push_relabel_along_blocking(state, net, &blocking, budget);
        state.stats.restore_iterations += 1;
        debug_assert!(outcome.excess_after < outcome.excess_before);
    }
    Ok(())
}

/// Step-wise driver; `solve` runs it to completion.
pub struct CostScalingSolver<'a> {
    net: &'a CirculationNetwork,
    state: SolverState,
}

impl<'a> CostScalingSolver<'a> {
    pub fn new(net: &'a CirculationNetwork, opts: &SolveOptions) -> Result<Self, SolveError> {
        Ok(CostScalingSolver {
            net,
            state: SolverState::new(net, opts)?,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn is_finished(&self) -> bool {
        self.state.epsilon <= 1
    }

    /// Runs one refine iteration; returns false when already finished.
    pub fn step(&mut self) -> Result<bool, SolveError> {
        if self.is_finished() {
            return Ok(false);
        }
        refine_once(&mut self.state, self.net)?;
        Ok(true)
    }

    pub fn finish(mut self) -> Result<Solution, SolveError> {
        while self.step()? {}
        if !check_epsilon_optimality(&self.state, self.net) {
            // a fixed arc drifted out of 1-optimality: release all and redo
            // one refine at eps = 1
            self.state.opts.arc_fixing = false;
            update_arc_fixing(&mut self.state, self.net);
            self.state.saturate_admissible(self.net);
            restore(&mut self.state, self.net)?;
            self.state.stats.polished = true;
        }
        let mut stats = std::mem::take(&mut self.state.stats);
        if !self.state.opts.collect_stats {
            stats = SolverStats::default();
        }
        Ok(Solution {
            total_cost: self.state.flow_cost(self.net),
            flow: self.state.flow,
            prices: self.state.price,
            stats,
        })
    }
}

pub fn solve(net: &CirculationNetwork, opts: &SolveOptions) -> Result<Solution, SolveError> {
    CostScalingSolver::new(net, opts)?.finish()
}

/// Like [`solve`], calling `observer` after every refine iteration.
pub fn solve_with_observer<F: FnMut(&SolverState)>(
    net: &CirculationNetwork,
    opts: &SolveOptions,
    mut observer: F,
) -> Result<Solution, SolveError> {
    let mut solver = CostScalingSolver::new(net, opts)?;
    while solver.step()? {
        observer(solver.state());
    }
    solver.finish()
}

/// `ceil(log2(n * C)) + 1`, the refine-iteration bound.
pub fn refine_iteration_bound(net: &CirculationNetwork) -> u64 {
    let nc = (net.node_count() as u128) * (net.max_abs_cost().max(0) as u128);
    if nc <= 1 {
        return 1;
    }
    let ceil_log2 = 128 - (nc - 1).leading_zeros() as u64;
    ceil_log2 + 1
}
