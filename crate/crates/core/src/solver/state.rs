use crate::error::SolveError;
use crate::graph::CirculationNetwork;

use super::{SolveOptions, SolverStats};

/// Mutable pseudo-flow, prices and scaling parameter of one solve.
///
/// Costs are kept multiplied by `n + 1`, so an internal `epsilon` of 1
/// corresponds to `1 / (n + 1) < 1 / n` in the network's integer units and
/// certifies optimality.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub(crate) node_count: usize,
    pub(crate) cost: Vec<i64>,
    pub(crate) flow: Vec<bool>,
    pub(crate) price: Vec<i64>,
    pub(crate) excess: Vec<i64>,
    pub(crate) epsilon: i64,
    pub(crate) multiplier: i64,
    pub(crate) fixed: Vec<bool>,
    // residual arcs of non-fixed original arcs, grouped by tail
    pub(crate) active_first: Vec<u32>,
    pub(crate) active_arcs: Vec<u32>,
    pub(crate) stats: SolverStats,
    pub(crate) opts: SolveOptions,
}

impl SolverState {
    /// Zero flow, zero prices and `epsilon = C * (n + 1)`.
    pub fn new(net: &CirculationNetwork, opts: &SolveOptions) -> Result<Self, SolveError> {
        let n = net.node_count();
        let multiplier = n as i64 + 1;
        let overflow = || SolveError::CostRange {
            max_cost: net.max_abs_cost(),
            nodes: n,
        };
        let top = net
            .max_abs_cost()
            .checked_mul(multiplier)
            .ok_or_else(overflow)?;
        // prices stay within a small multiple of n * epsilon_0
        top.checked_mul(8 * multiplier + 8).ok_or_else(overflow)?;
        let cost = net.costs().iter().map(|c| c * multiplier).collect();
        let mut state = SolverState {
            node_count: n,
            cost,
            flow: vec![false; net.arc_count()],
            price: vec![0; n],
            excess: vec![0; n],
            epsilon: top.max(1),
            multiplier,
            fixed: vec![false; net.arc_count()],
            active_first: Vec::new(),
            active_arcs: Vec::new(),
            stats: SolverStats::default(),
            opts: opts.clone(),
        };
        state.rebuild_active(net);
        Ok(state)
    }

    pub fn epsilon(&self) -> i64 {
        self.epsilon
    }

    /// Internal cost multiplier (`n + 1`).
    pub fn multiplier(&self) -> i64 {
        self.multiplier
    }

    pub fn flow(&self) -> &[bool] {
        &self.flow
    }

    pub fn prices(&self) -> &[i64] {
        &self.price
    }

    pub fn excess(&self) -> &[i64] {
        &self.excess
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    pub fn fixed(&self) -> &[bool] {
        &self.fixed
    }

    pub fn total_excess(&self) -> i64 {
        self.excess.iter().filter(|&&e| e > 0).sum()
    }

    pub fn set_epsilon(&mut self, epsilon: i64) {
        self.epsilon = epsilon.max(1);
    }

    pub fn set_price(&mut self, v: usize, p: i64) {
        self.price[v] = p;
    }

    /// Sets the flow on original arc `k` and updates excesses.
    pub fn set_flow(&mut self, net: &CirculationNetwork, k: usize, on: bool) {
        if self.flow[k] != on {
            self.push(net, if on { 2 * k } else { 2 * k + 1 });
        }
    }

    #[inline]
    pub fn is_residual(&self, r: usize) -> bool {
        self.flow[r >> 1] == (r & 1 == 1)
    }

    /// Internal (multiplied) cost of residual arc `r`.
    #[inline]
    pub fn residual_cost(&self, r: usize) -> i64 {
        let c = self.cost[r >> 1];
        if r & 1 == 0 {
            c
        } else {
            -c
        }
    }

    /// `c_p(v, w) = c(v, w) + p(v) - p(w)` for residual arc `r = (v, w)`.
    #[inline]
    pub fn reduced_cost(&self, net: &CirculationNetwork, r: usize) -> i64 {
        self.residual_cost(r) + self.price[net.residual_tail(r)] - self.price[net.residual_head(r)]
    }

    #[inline]
    pub fn is_admissible(&self, net: &CirculationNetwork, r: usize) -> bool {
        self.is_residual(r) && !self.fixed[r >> 1] && self.reduced_cost(net, r) < 0
    }

    /// Sends one unit along residual arc `r`.
    #[inline]
    pub(crate) fn push(&mut self, net: &CirculationNetwork, r: usize) {
        debug_assert!(self.is_residual(r));
        let k = r >> 1;
        self.flow[k] = !self.flow[k];
        self.excess[net.residual_tail(r)] -= 1;
        self.excess[net.residual_head(r)] += 1;
    }

    #[inline]
    pub(crate) fn active_out(&self, v: usize) -> &[u32] {
        &self.active_arcs[self.active_first[v] as usize..self.active_first[v + 1] as usize]
    }

    pub(crate) fn rebuild_active(&mut self, net: &CirculationNetwork) {
        let n = self.node_count;
        self.active_first.clear();
        self.active_first.reserve(n + 1);
        self.active_arcs.clear();
        self.active_first.push(0);
        for v in 0..n {
            self.active_arcs.extend(
                net.residual_out(v)
                    .iter()
                    .copied()
                    .filter(|&r| !self.fixed[r as usize >> 1]),
            );
            self.active_first.push(self.active_arcs.len() as u32);
        }
    }

    /// Saturates every admissible arc, leaving no residual arc with negative
    /// reduced cost among the non-fixed arcs.
    pub fn saturate_admissible(&mut self, net: &CirculationNetwork) -> usize {
        let mut pushed = 0;
        for k in 0..self.flow.len() {
            if self.fixed[k] {
                continue;
            }
            self.stats.scanned_arcs += 1;
            let r = if self.flow[k] { 2 * k + 1 } else { 2 * k };
            if self.reduced_cost(net, r) < 0 {
                self.push(net, r);
                pushed += 1;
            }
        }
        self.stats.pushes += pushed as u64;
        pushed
    }

    /// Original-unit cost of the current flow.
    pub fn flow_cost(&self, net: &CirculationNetwork) -> i64 {
        net.flow_cost(&self.flow)
    }
}

/// True iff every residual arc (fixed or not) has `c_p >= -epsilon`.
pub fn check_epsilon_optimality(state: &SolverState, net: &CirculationNetwork) -> bool {
    (0..2 * net.arc_count())
        .filter(|&r| state.is_residual(r))
        .all(|r| state.reduced_cost(net, r) >= -state.epsilon)
}
