use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::CirculationNetwork;

use super::state::SolverState;

/// Round cap for one price-refinement attempt: `ceil(sqrt(n))`.
pub fn price_refinement_cap(n: usize) -> usize {
    let mut r = (n as f64).sqrt().ceil() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r.max(1)
}

/// Topological order of the admissible network, or `None` if it has a cycle.
pub fn admissible_topological_order(
    state: &SolverState,
    net: &CirculationNetwork,
) -> Option<Vec<usize>> {
    let n = state.node_count;
    let mut indeg = vec![0u32; n];
    for v in 0..n {
        for &r in state.active_out(v) {
            let r = r as usize;
            if state.is_residual(r) && state.reduced_cost(net, r) < 0 {
                indeg[net.residual_head(r)] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &r in state.active_out(v) {
            let r = r as usize;
            if state.is_residual(r) && state.reduced_cost(net, r) < 0 {
                let w = net.residual_head(r);
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    order.push(w);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Tries to make the current circulation `ceil(eps / 2)`-optimal by changing
/// prices only. Gives up (leaving the state untouched) when the admissible
/// network has a cycle or after `cap` relaxation passes. On success the
/// prices are updated and epsilon is halved.
///
/// Each pass relaxes dirty nodes in the topological order of the admissible
/// network, so chains of admissible arcs settle within a single pass.
pub fn price_refinement(state: &mut SolverState, net: &CirculationNetwork, cap: usize) -> bool {
    if state.epsilon <= 1 || state.total_excess() != 0 {
        return false;
    }
    state.stats.price_refinement_attempts += 1;
    let target = (state.epsilon + 1) / 2;
    let n = state.node_count;
    let Some(order) = admissible_topological_order(state, net) else {

        return false;
    };
    let mut pos = vec![0u32; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i as u32;
    }

    // potential shift pi with c_p(v,w) + pi(v) - pi(w) >= -target
    let mut pi = vec![0i64; n];
    let mut parent = vec![u32::MAX; n];
    let mut queued = vec![false; n];
    let mut next: Vec<usize> = Vec::new();
    for v in 0..n {
        let violates = state.active_out(v).iter().any(|&r| {
            let r = r as usize;
            state.is_residual(r) && state.reduced_cost(net, r) < -target
        });
        if violates {
            next.push(v);
            queued[v] = true;
        }
    }
    let mut passes = 0;
    let mut scanned = 0u64;
    while !next.is_empty() {
        passes += 1;
        if passes > cap || (passes > 1 && parent_cycle(&parent)) {

            state.stats.scanned_arcs += scanned;
            return false;
        }
        let mut heap: BinaryHeap<Reverse<(u32, u32)>> =
            next.drain(..).map(|v| Reverse((pos[v], v as u32))).collect();
        while let Some(Reverse((pv, v))) = heap.pop() {
            let v = v as usize;
            queued[v] = false;
            let adj = state.active_out(v);
            scanned += adj.len() as u64;
            for &r in adj {
                let r = r as usize;
                if !state.is_residual(r) {
                    continue;
                }
                let w = net.residual_head(r);
                let bound = pi[v] + state.reduced_cost(net, r) + target;
                if bound < pi[w] {
                    pi[w] = bound;
                    parent[w] = v as u32;
                    if !queued[w] {
                        queued[w] = true;
                        if pos[w] > pv {
                            heap.push(Reverse((pos[w], w as u32)));
                        } else {
                            next.push(w);
                        }
                    }
                }
            }
        }
    }

    state.stats.scanned_arcs += scanned;
    for v in 0..n {
        state.price[v] += pi[v];
    }
    state.epsilon = target;
    state.stats.price_refinement_successes += 1;
    true
}

/// True iff the parent pointers of the label-correcting search contain a
/// cycle. With strict improvements such a cycle is a negative cycle, so no
/// feasible price shift exists.
fn parent_cycle(parent: &[u32]) -> bool {
    let mut stamp = vec![0u32; parent.len()];
    for start in 0..parent.len() {
        if stamp[start] != 0 {
            continue;
        }
        let id = start as u32 + 1;
        let mut v = start;
        while stamp[v] == 0 {
            stamp[v] = id;
            match parent[v] {
                u32::MAX => break,
                p => v = p as usize,
            }
        }
        if stamp[v] == id && parent[v] != u32::MAX {
            return true;
        }
    }
    false
}

/// Re-evaluates which arcs are fixed: an arc is fixed while its reduced cost
/// magnitude exceeds `factor * n * eps` and its flow already agrees with the
/// sign of that reduced cost. Arcs that fall back into range (or disagree)
/// are released.
pub fn update_arc_fixing(state: &mut SolverState, net: &CirculationNetwork) -> usize {
    let threshold = if state.opts.arc_fixing {
        (state.opts.fixing_factor as i128) * (state.node_count as i128) * (state.epsilon as i128)
    } else {
        i128::MAX
    };
    let mut count = 0;
    let mut changed = false;
    for k in 0..net.arc_count() {
        let cp = state.reduced_cost(net, 2 * k) as i128;
        let consistent = if state.flow[k] { cp < 0 } else { cp > 0 };
        let fix = consistent && cp.abs() > threshold;
        changed |= fix != state.fixed[k];
        state.fixed[k] = fix;
        count += fix as usize;
    }
    if changed {
        state.rebuild_active(net);
    }
    state.stats.fixed_arcs = state.stats.fixed_arcs.max(count as u64);
    count
}
