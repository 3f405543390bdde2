//! The RESTORE loop: set-relabel followed by pushes guided by the blocking
//! structure, repeated until the pseudo-flow is a circulation again.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::SolveError;
use crate::graph::CirculationNetwork;

use super::state::SolverState;

const UNREACHED: u32 = u32::MAX;

/// Admissible-arc layering computed after set-relabel: hop distance from
/// the nearest excess node over admissible arcs.
#[derive(Debug, Clone)]
pub struct BlockingStructure {
    /// `u32::MAX` when no excess node reaches `v` admissibly.
    pub level: Vec<u32>,
    /// Number of epsilon rounds applied by set-relabel.
    pub rounds: i64,
    /// Nodes whose price was raised.
    pub raised: usize,
}

impl BlockingStructure {
    pub fn empty(n: usize) -> Self {
        BlockingStructure {
            level: vec![UNREACHED; n],
            rounds: 0,
            raised: 0,
        }
    }

    /// Reached from an excess node through admissible arcs.
    pub fn is_reached(&self, v: usize) -> bool {
        self.level[v] != UNREACHED
    }

    /// Admissible arc that moves one layer away from the excess nodes; these
    /// arcs carry the blocking flow and are preferred by the push step.
    pub fn is_marked(&self, state: &SolverState, net: &CirculationNetwork, r: usize) -> bool {
        let (v, w) = (net.residual_tail(r), net.residual_head(r));
        state.is_admissible(net, r)
            && self.is_reached(v)
            && self.is_reached(w)
            && self.level[v] + 1 == self.level[w]
    }
}

/// Raises prices of the nodes that reach a deficit through admissible arcs,
/// one epsilon per round, until every excess node reaches a deficit.
///
/// The rounds are evaluated all at once: the round in which node `x` joins
/// the deficit-reaching set is its shortest distance to a deficit under arc
/// lengths `0` for admissible arcs and `floor(c_p / eps) + 1` otherwise. A
/// node joining in round `r` is raised `R - r` times where `R` is the round
/// in which the last excess node joins.
pub fn set_relabel(
    state: &mut SolverState,
    net: &CirculationNetwork,
) -> Result<BlockingStructure, SolveError> {
    let n = state.node_count;
    let mut bs = BlockingStructure::empty(n);
    let mut remaining = state.excess.iter().filter(|&&e| e > 0).count();
    if remaining == 0 {
        return Ok(bs);
    }
    state.stats.set_relabel_calls += 1;
    let eps = state.epsilon;

    let mut dist = vec![i64::MAX; n];
    let mut heap = BinaryHeap::new();
    for v in 0..n {
        if state.excess[v] < 0 {
            dist[v] = 0;
            heap.push(Reverse((0i64, v as u32)));
        }
    }
    let mut settled = Vec::new();
    let mut done = vec![false; n];
    let mut last_round = 0;
    while let Some(Reverse((d, y))) = heap.pop() {
        let y = y as usize;
        if done[y] {
            continue;
        }
        done[y] = true;
        settled.push(y);
        if state.excess[y] > 0 {
            remaining -= 1;
            last_round = d;
            if remaining == 0 {
                break;
            }
        }
        let adj = state.active_first[y] as usize..state.active_first[y + 1] as usize;
        state.stats.scanned_arcs += adj.len() as u64;
        for idx in adj {
            let b = state.active_arcs[idx] as usize;
            // r = b ^ 1 runs x -> y
            let r = b ^ 1;
            if !state.is_residual(r) {
                continue;
            }
            let x = net.residual_head(b);
            if done[x] {
                continue;
            }
            let cp = state.reduced_cost(net, r);
            let len = if cp < 0 { 0 } else { cp / eps + 1 };
            let nd = d.saturating_add(len);
            if nd < dist[x] {
                dist[x] = nd;
                heap.push(Reverse((nd, x as u32)));
            }
        }
    }
    if remaining > 0 {
        let v = (0..n)
            .find(|&v| state.excess[v] > 0 && !done[v])
            .expect("unsettled excess node");
        return Err(SolveError::UnreachableExcess(v));
    }
    for &v in &settled {
        if dist[v] < last_round {
            state.price[v] += eps * (last_round - dist[v]);
            bs.raised += 1;
        }
    }
    bs.rounds = last_round;
    state.stats.set_relabel_rounds += last_round as u64;
    state.stats.relabels += bs.raised as u64;

    // forward BFS from the excess nodes over admissible arcs
    let mut queue = VecDeque::new();
    for v in 0..n {
        if state.excess[v] > 0 {
            bs.level[v] = 0;
            queue.push_back(v);
        }
    }
    while let Some(x) = queue.pop_front() {
        let adj = state.active_first[x] as usize..state.active_first[x + 1] as usize;
        state.stats.scanned_arcs += adj.len() as u64;
        for idx in adj {
            let r = state.active_arcs[idx] as usize;
            let y = net.residual_head(r);
            if bs.level[y] == UNREACHED && state.is_residual(r) && state.reduced_cost(net, r) < 0 {
                bs.level[y] = bs.level[x] + 1;
                queue.push_back(y);
            }
        }
    }
    debug_assert!((0..n).any(|v| state.excess[v] < 0 && bs.is_reached(v)));
    Ok(bs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PushOutcome {
    pub pushes: u64,
    pub relabels: u64,
    pub excess_before: i64,
    pub excess_after: i64,
    /// Excess-to-deficit paths that were saturated.
    pub paths: u64,
}

/// Moves unit flow from excess nodes to deficit nodes along admissible
/// paths. Paths are grown depth-first backwards from each deficit node,
/// first over arcs of the blocking layering, then over any admissible arc.
/// A path tip without a usable admissible in-arc is relabeled upward (its
/// price rises to the cheapest residual in-arc plus epsilon), so prices never
/// decrease; tips that cannot be raised are pruned for the rest of the call.
/// Stops after `budget` pushes and relabels, or when no excess is left.
pub fn push_relabel_along_blocking(
    state: &mut SolverState,
    net: &CirculationNetwork,
    blocking: &BlockingStructure,
    budget: u64,
) -> PushOutcome {
    let n = state.node_count;
    let excess_before = state.total_excess();
    let mut out = PushOutcome {
        pushes: 0,
        relabels: 0,
        excess_before,
        excess_after: excess_before,
        paths: 0,
    };
    if excess_before == 0 {
        return out;
    }
    let mut roots: Vec<usize> = (0..n).filter(|&v| state.excess[v] < 0).collect();
    // deficits reached by the layering first, nearest first
    roots.sort_by_key(|&v| (blocking.level[v], v));

    let mut cursor = vec![0u32; n];
    let mut pass = vec![0u8; n];
    let mut dead = vec![false; n];
    let mut on_path = vec![false; n];
    // arcs from the root outwards; arc k enters path node k
    let mut path: Vec<usize> = Vec::new();
    let mut scanned = 0u64;
    let mut remaining = excess_before;

    'roots: for &root in &roots {
        while state.excess[root] < 0 && !dead[root] {
            if out.pushes + out.relabels >= budget || remaining == 0 {
                break 'roots;
            }
            path.clear();
            let mut y = root;
            on_path[y] = true;
            loop {
                if y != root && state.excess[y] > 0 {
                    for &r in path.iter().rev() {
                        state.push(net, r);
                        on_path[net.residual_head(r)] = false;
                    }
                    on_path[y] = false;
                    out.pushes += path.len() as u64;
                    out.paths += 1;
                    remaining -= 1;
                    break;
                }
                match next_in_arc(
                    state, net, blocking, y, &mut cursor, &mut pass, &dead, &on_path, &mut scanned,
                ) {
                    Some(r) => {
                        path.push(r);
                        y = net.residual_tail(r);
                        on_path[y] = true;
                    }
                    None => {
                        if relabel_up(state, net, y, &mut scanned) {
                            out.relabels += 1;
                            cursor[y] = 0;
                            pass[y] = 1;
                        } else {
                            dead[y] = true;
                        }
                        if y == root {
                            if dead[y] {
                                on_path[y] = false;
                                break;
                            }
                            if out.pushes + out.relabels >= budget {
                                on_path[y] = false;
                                break;
                            }
                            continue;
                        }
                        // the arc into the previous tip may have lost admissibility
                        on_path[y] = false;
                        let r = path.pop().expect("non-root tip has an arc");
                        y = net.residual_head(r);
                        if out.pushes + out.relabels >= budget {
                            for &r in &path {
                                on_path[net.residual_tail(r)] = false;
                            }
                            on_path[root] = false;
                            break;
                        }
                    }
                }
            }
        }
    }
    state.stats.pushes += out.pushes;
    state.stats.relabels += out.relabels;
    state.stats.scanned_arcs += scanned;
    out.excess_after = state.total_excess();
    out
}

/// Residual in-arc `x -> y` to extend the path with: pass 0 takes arcs of the
/// blocking layering, pass 1 any admissible arc.
#[allow(clippy::too_many_arguments)]
#[inline]
fn next_in_arc(
    state: &SolverState,
    net: &CirculationNetwork,
    blocking: &BlockingStructure,
    y: usize,
    cursor: &mut [u32],
    pass: &mut [u8],
    dead: &[bool],
    on_path: &[bool],
    scanned: &mut u64,
) -> Option<usize> {
    let start = state.active_first[y] as usize;
    let len = state.active_first[y + 1] as usize - start;
    while pass[y] < 2 {
        while (cursor[y] as usize) < len {
            let b = state.active_arcs[start + cursor[y] as usize] as usize;
            let r = b ^ 1;
            *scanned += 1;
            let x = net.residual_head(b);
            let usable = !dead[x]
                && !on_path[x]
                && state.is_residual(r)
                && state.reduced_cost(net, r) < 0
                && (pass[y] == 1
                    || (blocking.is_reached(x)
                        && blocking.is_reached(y)
                        && blocking.level[x] + 1 == blocking.level[y]));
            if usable {
                return Some(r);
            }
            cursor[y] += 1;
        }
        pass[y] += 1;
        cursor[y] = 0;
    }
    None
}

/// Raises `p(y)` to `min (c(x, y) + p(x)) + eps` over residual in-arcs, which
/// keeps every in-arc eps-optimal and makes the cheapest one admissible.
/// Returns false (leaving the price) when that would not increase `p(y)`.
fn relabel_up(state: &mut SolverState, net: &CirculationNetwork, y: usize, scanned: &mut u64) -> bool {
    let mut best = i64::MAX;
    let adj = state.active_out(y);
    *scanned += adj.len() as u64;
    for &b in adj {
        let r = b as usize ^ 1;
        if state.is_residual(r) {
            let x = net.residual_tail(r);
            best = best.min(state.residual_cost(r) + state.price[x]);
        }
    }
    if best == i64::MAX {
        return false;
    }
    let target = best + state.epsilon;
    if target <= state.price[y] {
        return false;
    }
    state.price[y] = target;
    true
}
