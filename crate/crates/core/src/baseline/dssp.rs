use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::SolveError;
use crate::graph::CirculationNetwork;

use super::flow_network::FlowNetwork;
use super::ssp::{check_size, Residual, SspResult, INF};

/// Successive shortest paths that reuse the previous shortest-path tree.
///
/// After an augmentation along `P` the potentials are shifted by the old
/// distances, which makes every tree arc tight. Nodes whose tree path avoids
/// `P` therefore keep distance 0 and their tree parent; only the subtrees
/// hanging below `P` are recomputed, by a Dijkstra seeded from the arcs
/// entering them from the valid part.
pub fn dssp_solve(net: &CirculationNetwork, k: Option<usize>) -> Result<SspResult, SolveError> {
    check_size(net)?;
    let fn_net = FlowNetwork::from_circulation(net);
    let g = fn_net.graph();
    let n = g.node_count();
    let (s, t) = (fn_net.source(), fn_net.sink());
    let mut res = Residual::new(&fn_net);
    let mut dist = vec![INF; n];
    let mut parent = vec![u32::MAX; n];
    let mut heap = BinaryHeap::new();
    let mut curve = Vec::new();
    let mut total = 0i64;
    let mut invalid = vec![true; n];
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut stack = Vec::new();

    dist[s] = 0;
    heap.push(Reverse((0i64, s as u32)));
    loop {
        // Dijkstra restricted to the invalid region (all of it the first time)
        while let Some(Reverse((d, v))) = heap.pop() {
            let v = v as usize;
            if d > dist[v] || !invalid[v] {
                continue;
            }
            invalid[v] = false;
            for &r in g.residual_out(v) {
                let r = r as usize;
                if !res.is_residual(r) {
                    continue;
                }
                let w = g.residual_head(r);
                if !invalid[w] {
                    continue;
                }
                let nd = d + res.reduced(r);
                if nd < dist[w] {
                    dist[w] = nd;
                    parent[w] = r as u32;
                    heap.push(Reverse((nd, w as u32)));
                }
            }
        }
        if k.is_some_and(|k| curve.len() >= k) || dist[t] == INF {
            break;
        }
        let dt = dist[t];
        let gain = res.path_cost(dt);
        if k.is_none() && gain >= 0 {
            break;
        }
        let path = res.path(&parent);
        let worst = dist.iter().copied().filter(|&d| d != INF).max().unwrap_or(0);
        for v in 0..n {
            res.pot[v] += if dist[v] == INF { worst } else { dist[v] };
        }
        res.augment(&path);
        total += gain;
        curve.push(total);

        // invalidate unreachable nodes and the tree below every path node
        for c in children.iter_mut() {
            c.clear();
        }
        for v in 0..n {
            if v != s && dist[v] != INF {
                children[g.residual_tail(parent[v] as usize)].push(v as u32);
            }
        }
        for v in 0..n {
            invalid[v] = dist[v] == INF;
        }
        for &r in &path {
            let w = g.residual_head(r);
            if !invalid[w] {
                stack.push(w);
                while let Some(x) = stack.pop() {
                    invalid[x] = true;
                    stack.extend(children[x].iter().map(|&c| c as usize));
                }
            }
        }
        for v in 0..n {
            dist[v] = if invalid[v] { INF } else { 0 };
        }
        heap.clear();
        for v in 0..n {
            if !invalid[v] {
                continue;
            }
            // seed from residual arcs u -> v with u valid (twins of v's out-arcs)
            for &b in g.residual_out(v) {
                let r = b as usize ^ 1;
                let u = g.residual_head(b as usize);
                if invalid[u] || !res.is_residual(r) {
                    continue;
                }
                let nd = res.reduced(r);
                if nd < dist[v] {
                    dist[v] = nd;
                    parent[v] = r as u32;
                }
            }
            if dist[v] != INF {
                heap.push(Reverse((dist[v], v as u32)));
            }
        }
    }
    let augmentations = curve.len();
    Ok(SspResult {
        total_cost: net.flow_cost(&res.flow),
        flow: res.flow,
        curve,
        augmentations,
    })
}
