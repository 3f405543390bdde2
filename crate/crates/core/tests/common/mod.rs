//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use circtrack::baseline::enumerate_circulations;
use circtrack::fw::QuadraticObjective;
use circtrack::graph::{post_node, pre_node};
use circtrack::instances::{random_network, RandomNetworkConfig};
use circtrack::{ArcKind, CirculationNetwork};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two detections in consecutive frames:
/// enter, observation, exit per detection plus one link.
pub fn pair(enter: i64, obs: i64, exit: i64, link: i64) -> CirculationNetwork {
    let (o1, h1, o2, h2) = (pre_node(0), post_node(0), pre_node(1), post_node(1));
    CirculationNetwork::from_arcs(
        5,
        &[
            (0, o1, enter, ArcKind::Enter),
            (o1, h1, obs, ArcKind::Observation),
            (h1, 0, exit, ArcKind::Exit),
            (0, o2, enter, ArcKind::Enter),
            (o2, h2, obs, ArcKind::Observation),
            (h2, 0, exit, ArcKind::Exit),
            (h1, o2, link, ArcKind::Transition),
        ],
    )
    .unwrap()
}

pub fn fixture_a() -> CirculationNetwork {
    pair(2, -5, 2, 1)
}

/// Seven detections over three frames (2, 3, 2) where three trajectories
/// `a1 b1 c1`, `a2 b2 c2` and `b3` cover everything at cost -64.
pub fn three_track_network() -> CirculationNetwork {
    let links = [
        (0, 2, 0),
        (0, 3, 5),
        (1, 3, 0),
        (1, 4, 5),
        (2, 5, 0),
        (3, 5, 5),
        (3, 6, 0),
        (4, 6, 5),
    ];
    let mut arcs = Vec::new();
    for i in 0..7 {
        arcs.push((0, pre_node(i), 1, ArcKind::Enter));
        arcs.push((pre_node(i), post_node(i), -10, ArcKind::Observation));
        arcs.push((post_node(i), 0, 1, ArcKind::Exit));
    }
    for (i, j, c) in links {
        arcs.push((post_node(i), pre_node(j), c, ArcKind::Transition));
    }
    CirculationNetwork::from_arcs(15, &arcs).unwrap()
}

/// Random tracking network with `detections` detections over `frames`
/// frames and every cost drawn from `lo..=hi`.
pub fn uniform_instance(detections: usize, frames: u32, lo: i64, hi: i64, seed: u64) -> CirculationNetwork {
    let cfg = RandomNetworkConfig {
        detections,
        frames,
        max_gap: 2,
        max_out: 3,
        enter: (lo, hi),
        exit: (lo, hi),
        observation: (lo, hi),
        transition: (lo, hi),
    };
    random_network(&cfg, seed)
}

/// Instance `seed` of the small-oracle family: 2-12 detections, 2-5 frames,
/// costs in [-100, 100].
pub fn oracle_instance(seed: u64) -> CirculationNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let d = rng.random_range(2..=12);
    let f = rng.random_range(2..=5);
    uniform_instance(d, f, -100, 100, seed)
}

/// Instance `seed` of the medium family: up to 50 detections.
pub fn medium_instance(seed: u64) -> CirculationNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xface);
    let d = rng.random_range(1..=50);
    let f = rng.random_range(1..=10);
    let cfg = RandomNetworkConfig {
        detections: d,
        frames: f,
        max_gap: rng.random_range(1..=3),
        max_out: rng.random_range(1..=4),
        ..RandomNetworkConfig::default()
    };
    random_network(&cfg, seed)
}

/// Quadratic fixture `seed`: a random network with at most 8 detections,
/// linear terms equal to its costs and small pairwise terms on observation
/// and transition arcs.
pub fn quadratic_fixture(seed: u64) -> (CirculationNetwork, QuadraticObjective<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9a9a);
    let d = rng.random_range(2..=8);
    let f = rng.random_range(2..=4);
    let net = uniform_instance(d, f, -20, 20, seed);
    let mut obj = QuadraticObjective::from_network(&net);
    let candidates: Vec<usize> = (0..net.arc_count())
        .filter(|&k| matches!(net.kind(k), ArcKind::Observation | ArcKind::Transition))
        .collect();
    for _ in 0..rng.random_range(1..=4) {
        let a = candidates[rng.random_range(0..candidates.len())];
        let b = candidates[rng.random_range(0..candidates.len())];
        if a != b {
            obj.add_quadratic(a, b, rng.random_range(-1.0..1.0));
        }
    }
    (net, obj)
}

/// Minimum of the full objective over every feasible integral circulation.
pub fn enumerate_quadratic(net: &CirculationNetwork, obj: &QuadraticObjective<f64>) -> f64 {
    let mut best = f64::INFINITY;
    let mut flow = vec![false; net.arc_count()];
    enumerate_circulations(net, |set| {
        flow.iter_mut().for_each(|x| *x = false);
        for &k in set {
            flow[k] = true;
        }
        best = best.min(obj.evaluate_indicator(&flow));
    })
    .unwrap();
    best
}

/// Splits a flow into cycles through the dummy node, failing when a node
/// other than the dummy carries more than one unit or conservation breaks.
pub fn decompose(net: &CirculationNetwork, flow: &[bool]) -> Result<Vec<Vec<usize>>, String> {
    let n = net.node_count();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for k in (0..net.arc_count()).filter(|&k| flow[k]) {
        out[net.tail(k)].push(k);
        indeg[net.head(k)] += 1;
    }
    for v in 0..n {
        if out[v].len() != indeg[v] {
            return Err(format!("conservation fails at {v}"));
        }
        if v != 0 && out[v].len() > 1 {
            return Err(format!("node {v} carries {} units", out[v].len()));
        }
    }
    let mut cycles = Vec::new();
    let mut used = 0;
    for &first in &out[0] {
        let mut cycle = vec![first];
        let mut v = net.head(first);
        while v != 0 {
            let k = out[v][0];
            cycle.push(k);
            v = net.head(k);
            if cycle.len() > net.arc_count() {
                return Err("walk does not return to the dummy node".into());
            }
        }
        used += cycle.len();
        cycles.push(cycle);
    }
    let total: usize = flow.iter().filter(|&&x| x).count();
    if used != total {
        return Err(format!("{} flow arcs lie on cycles avoiding the dummy node", total - used));
    }
    Ok(cycles)
}
