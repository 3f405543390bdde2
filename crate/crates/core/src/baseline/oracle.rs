use crate::error::SolveError;
use crate::graph::{node_detection, ArcKind, CirculationNetwork};

/// Largest instance the exhaustive search accepts.
pub const ORACLE_MAX_DETECTIONS: usize = 16;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub total_cost: i64,
    pub flow: Vec<bool>,
    /// Number of feasible circulations examined.
    pub enumerated: u64,
}

#[derive(Default, Clone)]
struct DetectionArcs {
    enter: Option<usize>,
    observation: Option<usize>,
    exit: Option<usize>,
    // (arc, predecessor detection)
    incoming: Vec<(usize, usize)>,
}

struct Enumerator<F> {
    order: Vec<usize>,
    arcs: Vec<DetectionArcs>,
    open: Vec<bool>,
    chosen: Vec<usize>,
    visit: F,
}

impl<F: FnMut(&[usize])> Enumerator<F> {
    fn recurse(&mut self, idx: usize) {
        if idx == self.order.len() {
            let mark = self.chosen.len();
            let mut feasible = true;
            for d in 0..self.arcs.len() {
                if self.open[d] {
                    match self.arcs[d].exit {
                        Some(exit) => self.chosen.push(exit),
                        None => feasible = false,
                    }
                }
            }
            if feasible {
                (self.visit)(&self.chosen);
            }
            self.chosen.truncate(mark);
            return;
        }
        let j = self.order[idx];
        // skip
        self.recurse(idx + 1);
        let Some(obs) = self.arcs[j].observation else {
            return;
        };
        // start a trajectory
        if let Some(enter) = self.arcs[j].enter {
            self.chosen.extend([enter, obs]);
            self.open[j] = true;
            self.recurse(idx + 1);
            self.open[j] = false;
            self.chosen.truncate(self.chosen.len() - 2);
        }
        // extend an open tail
        for t in 0..self.arcs[j].incoming.len() {
            let (arc, i) = self.arcs[j].incoming[t];
            if !self.open[i] {
                continue;
            }
            self.chosen.extend([arc, obs]);
            self.open[i] = false;
            self.open[j] = true;
            self.recurse(idx + 1);
            self.open[j] = false;
            self.open[i] = true;
            self.chosen.truncate(self.chosen.len() - 2);
        }
    }
}

fn collect_arcs(net: &CirculationNetwork) -> Result<Vec<DetectionArcs>, SolveError> {
    let d = net.detection_count();
    let mut arcs = vec![DetectionArcs::default(); d];
    let bad = |k: usize| SolveError::InvalidArgument(format!("arc {k} does not fit the tracking layout"));
    for (k, a) in net.arcs().enumerate() {
        match a.kind {
            ArcKind::Enter => {
                let (i, pre) = node_detection(a.head).ok_or_else(|| bad(k))?;
                if a.tail != net.dummy() || !pre {
                    return Err(bad(k));
                }
                arcs[i].enter = Some(k);
            }
            ArcKind::Exit => {
                let (i, pre) = node_detection(a.tail).ok_or_else(|| bad(k))?;
                if a.head != net.dummy() || pre {
                    return Err(bad(k));
                }
                arcs[i].exit = Some(k);
            }
            ArcKind::Observation => {
                let (i, pre) = node_detection(a.tail).ok_or_else(|| bad(k))?;
                if !pre || node_detection(a.head) != Some((i, false)) {
                    return Err(bad(k));
                }
                arcs[i].observation = Some(k);
            }
            ArcKind::Transition => {
                let (i, pre_i) = node_detection(a.tail).ok_or_else(|| bad(k))?;
                let (j, pre_j) = node_detection(a.head).ok_or_else(|| bad(k))?;
                if pre_i || !pre_j {
                    return Err(bad(k));
                }
                arcs[j].incoming.push((k, i));
            }
        }
    }
    Ok(arcs)
}

// detections ordered so every transition goes forward
fn detection_order(net: &CirculationNetwork, arcs: &[DetectionArcs]) -> Result<Vec<usize>, SolveError> {
    let d = arcs.len();
    let mut indeg: Vec<usize> = arcs.iter().map(|a| a.incoming.len()).collect();
    let mut succ = vec![Vec::new(); d];
    for (j, a) in arcs.iter().enumerate() {
        for &(_, i) in &a.incoming {
            succ[i].push(j);
        }
    }
    let mut order: Vec<usize> = (0..d).filter(|&j| indeg[j] == 0).collect();
    let mut head = 0;
    while head < order.len() {
        let i = order[head];
        head += 1;
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                order.push(j);
            }
        }
    }
    if order.len() != d {
        return Err(SolveError::InvalidArgument(format!(
            "transitions of a {}-node network contain a cycle",
            net.node_count()
        )));
    }
    Ok(order)
}

/// Calls `visit` with the arc set of every feasible circulation, i.e.
/// every set of vertex-disjoint trajectories (the empty one included).
pub fn enumerate_circulations<F: FnMut(&[usize])>(
    net: &CirculationNetwork,
    visit: F,
) -> Result<(), SolveError> {
    if net.detection_count() > ORACLE_MAX_DETECTIONS {
        return Err(SolveError::TooLarge {
            limit: ORACLE_MAX_DETECTIONS,
            got: net.detection_count(),
        });
    }
    let arcs = collect_arcs(net)?;
    let order = detection_order(net, &arcs)?;
    let d = arcs.len();
    let mut e = Enumerator {
        order,
        arcs,
        open: vec![false; d],
        chosen: Vec::new(),
        visit,
    };
    e.recurse(0);
    Ok(())
}

/// Minimum-cost circulation by exhaustive enumeration.
pub fn brute_force_oracle(net: &CirculationNetwork) -> Result<OracleResult, SolveError> {
    let mut best = 0i64;
    let mut best_set: Vec<usize> = Vec::new();
    let mut enumerated = 0u64;
    enumerate_circulations(net, |set| {
        enumerated += 1;
        let c: i64 = set.iter().map(|&k| net.cost(k)).sum();
        if c < best {
            best = c;
            best_set = set.to_vec();
        }
    })?;
    let mut flow = vec![false; net.arc_count()];
    for k in best_set {
        flow[k] = true;
    }
    Ok(OracleResult {
        total_cost: best,
        flow,
        enumerated,
    })
}
