use crate::error::PipelineError;
use crate::graph::{node_detection, ArcKind, CirculationNetwork};
use crate::trajectory::{Trajectory, TrajectorySet};

/// Decodes a feasible 0/1 circulation into trajectories by walking each
/// cycle from the dummy node. Fails when the flow is not a circulation or
/// uses a node twice.
pub fn flow_to_trajectories(
    flow: &[bool],
    net: &CirculationNetwork,
) -> Result<TrajectorySet, PipelineError> {
    let n = net.node_count();
    let mut inflow = vec![0usize; n];
    let mut outflow = vec![0usize; n];
    // one saturated out-arc per non-dummy node
    let mut next_arc = vec![usize::MAX; n];
    for (k, _) in flow.iter().enumerate().filter(|(_, &f)| f) {
        let (t, h) = (net.tail(k), net.head(k));
        outflow[t] += 1;
        inflow[h] += 1;
        if t != net.dummy() {
            next_arc[t] = k;
        }
    }
    for v in 0..n {
        let capped = v == net.dummy() || (inflow[v] <= 1 && outflow[v] <= 1);
        if inflow[v] != outflow[v] || !capped {
            return Err(PipelineError::Conservation {
                node: v,
                inflow: inflow[v],
                outflow: outflow[v],
            });
        }
    }

    let mut set = TrajectorySet::default();
    for &r in net.residual_out(net.dummy()) {
        let k = r as usize >> 1;
        if r & 1 == 1 || !flow[k] {
            continue;
        }
        let mut cost = net.cost(k);
        let mut detections = Vec::new();
        let mut v = net.head(k);
        while v != net.dummy() {
            let a = next_arc[v];
            if let (Some((i, true)), ArcKind::Observation) = (node_detection(v), net.kind(a)) {
                detections.push(i);
            }
            cost += net.cost(a);
            v = net.head(a);
        }
        set.trajectories.push(Trajectory { detections, cost });
    }
    Ok(set)
}
