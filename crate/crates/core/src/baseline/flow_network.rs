use crate::graph::{ArcKind, CirculationNetwork, DUMMY_NODE};

/// Source/sink network obtained by splitting the dummy node: entry arcs
/// leave the source (node 0), exit arcs enter the sink (node `n`). Arc ids
/// coincide with the circulation network's, so a 0/1 flow vector means the
/// same thing on both.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    graph: CirculationNetwork,
    sink: usize,
}

impl FlowNetwork {
    pub fn from_circulation(net: &CirculationNetwork) -> Self {
        let sink = net.node_count();
        let arcs: Vec<_> = net
            .arcs()
            .map(|a| {
                let head = if a.kind == ArcKind::Exit || a.head == DUMMY_NODE {
                    sink
                } else {
                    a.head
                };
                (a.tail, head, a.cost, a.kind)
            })
            .collect();
        let graph = CirculationNetwork::from_arcs(sink + 1, &arcs)
            .expect("arcs of a valid network stay in range");
        FlowNetwork { graph, sink }
    }

    pub fn source(&self) -> usize {
        DUMMY_NODE
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Residual-arc view (same twin convention as the circulation network).
    pub fn graph(&self) -> &CirculationNetwork {
        &self.graph
    }

    /// Topological order of the (acyclic) arc set.
    pub(crate) fn topological_order(&self) -> Vec<usize> {
        let g = &self.graph;
        let n = g.node_count();
        let mut indeg = vec![0usize; n];
        for a in g.arcs() {
            indeg[a.head] += 1;
        }
        let mut order: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for &r in g.residual_out(v) {
                let r = r as usize;
                if r & 1 == 0 {
                    let w = g.residual_head(r);
                    indeg[w] -= 1;
                    if indeg[w] == 0 {
                        order.push(w);
                    }
                }
            }
        }
        order
    }

    /// Shortest distances from the source over forward arcs only.
    pub(crate) fn initial_potentials(&self) -> Vec<i64> {
        let g = &self.graph;
        let mut dist = vec![i64::MAX; g.node_count()];
        dist[self.source()] = 0;
        for v in self.topological_order() {
            if dist[v] == i64::MAX {
                continue;
            }
            for &r in g.residual_out(v) {
                let r = r as usize;
                if r & 1 == 0 {
                    let w = g.residual_head(r);
                    dist[w] = dist[w].min(dist[v] + g.residual_cost(r));
                }
            }
        }
        let worst = dist.iter().copied().filter(|&d| d != i64::MAX).max().unwrap_or(0);
        dist.iter().map(|&d| if d == i64::MAX { worst } else { d }).collect()
    }
}
