//! Circulation network construction and structural validation.
//!
//! Every detection `i` contributes a pre-node `o_i = 2i + 1` and a post-node
//! `h_i = 2i + 2`; node `0` is the dummy hub `s`. Arcs are stored once per
//! original arc; residual arc ids are `2k` (forward) and `2k + 1` (reverse
//! twin), so the twin of residual arc `r` is always `r ^ 1`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};

use crate::costs::CostAssignment;
use crate::error::GraphError;
use crate::scalar::Real;

/// Largest magnitude allowed for a scaled integer arc cost.
pub const MAX_ABS_COST: i64 = 1 << 40;

/// Default multiplier converting real-valued costs into integers.
pub const DEFAULT_COST_SCALE: i64 = 1_000_000;

pub const DUMMY_NODE: usize = 0;

/// One detected object snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection<T> {
    pub id: u64,
    pub frame: u32,
    pub position: Vec<T>,
    pub features: Option<Vec<T>>,
    /// Probability that the detection is a false positive.
    pub beta: T,
}

impl<T: Real> Detection<T> {
    pub fn new(id: u64, frame: u32, position: Vec<T>, beta: T) -> Self {
        Detection {
            id,
            frame,
            position,
            features: None,
            beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArcKind {
    Enter,
    Observation,
    Transition,
    Exit,
}

impl ArcKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArcKind::Enter => "enter",
            ArcKind::Observation => "observation",
            ArcKind::Transition => "transition",
            ArcKind::Exit => "exit",
        }
    }

    pub fn parse(s: &str) -> Option<ArcKind> {
        match s {
            "enter" => Some(ArcKind::Enter),
            "observation" => Some(ArcKind::Observation),
            "transition" => Some(ArcKind::Transition),
            "exit" => Some(ArcKind::Exit),
            _ => None,
        }
    }
}

impl fmt::Display for ArcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub cost: i64,
    pub kind: ArcKind,
}

#[inline]
pub fn pre_node(detection: usize) -> usize {
    2 * detection + 1
}

#[inline]
pub fn post_node(detection: usize) -> usize {
    2 * detection + 2
}

/// Maps a non-dummy node back to `(detection index, is_pre_node)`.
#[inline]
pub fn node_detection(node: usize) -> Option<(usize, bool)> {
    if node == DUMMY_NODE {
        None
    } else {
        Some(((node - 1) / 2, node % 2 == 1))
    }
}

/// Immutable unit-capacity circulation network.
#[derive(Debug, Clone)]
pub struct CirculationNetwork {
    node_count: usize,
    tails: Vec<u32>,
    heads: Vec<u32>,
    costs: Vec<i64>,
    kinds: Vec<ArcKind>,
    // CSR over residual arc ids grouped by tail.
    first_out: Vec<u32>,
    residual_out: Vec<u32>,
    detection_ids: Vec<u64>,
    frames: Option<Vec<u32>>,
    max_abs_cost: i64,
    cost_scale: i64,
}

impl CirculationNetwork {
    /// Builds a network from an explicit arc list. Node `0` is the dummy
    /// node and detections are inferred from the node count.
    pub fn from_arcs(
        node_count: usize,
        arcs: &[(usize, usize, i64, ArcKind)],
    ) -> Result<Self, GraphError> {
        let n = node_count.max(1);
        for (k, &(t, h, c, _)) in arcs.iter().enumerate() {
            for v in [t, h] {
                if v >= n {
                    return Err(GraphError::NodeOutOfRange {
                        arc: k,
                        node: v,
                        n,
                    });
                }
            }
            if c.abs() > MAX_ABS_COST {
                return Err(GraphError::CostOverflow {
                    what: format!("arc {k}"),
                    value: c as f64,
                    bound: MAX_ABS_COST,
                });
            }
        }
        let detections = (n - 1) / 2;
        Ok(Self::assemble(
            n,
            arcs.to_vec(),
            (0..detections as u64).collect(),
            None,
            1,
        ))
    }

    fn assemble(
        node_count: usize,
        arcs: Vec<(usize, usize, i64, ArcKind)>,
        detection_ids: Vec<u64>,
        frames: Option<Vec<u32>>,
        cost_scale: i64,
    ) -> Self {
        let m = arcs.len();
        let mut tails = Vec::with_capacity(m);
        let mut heads = Vec::with_capacity(m);
        let mut costs = Vec::with_capacity(m);
        let mut kinds = Vec::with_capacity(m);
        let mut degree = vec![0u32; node_count + 1];
        for &(t, h, c, kind) in &arcs {
            tails.push(t as u32);
            heads.push(h as u32);
            costs.push(c);
            kinds.push(kind);
            degree[t] += 1;
            degree[h] += 1;
        }
        let mut first_out = vec![0u32; node_count + 1];
        for v in 0..node_count {
            first_out[v + 1] = first_out[v] + degree[v];
        }
        let mut fill = first_out.clone();
        let mut residual_out = vec![0u32; 2 * m];
        for k in 0..m {
            let (t, h) = (tails[k] as usize, heads[k] as usize);
            residual_out[fill[t] as usize] = (2 * k) as u32;
            fill[t] += 1;
            residual_out[fill[h] as usize] = (2 * k + 1) as u32;
            fill[h] += 1;
        }
        let max_abs_cost = costs.iter().map(|c| c.abs()).max().unwrap_or(0);
        CirculationNetwork {
            node_count,
            tails,
            heads,
            costs,
            kinds,
            first_out,
            residual_out,
            detection_ids,
            frames,
            max_abs_cost,
            cost_scale,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.tails.len()
    }

    pub fn detection_count(&self) -> usize {
        self.detection_ids.len()
    }

    pub fn dummy(&self) -> usize {
        DUMMY_NODE
    }

    /// Largest absolute arc cost (the `C` of the complexity bounds).
    pub fn max_abs_cost(&self) -> i64 {
        self.max_abs_cost
    }

    /// Multiplier used to turn real costs into the stored integers.
    pub fn cost_scale(&self) -> i64 {
        self.cost_scale
    }

    pub fn detection_id(&self, detection: usize) -> u64 {
        self.detection_ids[detection]
    }

    pub fn detection_ids(&self) -> &[u64] {
        &self.detection_ids
    }

    pub fn frames(&self) -> Option<&[u32]> {
        self.frames.as_deref()
    }

    pub fn arc(&self, k: usize) -> Arc {
        Arc {
            tail: self.tails[k] as usize,
            head: self.heads[k] as usize,
            cost: self.costs[k],
            kind: self.kinds[k],
        }
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        (0..self.arc_count()).map(move |k| self.arc(k))
    }

    #[inline]
    pub fn tail(&self, k: usize) -> usize {
        self.tails[k] as usize
    }

    #[inline]
    pub fn head(&self, k: usize) -> usize {
        self.heads[k] as usize
    }

    #[inline]
    pub fn cost(&self, k: usize) -> i64 {
        self.costs[k]
    }

    pub fn costs(&self) -> &[i64] {
        &self.costs
    }

    #[inline]
    pub fn kind(&self, k: usize) -> ArcKind {
        self.kinds[k]
    }

    #[inline]
    pub fn residual_tail(&self, r: usize) -> usize {
        if r & 1 == 0 {
            self.tails[r >> 1] as usize
        } else {
            self.heads[r >> 1] as usize
        }
    }

    #[inline]
    pub fn residual_head(&self, r: usize) -> usize {
        if r & 1 == 0 {
            self.heads[r >> 1] as usize
        } else {
            self.tails[r >> 1] as usize
        }
    }

    #[inline]
    pub fn residual_cost(&self, r: usize) -> i64 {
        if r & 1 == 0 {
            self.costs[r >> 1]
        } else {
            -self.costs[r >> 1]
        }
    }

    /// Residual arc ids leaving `v` (original out-arcs and twins of in-arcs).
    #[inline]
    pub fn residual_out(&self, v: usize) -> &[u32] {
        &self.residual_out[self.first_out[v] as usize..self.first_out[v + 1] as usize]
    }

    /// Same topology with a different cost vector.
    pub fn with_costs(&self, costs: Vec<i64>) -> Result<Self, GraphError> {
        if costs.len() != self.arc_count() {
            return Err(GraphError::LengthMismatch {
                expected: self.arc_count(),
                got: costs.len(),
            });
        }
        if let Some((k, c)) = costs.iter().enumerate().find(|(_, c)| c.abs() > MAX_ABS_COST) {
            return Err(GraphError::CostOverflow {
                what: format!("arc {k}"),
                value: *c as f64,
                bound: MAX_ABS_COST,
            });
        }
        let mut net = self.clone();
        net.max_abs_cost = costs.iter().map(|c| c.abs()).max().unwrap_or(0);
        net.costs = costs;
        Ok(net)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.residual_out(v).iter().filter(|&&r| r & 1 == 0).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.residual_out(v).iter().filter(|&&r| r & 1 == 1).count()
    }

    /// Total cost of a 0/1 flow over original arcs.
    pub fn flow_cost(&self, flow: &[bool]) -> i64 {
        flow.iter()
            .zip(&self.costs)
            .filter(|(f, _)| **f)
            .map(|(_, c)| *c)
            .sum()
    }

    /// Writes the `n m` header followed by `tail head cost kind` lines.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.node_count, self.arc_count())?;
        for a in self.arcs() {
            writeln!(out, "{} {} {} {}", a.tail, a.head, a.cost, a.kind)?;
        }
        Ok(())
    }

    pub fn read_dump<R: BufRead>(input: R) -> Result<Self, GraphError> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));
        let dump_err = |line: usize, msg: String| GraphError::Dump { line, msg };
        let (hline, header) = lines
            .next()
            .ok_or_else(|| dump_err(1, "missing `n m` header".into()))?;
        let header = header.map_err(|e| dump_err(hline, e.to_string()))?;
        let mut it = header.split_whitespace();
        let parse_usize = |tok: Option<&str>, what: &str, line: usize| -> Result<usize, GraphError> {
            tok.ok_or_else(|| dump_err(line, format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| dump_err(line, format!("bad {what}: {e}")))
        };
        let n = parse_usize(it.next(), "node count", hline)?;
        let m = parse_usize(it.next(), "arc count", hline)?;
        let mut arcs = Vec::with_capacity(m);
        for (lineno, line) in lines {
            let line = line.map_err(|e| dump_err(lineno, e.to_string()))?;
            let mut tok = line.split_whitespace();
            let t = parse_usize(tok.next(), "tail", lineno)?;
            let h = parse_usize(tok.next(), "head", lineno)?;
            let c = tok
                .next()
                .ok_or_else(|| dump_err(lineno, "missing cost".into()))?
                .parse::<i64>()
                .map_err(|e| dump_err(lineno, format!("bad cost: {e}")))?;
            let kind_tok = tok
                .next()
                .ok_or_else(|| dump_err(lineno, "missing kind".into()))?;
            let kind = ArcKind::parse(kind_tok)
                .ok_or_else(|| dump_err(lineno, format!("unknown arc kind `{kind_tok}`")))?;
            arcs.push((t, h, c, kind));
        }
        if arcs.len() != m {
            return Err(dump_err(
                hline,
                format!("header announces {m} arcs, found {}", arcs.len()),
            ));
        }
        Self::from_arcs(n, &arcs)
    }
}

fn scale_cost<T: Real>(value: T, scale: i64, what: impl Fn() -> String) -> Result<i64, GraphError> {
    let v = value
        .to_f64()
        .filter(|v| v.is_finite())
        .ok_or_else(|| GraphError::NonFiniteCost(what()))?;
    let scaled = (v * scale as f64).round();
    if scaled.abs() > MAX_ABS_COST as f64 {
        return Err(GraphError::CostOverflow {
            what: what(),
            value: scaled,
            bound: MAX_ABS_COST,
        });
    }
    Ok(scaled as i64)
}

/// Builds the circulation network for `detections` with real-valued `costs`
/// multiplied by `scale` and rounded to integers.
pub fn build_network<T: Real>(
    detections: &[Detection<T>],
    costs: &CostAssignment<T>,
    scale: i64,
) -> Result<CirculationNetwork, GraphError> {
    let d = detections.len();
    for len in [costs.enter.len(), costs.exit.len(), costs.observation.len()] {
        if len != d {
            return Err(GraphError::LengthMismatch {
                expected: d,
                got: len,
            });
        }
    }
    let mut seen = HashSet::with_capacity(d);
    for det in detections {
        if !seen.insert(det.id) {
            return Err(GraphError::DuplicateDetection(det.id));
        }
    }
    if let Some(first) = detections.first() {
        let dim = first.position.len();
        if let Some(bad) = detections.iter().find(|x| x.position.len() != dim) {
            return Err(GraphError::MixedDimension(dim, bad.position.len()));
        }
    }

    let mut arcs = Vec::with_capacity(3 * d + costs.transition_count());
    for i in 0..d {
        let id = detections[i].id;
        let (o, h) = (pre_node(i), post_node(i));
        arcs.push((
            DUMMY_NODE,
            o,
            scale_cost(costs.enter[i], scale, || format!("enter arc of detection {id}"))?,
            ArcKind::Enter,
        ));
        arcs.push((
            o,
            h,
            scale_cost(costs.observation[i], scale, || {
                format!("observation arc of detection {id}")
            })?,
            ArcKind::Observation,
        ));
        arcs.push((
            h,
            DUMMY_NODE,
            scale_cost(costs.exit[i], scale, || format!("exit arc of detection {id}"))?,
            ArcKind::Exit,
        ));
    }
    for ((i, j), c) in costs.transitions() {
        for k in [i, j] {
            if k >= d {
                return Err(GraphError::UnknownDetection(k));
            }
        }
        let (fi, fj) = (detections[i].frame, detections[j].frame);
        if fi >= fj {
            return Err(GraphError::TemporalOrder {
                from: i,
                to: j,
                from_frame: fi,
                to_frame: fj,
            });
        }
        arcs.push((
            post_node(i),
            pre_node(j),
            scale_cost(c, scale, || format!("transition {i} -> {j}"))?,
            ArcKind::Transition,
        ));
    }
    Ok(CirculationNetwork::assemble(
        2 * d + 1,
        arcs,
        detections.iter().map(|x| x.id).collect(),
        Some(detections.iter().map(|x| x.frame).collect()),
        scale,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A directed cycle avoiding the dummy node; lists its nodes.
    Cycle(Vec<usize>),
    /// Node with both in-degree and out-degree different from one.
    NotUnitCapacity {
        node: usize,
        in_degree: usize,
        out_degree: usize,
    },
    /// Pre-node without exactly one out-arc to its post-node, or a post-node
    /// without exactly one in-arc from its pre-node.
    Pairing { node: usize, detail: String },
    /// Transition arc that does not go forward in time.
    Temporal { arc: usize, from_frame: u32, to_frame: u32 },
    /// Stored `n`, `m` or `C` differ from a recount.
    Counts(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle(nodes) => write!(f, "cycle avoiding the dummy node through {nodes:?}"),
            Violation::NotUnitCapacity {
                node,
                in_degree,
                out_degree,
            } => write!(
                f,
                "node {node} has in-degree {in_degree} and out-degree {out_degree}"
            ),
            Violation::Pairing { node, detail } => write!(f, "node {node}: {detail}"),
            Violation::Temporal {
                arc,
                from_frame,
                to_frame,
            } => write!(f, "transition arc {arc} goes from frame {from_frame} to {to_frame}"),
            Violation::Counts(msg) => f.write_str(msg),
        }
    }
}

/// Outcome of [`validate_network`]; each check keeps its first violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub acyclic_without_dummy: Result<(), Violation>,
    pub unit_vertex_capacity: Result<(), Violation>,
    pub pairing: Result<(), Violation>,
    pub temporal_order: Result<(), Violation>,
    pub counts: Result<(), Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.checks().iter().all(|(_, r)| r.is_ok())
    }

    pub fn checks(&self) -> [(&'static str, &Result<(), Violation>); 5] {
        [
            ("acyclic_without_dummy", &self.acyclic_without_dummy),
            ("unit_vertex_capacity", &self.unit_vertex_capacity),
            ("pairing", &self.pairing),
            ("temporal_order", &self.temporal_order),
            ("counts", &self.counts),
        ]
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.checks().into_iter().find_map(|(_, r)| r.as_ref().err())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, r) in self.checks() {
            match r {
                Ok(()) => writeln!(f, "{name}: ok")?,
                Err(v) => writeln!(f, "{name}: FAILED ({v})")?,
            }
        }
        Ok(())
    }
}

pub fn validate_network(net: &CirculationNetwork) -> ValidationReport {
    ValidationReport {
        acyclic_without_dummy: check_acyclic(net),
        unit_vertex_capacity: check_unit_vertex_capacity(net),
        pairing: check_pairing(net),
        temporal_order: check_temporal(net),
        counts: check_counts(net),
    }
}

fn check_acyclic(net: &CirculationNetwork) -> Result<(), Violation> {
    // Kahn's algorithm on G \ s.
    let n = net.node_count();
    let mut indeg = vec![0usize; n];
    for a in net.arcs() {
        if a.tail != DUMMY_NODE && a.head != DUMMY_NODE {
            indeg[a.head] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (1..n).filter(|&v| indeg[v] == 0).collect();
    let mut visited = 0;
    while let Some(v) = queue.pop_front() {
        visited += 1;
        for &r in net.residual_out(v) {
            let r = r as usize;
            if r & 1 == 1 {
                continue;
            }
            let w = net.residual_head(r);
            if w == DUMMY_NODE {
                continue;
            }
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if visited + 1 >= n {
        return Ok(());
    }
    // Walk backwards inside the leftover subgraph to report one cycle.
    let start = (1..n).find(|&v| indeg[v] > 0).expect("leftover node");
    let mut order = Vec::new();
    let mut pos = vec![usize::MAX; n];
    let mut v = start;
    while pos[v] == usize::MAX {
        pos[v] = order.len();
        order.push(v);
        v = net
            .residual_out(v)
            .iter()
            .map(|&r| r as usize)
            .filter(|r| r & 1 == 0)
            .map(|r| net.residual_head(r))
            .find(|&w| w != DUMMY_NODE && indeg[w] > 0)
            .expect("node in cycle region has a successor in it");
    }
    Err(Violation::Cycle(order[pos[v]..].to_vec()))
}

fn check_unit_vertex_capacity(net: &CirculationNetwork) -> Result<(), Violation> {
    for v in 1..net.node_count() {
        let (i, o) = (net.in_degree(v), net.out_degree(v));
        if i != 1 && o != 1 {
            return Err(Violation::NotUnitCapacity {
                node: v,
                in_degree: i,
                out_degree: o,
            });
        }
    }
    Ok(())
}

fn check_pairing(net: &CirculationNetwork) -> Result<(), Violation> {
    for d in 0..net.detection_count() {
        let (o, h) = (pre_node(d), post_node(d));
        let outs: Vec<_> = net
            .residual_out(o)
            .iter()
            .map(|&r| r as usize)
            .filter(|r| r & 1 == 0)
            .collect();
        if outs.len() != 1 || net.residual_head(outs[0]) != h {
            return Err(Violation::Pairing {
                node: o,
                detail: format!(
                    "pre-node must have exactly one out-arc to post-node {h}, has {}",
                    outs.len()
                ),
            });
        }
        if net.kind(outs[0] >> 1) != ArcKind::Observation {
            return Err(Violation::Pairing {
                node: o,
                detail: "pre-node out-arc is not an observation arc".into(),
            });
        }
        let ins: Vec<_> = net
            .residual_out(h)
            .iter()
            .map(|&r| r as usize)
            .filter(|r| r & 1 == 1)
            .collect();
        if ins.len() != 1 || net.residual_head(ins[0]) != o {
            return Err(Violation::Pairing {
                node: h,
                detail: format!(
                    "post-node must have exactly one in-arc from pre-node {o}, has {}",
                    ins.len()
                ),
            });
        }
    }
    Ok(())
}

fn check_temporal(net: &CirculationNetwork) -> Result<(), Violation> {
    let Some(frames) = net.frames() else {
        return Ok(());
    };
    for (k, a) in net.arcs().enumerate() {
        if a.kind != ArcKind::Transition {
            continue;
        }
        let (Some((i, false)), Some((j, true))) = (node_detection(a.tail), node_detection(a.head))
        else {
            return Err(Violation::Pairing {
                node: a.tail,
                detail: format!("transition arc {k} must run post-node -> pre-node"),
            });
        };
        if frames[i] >= frames[j] {
            return Err(Violation::Temporal {
                arc: k,
                from_frame: frames[i],
                to_frame: frames[j],
            });
        }
    }
    Ok(())
}

fn check_counts(net: &CirculationNetwork) -> Result<(), Violation> {
    let n = net.node_count();
    if n != 2 * net.detection_count() + 1 {
        return Err(Violation::Counts(format!(
            "n = {n} but {} detections imply {}",
            net.detection_count(),
            2 * net.detection_count() + 1
        )));
    }
    let m: usize = (0..n).map(|v| net.out_degree(v)).sum();
    if m != net.arc_count() {
        return Err(Violation::Counts(format!(
            "m = {} but adjacency holds {m} arcs",
            net.arc_count()
        )));
    }
    let c = net.arcs().map(|a| a.cost.abs()).max().unwrap_or(0);
    if c != net.max_abs_cost() {
        return Err(Violation::Counts(format!(
            "C = {} but recount gives {c}",
            net.max_abs_cost()
        )));
    }
    Ok(())
}
