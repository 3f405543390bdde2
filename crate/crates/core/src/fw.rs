//! Frank-Wolfe for quadratic objectives over the circulation polytope.
//!
//! Each iteration linearizes the objective at the current fractional point,
//! rounds the gradient to integer arc costs and lets the circulation solver
//! find the minimizing vertex.

use std::collections::BTreeMap;
use std::io::BufRead;

use crate::error::{PipelineError, SolveError};
use crate::graph::{CirculationNetwork, MAX_ABS_COST};
use crate::scalar::Real;
use crate::solver::{solve, SolveOptions};

/// `f(x) = sum_a l_a x_a + sum_{a <= b} q_ab x_a x_b` over arc indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObjective<T> {
    linear: Vec<T>,
    // keyed by (min, max); a diagonal entry multiplies x_a^2
    quadratic: BTreeMap<(usize, usize), T>,
}

impl<T: Real> QuadraticObjective<T> {
    pub fn zero(arc_count: usize) -> Self {
        QuadraticObjective {
            linear: vec![T::zero(); arc_count],
            quadratic: BTreeMap::new(),
        }
    }

    /// Linear term equal to the network's costs in real units.
    pub fn from_network(net: &CirculationNetwork) -> Self {
        let scale = T::lit(net.cost_scale() as f64);
        QuadraticObjective {
            linear: net.costs().iter().map(|&c| T::lit(c as f64) / scale).collect(),
            quadratic: BTreeMap::new(),
        }
    }

    pub fn arc_count(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[T] {
        &self.linear
    }

    pub fn set_linear(&mut self, arc: usize, value: T) {
        self.linear[arc] = value;
    }

    /// Adds `value * x_a * x_b`; the pair is unordered.
    pub fn add_quadratic(&mut self, a: usize, b: usize, value: T) {
        assert!(a < self.arc_count() && b < self.arc_count(), "arc index out of range");
        let e = self.quadratic.entry((a.min(b), a.max(b))).or_insert(T::zero());
        *e = *e + value;
    }

    pub fn quadratic_terms(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        self.quadratic.iter().map(|(&k, &v)| (k, v))
    }

    pub fn evaluate(&self, x: &[T]) -> T {
        let lin = self.linear.iter().zip(x).fold(T::zero(), |acc, (&l, &v)| acc + l * v);
        self.quadratic
            .iter()
            .fold(lin, |acc, (&(a, b), &q)| acc + q * x[a] * x[b])
    }

    /// Objective at a 0/1 point.
    pub fn evaluate_indicator(&self, flow: &[bool]) -> T {
        let x: Vec<T> = flow.iter().map(|&f| if f { T::one() } else { T::zero() }).collect();
        self.evaluate(&x)
    }

    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = self.linear.clone();
        for (&(a, b), &q) in &self.quadratic {
            if a == b {
                g[a] = g[a] + T::lit(2.0) * q * x[a];
            } else {
                g[a] = g[a] + q * x[b];
                g[b] = g[b] + q * x[a];
            }
        }
        g
    }

    /// Reads the sparse text format: `arc value` sets a linear entry,
    /// `arc arc value` adds a quadratic entry; `#` starts a comment. Linear
    /// entries not listed keep the network's costs.
    pub fn read<R: BufRead>(
        input: R,
        net: &CirculationNetwork,
        path: &str,
    ) -> Result<Self, PipelineError> {
        let mut obj = Self::from_network(net);
        let m = net.arc_count();
        for (i, line) in input.lines().enumerate() {
            let err = |msg: String| PipelineError::Parse {
                path: path.to_string(),
                line: i + 1,
                msg,
            };
            let line = line.map_err(|e| PipelineError::Io {
                path: path.to_string(),
                source: e,
            })?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            let arc = |s: &str| -> Result<usize, PipelineError> {
                let a: usize = s.parse().map_err(|_| err(format!("bad arc index {s:?}")))?;
                if a >= m {
                    return Err(err(format!("arc {a} out of range (network has {m})")));
                }
                Ok(a)
            };
            let value = |s: &str| -> Result<T, PipelineError> {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(T::lit)
                    .ok_or_else(|| err(format!("bad value {s:?}")))
            };
            match fields.as_slice() {
                [a, v] => obj.set_linear(arc(a)?, value(v)?),
                [a, b, v] => obj.add_quadratic(arc(a)?, arc(b)?, value(v)?),
                _ => return Err(err(format!("expected 2 or 3 fields, got {}", fields.len()))),
            }
        }
        Ok(obj)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepRule {
    /// `k / (k + 2)` with `k = 1, 2, ...`.
    #[default]
    Growing,
    /// `2 / (k + 2)` with `k = 0, 1, ...`.
    Diminishing,
}

impl StepRule {
    /// Step for the `iteration`-th update (0-based).
    pub fn step<T: Real>(self, iteration: usize) -> T {
        let k = iteration as f64;
        T::lit(match self {
            StepRule::Growing => (k + 1.0) / (k + 3.0),
            StepRule::Diminishing => 2.0 / (k + 2.0),
        })
    }
}

#[derive(Debug, Clone)]
pub struct FwOptions<T> {
    pub iterations: usize,
    pub step: StepRule,
    /// Stop early once the relative objective change drops below this.
    pub tolerance: Option<T>,
    pub solver: SolveOptions,
}

impl<T: Real> Default for FwOptions<T> {
    fn default() -> Self {
        FwOptions {
            iterations: 20,
            step: StepRule::default(),
            tolerance: None,
            solver: SolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FwResult<T> {
    /// Final fractional iterate, one coordinate per arc.
    pub x: Vec<T>,
    /// Objective value after each iteration.
    pub trace: Vec<T>,
    /// Subproblem vertex with the lowest objective value.
    pub best_vertex: Vec<bool>,
    pub best_value: T,
}

/// Circulation minimizing the linearization with gradient `g`.
fn linear_vertex<T: Real>(
    g: &[T],
    net: &CirculationNetwork,
    opts: &SolveOptions,
) -> Result<Vec<bool>, SolveError> {
    let scale = T::lit(net.cost_scale() as f64);
    let mut costs = Vec::with_capacity(g.len());
    for (a, &v) in g.iter().enumerate() {
        if !v.is_finite() {
            return Err(SolveError::NonFiniteGradient(a));
        }
        let c = (v * scale).round();
        match c.to_i64() {
            Some(c) if c.abs() <= MAX_ABS_COST => costs.push(c),
            _ => {
                return Err(SolveError::InvalidArgument(format!(
                    "gradient {v} at arc {a} exceeds the integer cost range"
                )))
            }
        }
    }
    let sub = net
        .with_costs(costs)
        .map_err(|e| SolveError::InvalidArgument(e.to_string()))?;
    Ok(solve(&sub, opts)?.flow)
}

/// Runs Frank-Wolfe from the empty circulation.
pub fn frank_wolfe<T: Real>(
    obj: &QuadraticObjective<T>,
    net: &CirculationNetwork,
    opts: &FwOptions<T>,
) -> Result<FwResult<T>, SolveError> {
    if obj.arc_count() != net.arc_count() {
        return Err(SolveError::InvalidArgument(format!(
            "objective has {} arcs, network {}",
            obj.arc_count(),
            net.arc_count()
        )));
    }
    if opts.iterations == 0 {
        return Err(SolveError::InvalidArgument("at least one iteration is required".into()));
    }
    let mut x = vec![T::zero(); net.arc_count()];
    let mut trace = Vec::with_capacity(opts.iterations);
    let mut best_vertex = vec![false; net.arc_count()];
    let mut best_value = T::zero();
    for k in 0..opts.iterations {
        let vertex = linear_vertex(&obj.gradient(&x), net, &opts.solver)?;
        let value = obj.evaluate_indicator(&vertex);
        if value < best_value {
            best_value = value;
            best_vertex = vertex.clone();
        }
        let gamma: T = opts.step.step(k);
        for (xa, &s) in x.iter_mut().zip(&vertex) {
            let s = if s { T::one() } else { T::zero() };
            *xa = (*xa + gamma * (s - *xa)).max(T::zero()).min(T::one());
        }
        let f = obj.evaluate(&x);
        let prev = trace.last().copied();
        trace.push(f);
        if let (Some(tol), Some(prev)) = (opts.tolerance, prev) {
            if (prev - f).abs() <= tol * prev.abs().max(T::one()) {
                break;
            }
        }
    }
    Ok(FwResult {
        x,
        trace,
        best_vertex,
        best_value,
    })
}

/// Integral circulation minimizing the linearization at `x`.
pub fn round_solution<T: Real>(
    obj: &QuadraticObjective<T>,
    net: &CirculationNetwork,
    x: &[T],
    opts: &SolveOptions,
) -> Result<Vec<bool>, SolveError> {
    linear_vertex(&obj.gradient(x), net, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{post_node, pre_node, ArcKind};

    fn fixture() -> CirculationNetwork {
        CirculationNetwork::from_arcs(
            5,
            &[
                (0, pre_node(0), 2, ArcKind::Enter),
                (pre_node(0), post_node(0), -5, ArcKind::Observation),
                (post_node(0), 0, 2, ArcKind::Exit),
                (0, pre_node(1), 2, ArcKind::Enter),
                (pre_node(1), post_node(1), -5, ArcKind::Observation),
                (post_node(1), 0, 2, ArcKind::Exit),
                (post_node(0), pre_node(1), 1, ArcKind::Transition),
            ],
        )
        .unwrap()
    }

    #[test]
    fn step_schedules() {
        assert_eq!(StepRule::Growing.step::<f64>(0), 1.0 / 3.0);
        assert_eq!(StepRule::Growing.step::<f64>(1), 0.5);
        assert_eq!(StepRule::Diminishing.step::<f64>(0), 1.0);
        assert_eq!(StepRule::Diminishing.step::<f64>(2), 0.5);
    }

    #[test]
    fn gradient_of_symmetric_pair_and_square() {
        let mut obj = QuadraticObjective::<f64>::zero(3);
        obj.set_linear(0, 1.0);
        obj.add_quadratic(2, 0, 3.0);
        obj.add_quadratic(1, 1, 0.5);
        let x = [0.5, 1.0, 0.25];
        assert_eq!(obj.gradient(&x), vec![1.0 + 0.75, 1.0, 1.5]);
        assert_eq!(obj.evaluate(&x), 0.5 + 3.0 * 0.125 + 0.5);
    }

    #[test]
    fn linear_case_reaches_direct_optimum() {
        let net = fixture();
        let obj = QuadraticObjective::<f64>::from_network(&net);
        let r = frank_wolfe(&obj, &net, &FwOptions::default()).unwrap();
        assert_eq!(r.best_value, -5.0);
        assert_eq!(r.trace.len(), 20);
        // x_k = 1 - prod (1 - gamma_i) on the optimal arcs
        let expected = 1.0 - (0..20).fold(1.0, |p, k| p * (1.0 - StepRule::Growing.step::<f64>(k)));
        assert!((r.x[6] - expected).abs() < 1e-12);
        assert!(r.x.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn co_selection_bonus_keeps_joint_track() {
        let net = fixture();
        let mut obj = QuadraticObjective::<f64>::from_network(&net);
        obj.add_quadratic(1, 4, -0.5);
        let r = frank_wolfe(&obj, &net, &FwOptions::default()).unwrap();
        let v = round_solution(&obj, &net, &r.x, &SolveOptions::default()).unwrap();
        assert_eq!(v, vec![true, true, false, false, true, true, true]);
        assert_eq!(obj.evaluate_indicator(&v), -5.5);
    }

    #[test]
    fn reads_sparse_format() {
        let net = fixture();
        let text = "# header\n6 0.25\n1 4 -0.5\n1 4 -0.5 # twice\n";
        let obj = QuadraticObjective::<f64>::read(text.as_bytes(), &net, "q.txt").unwrap();
        assert_eq!(obj.linear()[6], 0.25);
        assert_eq!(obj.linear()[0], 2.0);
        assert_eq!(obj.quadratic_terms().collect::<Vec<_>>(), vec![((1, 4), -1.0)]);
        let bad = QuadraticObjective::<f64>::read("99 1.0\n".as_bytes(), &net, "q.txt");
        assert!(matches!(bad, Err(PipelineError::Parse { line: 1, .. })));
    }

    #[test]
    fn non_finite_gradient_is_rejected() {
        let net = fixture();
        let mut obj = QuadraticObjective::<f64>::from_network(&net);
        obj.set_linear(0, f64::NAN);
        assert!(matches!(
            frank_wolfe(&obj, &net, &FwOptions::default()),
            Err(SolveError::NonFiniteGradient(0))
        ));
    }
}
