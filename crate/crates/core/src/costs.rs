//! Arc costs from detection probabilities, gating and iterative refinement.

use std::collections::{BTreeMap, HashMap};

use crate::error::CostError;
use crate::graph::{Detection, DEFAULT_COST_SCALE};
use crate::scalar::{euclidean, median, Real};
use crate::trajectory::TrajectorySet;

/// Probabilities are clamped into `[PROB_MIN, 1 - PROB_MIN]` before logs.
pub const PROB_MIN: f64 = 1e-6;

pub fn clamp_probability<T: Real>(p: T) -> T {
    let lo = T::lit(PROB_MIN);
    let hi = T::one() - lo;
    if p.is_nan() {
        return lo;
    }
    p.max(lo).min(hi)
}

/// `-ln(clamp(p))`.
pub fn neg_log<T: Real>(p: T) -> T {
    -clamp_probability(p).ln()
}

/// Real-valued costs for one detection set.
#[derive(Debug, Clone, PartialEq)]
pub struct CostAssignment<T> {
    pub enter: Vec<T>,
    pub exit: Vec<T>,
    pub observation: Vec<T>,
    transitions: BTreeMap<(usize, usize), T>,
}

impl<T: Real> CostAssignment<T> {
    pub fn new(detections: usize) -> Self {
        CostAssignment {
            enter: vec![T::zero(); detections],
            exit: vec![T::zero(); detections],
            observation: vec![T::zero(); detections],
            transitions: BTreeMap::new(),
        }
    }

    /// Adds a transition; a repeated pair keeps the cheaper cost.
    pub fn add_transition(&mut self, from: usize, to: usize, cost: T) {
        self.transitions
            .entry((from, to))
            .and_modify(|c| {
                if cost < *c {
                    *c = cost
                }
            })
            .or_insert(cost);
    }

    pub fn transition(&self, from: usize, to: usize) -> Option<T> {
        self.transitions.get(&(from, to)).copied()
    }

    pub fn transitions(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        self.transitions.iter().map(|(&k, &v)| (k, v))
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn detection_count(&self) -> usize {
        self.enter.len()
    }
}

/// Source of the entry/exit probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointProbability<T> {
    Fixed(T),
    /// Estimated from frame-to-frame detection count changes.
    FromCounts,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaPolicy<T> {
    PerDetection,
    Global(T),
}

/// How the pre-node -> post-node arc is priced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservationRule {
    /// `ln(beta / (1 - beta))`.
    Bernoulli,
    /// `-(C_en + C_ex)`, forcing every detection into a trajectory.
    ForceAll,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostModelConfig<T> {
    pub p_enter: EndpointProbability<T>,
    pub p_exit: EndpointProbability<T>,
    pub beta: BetaPolicy<T>,
    pub observation: ObservationRule,
    /// Nearest neighbours kept per later frame.
    pub gating_k: usize,
    /// Largest frame gap a transition may span.
    pub jump_window: u32,
    /// Distances are divided by this before the empirical lookup.
    pub distance_scale: T,
    /// Fixed displacement samples; when absent the model is fitted from
    /// nearest-neighbour distances between adjacent frames.
    pub distance_samples: Option<Vec<T>>,
    pub cost_scale: i64,
}

impl<T: Real> Default for CostModelConfig<T> {
    fn default() -> Self {
        CostModelConfig {
            p_enter: EndpointProbability::FromCounts,
            p_exit: EndpointProbability::FromCounts,
            beta: BetaPolicy::PerDetection,
            observation: ObservationRule::Bernoulli,
            gating_k: 3,
            jump_window: 2,
            distance_scale: T::one(),
            distance_samples: None,
            cost_scale: DEFAULT_COST_SCALE,
        }
    }
}

impl<T: Real> CostModelConfig<T> {
    pub fn validate(&self) -> Result<(), CostError> {
        if self.gating_k == 0 {
            return Err(CostError::Config("gating_k must be at least 1".into()));
        }
        if self.jump_window == 0 {
            return Err(CostError::Config("jump_window must be at least 1".into()));
        }
        if self.cost_scale <= 0 {
            return Err(CostError::Config("cost scale must be positive".into()));
        }
        if !(self.distance_scale > T::zero()) {
            return Err(CostError::Config("distance_scale must be positive".into()));
        }
        for p in [self.p_enter, self.p_exit] {
            if let EndpointProbability::Fixed(p) = p {
                if !p.is_finite() {
                    return Err(CostError::Config("endpoint probability is not finite".into()));
                }
            }
        }
        Ok(())
    }
}

/// Upper-tail empirical distribution of displacement magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistanceModel<T> {
    sorted: Vec<T>,
}

impl<T: Real> EmpiricalDistanceModel<T> {
    pub fn samples(&self) -> &[T] {
        &self.sorted
    }

    fn count_at_least(&self, d: T) -> usize {
        self.sorted.len() - self.sorted.partition_point(|&s| s < d)
    }

    /// Fraction of samples `>= d`, without smoothing.
    pub fn raw_p_value(&self, d: T) -> T {
        T::from_usize(self.count_at_least(d)).unwrap() / T::from_usize(self.sorted.len()).unwrap()
    }

    /// Add-one smoothed tail probability `(#{s >= d} + 1) / (N + 1)`.
    pub fn p_value(&self, d: T) -> T {
        T::from_usize(self.count_at_least(d) + 1).unwrap()
            / T::from_usize(self.sorted.len() + 1).unwrap()
    }
}

pub fn fit_empirical_distance<T: Real>(
    displacements: &[T],
) -> Result<EmpiricalDistanceModel<T>, CostError> {
    let mut sorted: Vec<T> = displacements
        .iter()
        .copied()
        .filter(|d| d.is_finite())
        .map(|d| d.abs())
        .collect();
    if sorted.is_empty() {
        return Err(CostError::EmptySample);
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(EmpiricalDistanceModel { sorted })
}

/// Detection indices grouped by frame, each group sorted by id.
pub(crate) fn frame_index<T: Real>(detections: &[Detection<T>]) -> BTreeMap<u32, Vec<usize>> {
    let mut by_frame: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, d) in detections.iter().enumerate() {
        by_frame.entry(d.frame).or_default().push(i);
    }
    for v in by_frame.values_mut() {
        v.sort_by_key(|&i| detections[i].id);
    }
    by_frame
}

fn k_nearest<T: Real>(
    detections: &[Detection<T>],
    anchor: &[T],
    candidates: &[usize],
    k: usize,
    out: &mut Vec<usize>,
) {
    let mut scored: Vec<(T, u64, usize)> = candidates
        .iter()
        .map(|&j| {
            (
                euclidean(anchor, &detections[j].position),
                detections[j].id,
                j,
            )
        })
        .collect();
    let cmp = |a: &(T, u64, usize), b: &(T, u64, usize)| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    };
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, cmp);
        scored.truncate(k);
    }
    scored.sort_by(cmp);
    out.extend(scored.into_iter().map(|s| s.2));
}

/// Candidate transitions: for each detection and each frame offset in
/// `1..=jump_window`, the `gating_k` nearest detections of that frame.
pub fn gate_transitions<T: Real>(
    detections: &[Detection<T>],
    config: &CostModelConfig<T>,
) -> Vec<(usize, usize)> {
    gate_transitions_with_velocity(detections, config, None)
}

/// Gating around predicted positions `position + offset * velocity`.
pub fn gate_transitions_with_velocity<T: Real>(
    detections: &[Detection<T>],
    config: &CostModelConfig<T>,
    velocities: Option<&[Vec<T>]>,
) -> Vec<(usize, usize)> {
    let by_frame = frame_index(detections);
    let k = config.gating_k.max(1);
    let mut pairs = Vec::new();
    let mut buf = Vec::new();
    for (i, det) in detections.iter().enumerate() {
        for offset in 1..=config.jump_window {
            let Some(frame) = det.frame.checked_add(offset) else {
                break;
            };
            let Some(cands) = by_frame.get(&frame) else {
                continue;
            };
            let anchor = predicted_position(det, velocities.map(|v| v[i].as_slice()), offset);
            buf.clear();
            k_nearest(detections, &anchor, cands, k, &mut buf);
            pairs.extend(buf.iter().map(|&j| (i, j)));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn predicted_position<T: Real>(det: &Detection<T>, velocity: Option<&[T]>, offset: u32) -> Vec<T> {
    match velocity {
        Some(v) if !v.is_empty() => {
            let dt = T::from_u32(offset).unwrap();
            det.position
                .iter()
                .zip(v)
                .map(|(&p, &vel)| p + vel * dt)
                .collect()
        }
        _ => det.position.clone(),
    }
}

/// Entry and exit probabilities from frame-to-frame count changes: a drop
/// of `n` detections ends `n` trajectories, a rise of `n` starts `n`.
pub fn endpoint_probabilities_from_counts<T: Real>(detections: &[Detection<T>]) -> (T, T) {
    if detections.is_empty() {
        return (T::lit(0.5), T::lit(0.5));
    }
    let by_frame = frame_index(detections);
    let counts: Vec<usize> = by_frame.values().map(|v| v.len()).collect();
    let mut starts = counts[0];
    let mut ends = *counts.last().unwrap();
    for w in counts.windows(2) {
        if w[1] > w[0] {
            starts += w[1] - w[0];
        } else {
            ends += w[0] - w[1];
        }
    }
    let total = T::from_usize(detections.len()).unwrap();
    (
        clamp_probability(T::from_usize(starts).unwrap() / total),
        clamp_probability(T::from_usize(ends).unwrap() / total),
    )
}

/// Distances from each detection to its nearest neighbour one frame later.
pub fn nearest_neighbor_displacements<T: Real>(detections: &[Detection<T>]) -> Vec<T> {
    let by_frame = frame_index(detections);
    let mut out = Vec::new();
    for (frame, members) in &by_frame {
        let Some(next) = frame.checked_add(1).and_then(|f| by_frame.get(&f)) else {
            continue;
        };
        for &i in members {
            let best = next
                .iter()
                .map(|&j| euclidean(&detections[i].position, &detections[j].position))
                .fold(T::infinity(), T::min);
            if best.is_finite() {
                out.push(best);
            }
        }
    }
    out
}

fn base_distance_model<T: Real>(
    detections: &[Detection<T>],
    config: &CostModelConfig<T>,
) -> EmpiricalDistanceModel<T> {
    let samples = match &config.distance_samples {
        Some(s) if !s.is_empty() => s.clone(),
        _ => nearest_neighbor_displacements(detections)
            .into_iter()
            .map(|d| d / config.distance_scale)
            .collect(),
    };
    fit_empirical_distance(&samples).unwrap_or_else(|_| EmpiricalDistanceModel {
        sorted: vec![T::one()],
    })
}

fn observation_costs<T: Real>(
    detections: &[Detection<T>],
    config: &CostModelConfig<T>,
    costs: &mut CostAssignment<T>,
) -> Result<(), CostError> {
    for (i, det) in detections.iter().enumerate() {
        costs.observation[i] = match config.observation {
            ObservationRule::Bernoulli => {
                let beta = clamp_probability(match config.beta {
                    BetaPolicy::PerDetection => det.beta,
                    BetaPolicy::Global(b) => b,
                });
                (beta / (T::one() - beta)).ln()
            }
            ObservationRule::ForceAll => -(costs.enter[i] + costs.exit[i]),
        };
        if !costs.observation[i].is_finite() {
            return Err(CostError::NonFinite {
                what: "observation cost",
                index: i,
            });
        }
    }
    Ok(())
}

struct TransitionContext<'a, T> {
    model: &'a EmpiricalDistanceModel<T>,
    velocities: Option<&'a [Vec<T>]>,
    p_jump: Option<T>,
}

fn assemble_costs<T: Real>(
    detections: &[Detection<T>],
    config: &CostModelConfig<T>,
    p_enter: T,
    p_exit: T,
    pairs: &[(usize, usize)],
    ctx: &TransitionContext<'_, T>,
) -> Result<CostAssignment<T>, CostError> {
    let mut costs = CostAssignment::new(detections.len());
    let (c_en, c_ex) = (neg_log(p_enter), neg_log(p_exit));
    for i in 0..detections.len() {
        costs.enter[i] = c_en;
        costs.exit[i] = c_ex;
    }
    observation_costs(detections, config, &mut costs)?;
    for &(i, j) in pairs {
        let (a, b) = (&detections[i], &detections[j]);
        let offset = b.frame - a.frame;
        let anchor = predicted_position(a, ctx.velocities.map(|v| v[i].as_slice()), offset);
        let d = euclidean(&anchor, &b.position) / config.distance_scale;
        let mut p = ctx.model.p_value(d);
        if offset > 1 {
            if let Some(pj) = ctx.p_jump {
                p = p * clamp_probability(pj);
            }
        }
        let c = neg_log(p);
        if !c.is_finite() {
            return Err(CostError::NonFinite {
                what: "transition cost",
                index: i,
            });
        }
        costs.add_transition(i, j, c);
    }
    Ok(costs)
}

fn resolve_endpoints<T: Real>(detections: &[Detection<T>], config: &CostModelConfig<T>) -> (T, T) {
    let counted = endpoint_probabilities_from_counts(detections);
    let pick = |choice: EndpointProbability<T>, counted: T| match choice {
        EndpointProbability::Fixed(p) => p,
        EndpointProbability::FromCounts => counted,
    };
    (pick(config.p_enter, counted.0), pick(config.p_exit, counted.1))
}

/// First-pass costs: gating on raw positions, entry/exit from the config,
/// Bernoulli (or forced) observation costs and empirical transition costs.
pub fn probabilistic_costs<T: Real>(
    detections: &[Detection<T>],
    config: &CostModelConfig<T>,
) -> Result<CostAssignment<T>, CostError> {
    config.validate()?;
    let pairs = gate_transitions(detections, config);
    let model = base_distance_model(detections, config);
    let (p_enter, p_exit) = resolve_endpoints(detections, config);
    assemble_costs(
        detections,
        config,
        p_enter,
        p_exit,
        &pairs,
        &TransitionContext {
            model: &model,
            velocities: None,
            p_jump: None,
        },
    )
}

/// Replaces every observation cost by `-(C_en + C_ex)`.
pub fn groundtruth_observation_costs<T: Real>(assignment: &CostAssignment<T>) -> CostAssignment<T> {
    let mut out = assignment.clone();
    for i in 0..out.detection_count() {
        out.observation[i] = -(out.enter[i] + out.exit[i]);
    }
    out
}

/// Costs re-estimated from a previous solution, plus the fitted parameters.
#[derive(Debug, Clone)]
pub struct RefinedCosts<T> {
    pub costs: CostAssignment<T>,
    pub p_jump: Option<T>,
    pub p_enter: T,
    pub p_exit: T,
    pub velocities: Vec<Vec<T>>,
    pub model: EmpiricalDistanceModel<T>,
    /// True when the previous solution had no linkages and first-pass costs were used.
    pub fell_back: bool,
}

/// Jumps (linkages spanning more than one frame) over all linkages.
pub fn jump_ratio<T: Real>(previous: &TrajectorySet, detections: &[Detection<T>]) -> Option<T> {
    let (mut links, mut jumps) = (0usize, 0usize);
    for (i, j) in previous.linkages() {
        links += 1;
        if detections[j].frame - detections[i].frame > 1 {
            jumps += 1;
        }
    }
    (links > 0).then(|| T::from_usize(jumps).unwrap() / T::from_usize(links).unwrap())
}

/// Per-detection velocity from its trajectory: backward difference when the
/// detection has a predecessor, forward difference otherwise, zero when the
/// detection is unselected or alone.
pub fn instant_velocities<T: Real>(
    previous: &TrajectorySet,
    detections: &[Detection<T>],
) -> Vec<Option<Vec<T>>> {
    let mut out = vec![None; detections.len()];
    let diff = |a: usize, b: usize| -> Vec<T> {
        let dt = T::from_u32(detections[b].frame - detections[a].frame).unwrap();
        detections[b]
            .position
            .iter()
            .zip(&detections[a].position)
            .map(|(&pb, &pa)| (pb - pa) / dt)
            .collect()
    };
    for t in &previous.trajectories {
        let ds = &t.detections;
        for (k, &d) in ds.iter().enumerate() {
            out[d] = if k > 0 {
                Some(diff(ds[k - 1], d))
            } else if k + 1 < ds.len() {
                Some(diff(d, ds[k + 1]))
            } else {
                None
            };
        }
    }
    out
}

/// Component-wise median over each tracked detection and its four nearest
/// tracked neighbours in the same frame.
pub fn calibrate_velocities<T: Real>(
    detections: &[Detection<T>],
    instant: &[Option<Vec<T>>],
) -> Vec<Vec<T>> {
    let dim = detections.first().map(|d| d.position.len()).unwrap_or(0);
    let mut tracked_by_frame: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, v) in instant.iter().enumerate() {
        if v.is_some() {
            tracked_by_frame.entry(detections[i].frame).or_default().push(i);
        }
    }
    let mut out = vec![vec![T::zero(); dim]; detections.len()];
    for (i, own) in instant.iter().enumerate() {
        let Some(own) = own else { continue };
        let peers: Vec<usize> = tracked_by_frame[&detections[i].frame]
            .iter()
            .copied()
            .filter(|&j| j != i)
            .collect();
        let mut nearest = Vec::new();
        k_nearest(detections, &detections[i].position, &peers, 4, &mut nearest);
        let mut component = Vec::with_capacity(nearest.len() + 1);
        for c in 0..own.len() {
            component.clear();
            component.push(own[c]);
            component.extend(nearest.iter().map(|&j| instant[j].as_ref().unwrap()[c]));
            out[i][c] = median(&mut component);
        }
    }
    out
}

/// Re-estimates costs from a previous trajectory set: velocity-predicted
/// distances, a jump penalty, entry/exit rates and a refitted distance model.
pub fn refine_costs<T: Real>(
    previous: &TrajectorySet,
    detections: &[Detection<T>],
    config: &CostModelConfig<T>,
) -> Result<RefinedCosts<T>, CostError> {
    config.validate()?;
    let Some(p_jump) = jump_ratio(previous, detections) else {
        let (p_enter, p_exit) = resolve_endpoints(detections, config);
        return Ok(RefinedCosts {
            costs: probabilistic_costs(detections, config)?,
            p_jump: None,
            p_enter,
            p_exit,
            velocities: vec![Vec::new(); detections.len()],
            model: base_distance_model(detections, config),
            fell_back: true,
        });
    };
    let instant = instant_velocities(previous, detections);
    let velocities = calibrate_velocities(detections, &instant);

    let rate = clamp_probability(
        T::from_usize(previous.len()).unwrap() / T::from_usize(detections.len()).unwrap(),
    );

    let mut residuals = Vec::new();
    for (i, j) in previous.linkages() {
        if instant[i].is_none() {
            continue;
        }
        let offset = detections[j].frame - detections[i].frame;
        let anchor = predicted_position(&detections[i], Some(&velocities[i]), offset);
        residuals.push(euclidean(&anchor, &detections[j].position) / config.distance_scale);
    }
    let model = fit_empirical_distance(&residuals)
        .unwrap_or_else(|_| base_distance_model(detections, config));

    let pairs = gate_transitions_with_velocity(detections, config, Some(&velocities));
    let costs = assemble_costs(
        detections,
        config,
        rate,
        rate,
        &pairs,
        &TransitionContext {
            model: &model,
            velocities: Some(&velocities),
            p_jump: Some(p_jump),
        },
    )?;
    Ok(RefinedCosts {
        costs,
        p_jump: Some(p_jump),
        p_enter: rate,
        p_exit: rate,
        velocities,
        model,
        fell_back: false,
    })
}
