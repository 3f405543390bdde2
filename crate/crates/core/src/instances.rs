//! Seeded random tracking-shaped networks for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::costs::CostAssignment;
use crate::graph::{build_network, CirculationNetwork, Detection};

#[derive(Debug, Clone)]
pub struct RandomNetworkConfig {
    pub detections: usize,
    pub frames: u32,
    /// Transitions may skip up to `max_gap - 1` frames.
    pub max_gap: u32,
    /// Candidate successors drawn per detection.
    pub max_out: usize,
    pub enter: (i64, i64),
    pub exit: (i64, i64),
    pub observation: (i64, i64),
    pub transition: (i64, i64),
}

impl Default for RandomNetworkConfig {
    fn default() -> Self {
        RandomNetworkConfig {
            detections: 10,
            frames: 4,
            max_gap: 2,
            max_out: 3,
            enter: (0, 20),
            exit: (0, 20),
            observation: (-30, 5),
            transition: (0, 20),
        }
    }
}

/// Detections spread over `frames` frames (every frame non-empty when
/// possible) with uniform integer costs from the configured ranges.
pub fn random_network(cfg: &RandomNetworkConfig, seed: u64) -> CirculationNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = cfg.detections;
    let frames = cfg.frames.max(1);
    let mut frame_of: Vec<u32> = (0..d)
        .map(|i| {
            if (i as u32) < frames && d >= frames as usize {
                i as u32
            } else {
                rng.random_range(0..frames)
            }
        })
        .collect();
    frame_of.sort_unstable();
    let detections: Vec<Detection<f64>> = frame_of
        .iter()
        .enumerate()
        .map(|(i, &f)| Detection::new(i as u64, f, vec![i as f64], 0.5))
        .collect();

    let mut costs = CostAssignment::new(d);
    for i in 0..d {
        costs.enter[i] = draw(&mut rng, cfg.enter);
        costs.exit[i] = draw(&mut rng, cfg.exit);
        costs.observation[i] = draw(&mut rng, cfg.observation);
    }
    // index ranges per frame
    let mut first = vec![d; frames as usize + 1];
    for i in (0..d).rev() {
        first[frame_of[i] as usize] = i;
    }
    for f in (0..frames as usize).rev() {
        first[f] = first[f].min(first[f + 1]);
    }
    for i in 0..d {
        let lo_f = frame_of[i] as usize + 1;
        let hi_f = (frame_of[i] + cfg.max_gap.max(1)) as usize;
        if lo_f >= frames as usize {
            continue;
        }
        let lo = first[lo_f];
        let hi = first[(hi_f + 1).min(frames as usize)];
        if lo >= hi {
            continue;
        }
        for _ in 0..cfg.max_out {
            let j = rng.random_range(lo..hi);
            let c = draw(&mut rng, cfg.transition);
            costs.add_transition(i, j, c);
        }
    }
    build_network(&detections, &costs, 1).expect("generated instance is valid")
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (i64, i64)) -> f64 {
    if lo >= hi {
        lo as f64
    } else {
        rng.random_range(lo..=hi) as f64
    }
}
