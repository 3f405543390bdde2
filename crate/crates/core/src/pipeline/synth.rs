//! Seeded synthetic scenes: constant-velocity targets with Gaussian jitter,
//! Bernoulli misses and uniform clutter.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::graph::Detection;

#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub frames: u32,
    /// Ground-truth trajectories in the whole sequence.
    pub targets: usize,
    pub min_length: u32,
    pub max_length: u32,
    /// Side of the square (or cube) arena.
    pub arena: f64,
    pub dim: usize,
    /// Standard deviation of each velocity component.
    pub speed: f64,
    pub jitter: f64,
    pub miss_rate: f64,
    /// Mean number of clutter detections per frame.
    pub clutter: f64,
    /// Generate targets in pairs whose paths cross mid-life.
    pub crossing: bool,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            frames: 50,
            targets: 20,
            min_length: 10,
            max_length: 40,
            arena: 100.0,
            dim: 2,
            speed: 1.0,
            jitter: 0.1,
            miss_rate: 0.05,
            clutter: 1.0,
            crossing: false,
        }
    }
}

impl SceneConfig {
    /// Pairs of targets crossing each other, with misses to create gaps.
    pub fn crossing(pairs: usize) -> Self {
        SceneConfig {
            frames: 30,
            targets: 2 * pairs,
            min_length: 30,
            max_length: 30,
            arena: 20.0 * pairs as f64,
            speed: 1.5,
            jitter: 0.15,
            miss_rate: 0.15,
            clutter: 0.5,
            crossing: true,
            ..Default::default()
        }
    }

    /// Roughly `detections` detections spread over frames holding about
    /// `per_frame` targets each; lifetimes average 50 frames.
    pub fn sized(detections: usize, per_frame: usize) -> Self {
        let frames = (detections / per_frame.max(1)).max(2) as u32;
        let mean_len = 50.0_f64.min(frames as f64);
        let targets = ((detections as f64 / mean_len).ceil() as usize).max(1);
        SceneConfig {
            frames,
            targets,
            min_length: (mean_len as u32 / 2).max(2),
            max_length: ((mean_len * 1.5) as u32).min(frames).max(2),
            arena: 10.0 * (per_frame as f64).sqrt().max(1.0) * 10.0,
            miss_rate: 0.05,
            clutter: per_frame as f64 * 0.02,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    /// Sorted by frame; `id` equals the index.
    pub detections: Vec<Detection<f64>>,
    /// Ground-truth target per detection, `None` for clutter.
    pub truth: Vec<Option<usize>>,
}

impl Scene {
    /// Writes the scene as `frame,id,x,y,w,h,conf` with zero-size boxes.
    pub fn write_mot_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for d in &self.detections {
            let pos = &d.position;
            w.write_record(&[
                d.frame.to_string(),
                "-1".to_string(),
                pos[0].to_string(),
                pos.get(1).copied().unwrap_or(0.0).to_string(),
                "0".to_string(),
                "0".to_string(),
                (1.0 - d.beta).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn target_count(&self) -> usize {
        self.truth.iter().flatten().max().map_or(0, |&t| t + 1)
    }
}

pub fn generate_scene(cfg: &SceneConfig, seed: u64) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames = cfg.frames.max(1);
    let velocity = Normal::new(0.0, cfg.speed.max(0.0)).expect("finite speed");
    let jitter = Normal::new(0.0, cfg.jitter.max(0.0)).expect("finite jitter");
    let dim = cfg.dim.max(1);
    // (frame, order, position, beta, truth)
    let mut raw: Vec<(u32, usize, Vec<f64>, f64, Option<usize>)> = Vec::new();

    let mut t = 0;
    while t < cfg.targets {
        let len = rng.random_range(cfg.min_length.max(1)..=cfg.max_length.max(cfg.min_length.max(1)));
        let len = len.min(frames);
        let start = rng.random_range(0..=frames - len);
        let group = if cfg.crossing { 2.min(cfg.targets - t) } else { 1 };
        // crossing pairs share the position at the middle of their life
        let meet: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..cfg.arena)).collect();
        let mid = start + len / 2;
        for g in 0..group {
            let mut v: Vec<f64> = (0..dim).map(|_| velocity.sample(&mut rng)).collect();
            if cfg.crossing && g == 1 {
                // head the other way, rotated a quarter turn in the first plane
                if dim >= 2 {
                    let (a, b) = (v[0], v[1]);
                    v[0] = -b;
                    v[1] = a;
                } else {
                    v[0] = -v[0];
                }
            }
            let anchor: Vec<f64> = if cfg.crossing {
                meet.clone()
            } else {
                (0..dim).map(|_| rng.random_range(0.0..cfg.arena)).collect()
            };
            let anchor_frame = if cfg.crossing { mid } else { start };
            for f in start..start + len {
                if rng.random_bool(cfg.miss_rate.clamp(0.0, 1.0)) {
                    continue;
                }
                let dt = f as f64 - anchor_frame as f64;
                let pos = anchor
                    .iter()
                    .zip(&v)
                    .map(|(&p, &vel)| p + vel * dt + jitter.sample(&mut rng))
                    .collect();
                let conf = rng.random_range(0.6..1.0);
                raw.push((f, raw.len(), pos, 1.0 - conf, Some(t + g)));
            }
        }
        t += group;
    }
    if cfg.clutter > 0.0 {
        let count = Poisson::new(cfg.clutter).expect("positive clutter rate");
        for f in 0..frames {
            let c: f64 = count.sample(&mut rng);
            for _ in 0..c as usize {
                let pos = (0..dim).map(|_| rng.random_range(0.0..cfg.arena)).collect();
                let conf = rng.random_range(0.05..0.5);
                raw.push((f, raw.len(), pos, 1.0 - conf, None));
            }
        }
    }
    raw.sort_by_key(|r| (r.0, r.1));
    let mut detections = Vec::with_capacity(raw.len());
    let mut truth = Vec::with_capacity(raw.len());
    for (i, (frame, _, pos, beta, gt)) in raw.into_iter().enumerate() {
        detections.push(Detection::new(i as u64, frame, pos, beta));
        truth.push(gt);
    }
    Scene { detections, truth }
}
