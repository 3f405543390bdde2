mod common;

use std::fs;

use circtrack::pipeline::{
    generate_scene, id_switches, parse_detections, run_tracking, track_detections,
    track_detections_with, InputFormat, SceneConfig, SolverKind, TrackConfig,
};
use circtrack::{PipelineError, TrajectorySet};

/// Jumps over linkages, counted straight from the detection frames.
fn hand_count(set: &TrajectorySet, frames: &[u32]) -> Option<f64> {
    let (mut links, mut jumps) = (0u32, 0u32);
    for t in &set.trajectories {
        for w in t.detections.windows(2) {
            links += 1;
            if frames[w[1]] > frames[w[0]] + 1 {
                jumps += 1;
            }
        }
    }
    (links > 0).then(|| jumps as f64 / links as f64)
}

#[test]
fn one_iteration_on_the_two_detection_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.csv");
    let output = dir.path().join("tracks.csv");
    fs::write(&input, "1,-1,10,20,4,6,0.9\n2,-1,11,20,4,6,0.9\n").unwrap();
    let config = TrackConfig {
        input: Some(input),
        output: Some(output.clone()),
        ..TrackConfig::default()
    };
    let (set, report) = run_tracking(&config).unwrap();
    assert_eq!(set.len(), 1);
    assert_eq!(set.trajectories[0].detections, vec![0, 1]);
    assert_eq!(report.iterations.len(), 1);
    let csv = fs::read_to_string(output).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows, vec!["1,1,0,12,23", "1,2,1,13,23"]);
}

#[test]
fn zero_iterations_is_a_config_error() {
    let dets = parse_detections("1,0,0\n".as_bytes(), InputFormat::PointsCsv, "x").unwrap();
    let config = TrackConfig {
        iterations: 0,
        ..TrackConfig::default()
    };
    let err = track_detections(&dets, &config).unwrap_err();
    assert!(matches!(err, PipelineError::Config(_)));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn solvers_give_the_same_tracking_cost() {
    let scene = generate_scene(&SceneConfig::crossing(3), 11);
    let mut costs = Vec::new();
    for solver in SolverKind::ALL {
        let config = TrackConfig {
            solver,
            iterations: 3,
            ..TrackConfig::default()
        };
        let (_, report) = track_detections(&scene.detections, &config).unwrap();
        costs.push(report.iterations.iter().map(|r| r.cost).collect::<Vec<_>>());
    }
    assert_eq!(costs[0], costs[1]);
    assert_eq!(costs[0], costs[2]);
}

#[test]
fn f32_and_f64_pipelines_both_run() {
    let scene = generate_scene(&SceneConfig::crossing(2), 5);
    let dets32: Vec<circtrack::DetectionF32> = scene
        .detections
        .iter()
        .map(|d| circtrack::Detection::new(d.id, d.frame, d.position.iter().map(|&x| x as f32).collect(), d.beta as f32))
        .collect();
    let config = TrackConfig {
        iterations: 2,
        ..TrackConfig::default()
    };
    let (a, _) = track_detections(&scene.detections, &config).unwrap();
    let (b, _) = track_detections(&dets32, &config).unwrap();
    assert!(!a.is_empty() && !b.is_empty());
}

#[test]
fn refinement_on_crossing_targets() {
    for seed in 0..4 {
        let scene = generate_scene(&SceneConfig::crossing(8), seed);
        let frames: Vec<u32> = scene.detections.iter().map(|d| d.frame).collect();
        let config = TrackConfig {
            iterations: 5,
            ..TrackConfig::default()
        };
        let mut switches = Vec::new();
        let mut expected_p_jump = vec![None];
        let (_, report) = track_detections_with(&scene.detections, &config, |_, set| {
            switches.push(id_switches(set, &scene.truth, &frames));
            expected_p_jump.push(hand_count(set, &frames));
        })
        .unwrap();
        assert!(switches[4] <= switches[0], "seed {seed}: {switches:?}");
        for (k, it) in report.iterations.iter().enumerate() {
            assert_eq!(it.p_jump, expected_p_jump[k], "seed {seed}, iteration {}", k + 1);
        }
    }
}
