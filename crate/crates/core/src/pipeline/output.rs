use std::io::Write;

use crate::graph::Detection;
use crate::scalar::Real;
use crate::trajectory::TrajectorySet;

/// Trajectories ordered by first frame, then first detection id.
pub fn ordered_tracks<T: Real>(set: &TrajectorySet, detections: &[Detection<T>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by_key(|&k| {
        let first = set.trajectories[k].detections.first().map(|&d| &detections[d]);
        (first.map(|d| d.frame), first.map(|d| d.id), k)
    });
    order
}

/// Writes `track_id,frame,detection_id,x,y[,z]`, one row per footprint.
/// Track ids are 1-based in the order of [`ordered_tracks`].
pub fn write_trajectories_csv<T: Real, W: Write>(
    out: W,
    set: &TrajectorySet,
    detections: &[Detection<T>],
) -> csv::Result<()> {
    let dim = detections.first().map_or(2, |d| d.position.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["track_id", "frame", "detection_id"];
    header.extend(["x", "y", "z"].iter().take(dim.min(3)));
    w.write_record(&header)?;
    for (rank, k) in ordered_tracks(set, detections).into_iter().enumerate() {
        for &d in &set.trajectories[k].detections {
            let det = &detections[d];
            let mut row = vec![
                (rank + 1).to_string(),
                det.frame.to_string(),
                det.id.to_string(),
            ];
            row.extend(det.position.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}
