use crate::trajectory::TrajectorySet;

/// Identity switches against ground truth: for every target, walk its
/// detections in frame order and count changes of the assigned track
/// between consecutive tracked detections. Unassigned detections are
/// skipped, so a gap alone does not count.
pub fn id_switches(set: &TrajectorySet, truth: &[Option<usize>], frames: &[u32]) -> usize {
    let labels = set.labels(truth.len());
    let targets = truth.iter().flatten().max().map_or(0, |&t| t + 1);
    let mut per_target: Vec<Vec<usize>> = vec![Vec::new(); targets];
    for (d, t) in truth.iter().enumerate() {
        if let Some(t) = t {
            per_target[*t].push(d);
        }
    }
    let mut switches = 0;
    for dets in &mut per_target {
        dets.sort_by_key(|&d| (frames[d], d));
        let mut last = None;
        for &d in dets.iter() {
            if let Some(track) = labels[d] {
                if last.is_some_and(|l| l != track) {
                    switches += 1;
                }
                last = Some(track);
            }
        }
    }
    switches
}
