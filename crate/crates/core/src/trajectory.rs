use std::collections::HashSet;

/// One selected trajectory: detection indices in increasing frame order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub detections: Vec<usize>,
    /// Sum of the scaled integer arc costs along the cycle.
    pub cost: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrajectorySet {
    pub trajectories: Vec<Trajectory>,
}

impl TrajectorySet {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn total_cost(&self) -> i64 {
        self.trajectories.iter().map(|t| t.cost).sum()
    }

    /// Per-detection trajectory label, `None` for unselected detections.
    pub fn labels(&self, detection_count: usize) -> Vec<Option<usize>> {
        let mut labels = vec![None; detection_count];
        for (k, t) in self.trajectories.iter().enumerate() {
            for &d in &t.detections {
                labels[d] = Some(k);
            }
        }
        labels
    }

    /// Consecutive detection pairs `(i, j)` over all trajectories.
    pub fn linkages(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.trajectories
            .iter()
            .flat_map(|t| t.detections.windows(2).map(|w| (w[0], w[1])))
    }

    /// Checks disjointness and strictly increasing frames.
    pub fn check(&self, frames: &[u32]) -> Result<(), String> {
        let mut seen = HashSet::new();
        for (k, t) in self.trajectories.iter().enumerate() {
            for &d in &t.detections {
                if d >= frames.len() {
                    return Err(format!("trajectory {k} references unknown detection {d}"));
                }
                if !seen.insert(d) {
                    return Err(format!("detection {d} appears in two trajectories"));
                }
            }
            for w in t.detections.windows(2) {
                if frames[w[0]] >= frames[w[1]] {
                    return Err(format!(
                        "trajectory {k} is not strictly increasing in time at {} -> {}",
                        w[0], w[1]
                    ));
                }
            }
        }
        Ok(())
    }
}
