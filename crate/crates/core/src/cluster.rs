use serde::{Deserialize, Serialize};

use crate::frechet::discrete_frechet;
use crate::trajectory::{SubtrajectoryRef, TrajectoryStore};

/// A centre subtrajectory with pairwise-disjoint members, each within
/// discrete Fréchet distance `delta` of the centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub centre: SubtrajectoryRef,
    /// Ascending by start index.
    pub members: Vec<SubtrajectoryRef>,
    pub delta: f64,
    /// `D_F(centre, member)` per member, in member order, once computed.
    pub member_distances: Option<Vec<f64>>,
}

impl Cluster {
    pub fn new(centre: SubtrajectoryRef, mut members: Vec<SubtrajectoryRef>, delta: f64) -> Self {
        members.sort_unstable();
        Self { centre, members, delta, member_distances: None }
    }

    /// `|P|` as a vertex count.
    pub fn centre_vertices(&self) -> usize {
        self.centre.vertex_count()
    }

    pub fn cardinality(&self) -> usize {
        self.members.len()
    }

    /// Number of vertices covered by the members.
    pub fn coverage(&self) -> usize {
        self.members.iter().map(SubtrajectoryRef::vertex_count).sum()
    }

    /// Same cluster with every interval translated to root-store indices.
    pub fn to_root(&self, store: &TrajectoryStore) -> Cluster {
        Cluster {
            centre: store.to_root(&self.centre),
            members: self.members.iter().map(|m| store.to_root(m)).collect(),
            delta: self.delta,
            member_distances: self.member_distances.clone(),
        }
    }

    /// Fills `member_distances` by dynamic programming, if not done yet.
    pub fn ensure_distances(&mut self, store: &TrajectoryStore) -> &[f64] {
        if self.member_distances.is_none() {
            let centre = store.slice(&self.centre);
            let d = self
                .members
                .iter()
                .map(|m| discrete_frechet(centre, store.slice(m)).expect("non-empty intervals"))
                .collect();
            self.member_distances = Some(d);
        }
        self.member_distances.as_deref().unwrap()
    }

    pub fn max_distance(&self) -> Option<f64> {
        self.member_distances.as_ref()?.iter().copied().reduce(f64::max)
    }

    pub fn distance_sum(&self) -> Option<f64> {
        self.member_distances.as_ref().map(|d| d.iter().sum())
    }

    /// True iff no two members share a vertex.
    pub fn members_disjoint(&self) -> bool {
        self.members.windows(2).all(|w| w[0].end() < w[1].start())
    }
}
