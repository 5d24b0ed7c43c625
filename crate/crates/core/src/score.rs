//! Clustering cost and the per-cluster quantities the greedy loops use.
//!
//! The score is a cost: lower is better.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cluster::Cluster;
use crate::error::{Error, Result};
use crate::trajectory::{SubtrajectoryRef, TrajectoryStore};

/// Weights of the cluster count, the Fréchet term and the uncovered fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ScoringVector {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let ok = c1.is_finite() && c2.is_finite() && c3.is_finite() && c1 > 0.0 && c2 >= 0.0 && c3 >= 0.0;
        if ok {
            Ok(Self { c1, c2, c3 })
        } else {
            Err(Error::InvalidScoringVector { c1, c2, c3 })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    KCentre,
    KMeans,
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Objective::KCentre => "k-centre",
            Objective::KMeans => "k-means",
        })
    }
}

/// Accepted clusters, in root-store coordinates, with their coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    clusters: Vec<Cluster>,
    // start -> end of every covered member interval
    covered: BTreeMap<usize, usize>,
    covered_count: usize,
    total_vertices: usize,
}

impl Clustering {
    pub fn new(total_vertices: usize) -> Self {
        Self { clusters: Vec::new(), covered: BTreeMap::new(), covered_count: 0, total_vertices }
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn total_vertices(&self) -> usize {
        self.total_vertices
    }

    /// Incrementally maintained number of covered vertices.
    pub fn covered_count(&self) -> usize {
        self.covered_count
    }

    pub fn uncovered_count(&self) -> usize {
        self.total_vertices - self.covered_count
    }

    /// Covered intervals in ascending order.
    pub fn covered_intervals(&self) -> Vec<SubtrajectoryRef> {
        self.covered.iter().map(|(&a, &b)| SubtrajectoryRef::new_unchecked(a, b)).collect()
    }

    /// Covered count recomputed from the clusters alone.
    pub fn recount_covered(&self) -> usize {
        let mut marks = vec![false; self.total_vertices + 1];
        for c in &self.clusters {
            for m in &c.members {
                for v in &mut marks[m.start()..=m.end()] {
                    *v = true;
                }
            }
        }
        marks.iter().filter(|&&v| v).count()
    }

    fn overlaps(&self, s: &SubtrajectoryRef) -> bool {
        let before = self.covered.range(..=s.end()).next_back();
        before.is_some_and(|(_, &e)| e >= s.start())
    }

    /// Adds a root-coordinate cluster whose members must be disjoint from
    /// everything covered so far and from each other.
    pub fn push(&mut self, cluster: Cluster) -> Result<()> {
        for (k, m) in cluster.members.iter().enumerate() {
            if m.end() > self.total_vertices || m.start() == 0 {
                return Err(Error::OutOfRange { a: m.start(), b: m.end(), n: self.total_vertices });
            }
            if let Some(prev) = cluster.members[..k].iter().find(|p| p.intersects(m)) {
                return Err(Error::Overlapping { first: *prev, second: *m });
            }
            if self.overlaps(m) {
                let (&a, &b) = self.covered.range(..=m.end()).next_back().unwrap();
                return Err(Error::Overlapping { first: SubtrajectoryRef::new_unchecked(a, b), second: *m });
            }
        }
        for m in &cluster.members {
            self.covered.insert(m.start(), m.end());
            self.covered_count += m.vertex_count();
        }
        self.clusters.push(cluster);
        Ok(())
    }

    /// Fills missing member distances against the root store.
    pub fn ensure_distances(&mut self, root: &TrajectoryStore) {
        for c in &mut self.clusters {
            c.ensure_distances(root);
        }
    }
}

/// The three cost terms and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub cluster_term: f64,
    pub frechet_term: f64,
    pub uncovered_term: f64,
    pub total: f64,
}

impl ScoreBreakdown {
    fn from_terms(cluster_term: f64, frechet_term: f64, uncovered_term: f64) -> Self {
        Self { cluster_term, frechet_term, uncovered_term, total: cluster_term + frechet_term + uncovered_term }
    }
}

fn distances(c: &Cluster) -> &[f64] {
    c.member_distances.as_deref().expect("member distances must be computed before scoring")
}

/// Cost of a clustering under its actual member distances: the maximum for
/// k-centre, the sum for k-means.
///
/// # Panics
/// If a cluster lacks member distances.
pub fn score(clustering: &Clustering, v: &ScoringVector, objective: Objective) -> Result<ScoreBreakdown> {
    let x = clustering.total_vertices();
    if x == 0 {
        return Err(Error::UndefinedScore);
    }
    let all = clustering.clusters().iter().flat_map(|c| distances(c).iter().copied());
    let fr = match objective {
        Objective::KCentre => all.fold(0.0, f64::max),
        Objective::KMeans => all.sum(),
    };
    Ok(ScoreBreakdown::from_terms(
        v.c1 * clustering.len() as f64,
        v.c2 * fr,
        v.c3 * clustering.uncovered_count() as f64 / x as f64,
    ))
}

/// Cost of a k-centre clustering at radius level `delta`: the Fréchet term
/// is `c2 * delta` once any cluster exists.
pub fn level_score(clusters: usize, uncovered: usize, total_vertices: usize, v: &ScoringVector, delta: f64) -> Result<ScoreBreakdown> {
    if total_vertices == 0 {
        return Err(Error::UndefinedScore);
    }
    let fr = if clusters > 0 { v.c2 * delta } else { 0.0 };
    Ok(ScoreBreakdown::from_terms(
        v.c1 * clusters as f64,
        fr,
        v.c3 * uncovered as f64 / total_vertices as f64,
    ))
}

/// Change of the k-centre level score when adding `cluster` to a non-empty
/// clustering: `c1 - c3 * coverage / |X|`.
pub fn kcentre_contribution(cluster: &Cluster, v: &ScoringVector, total_vertices: usize) -> f64 {
    v.c1 - v.c3 * cluster.coverage() as f64 / total_vertices as f64
}

/// Change of the k-means score when adding `cluster`.
///
/// # Panics
/// If member distances are missing.
pub fn kmeans_contribution(cluster: &Cluster, v: &ScoringVector, total_vertices: usize) -> f64 {
    let x = total_vertices as f64;
    v.c1 + cluster
        .members
        .iter()
        .zip(distances(cluster))
        .map(|(m, d)| v.c2 * d - v.c3 * m.vertex_count() as f64 / x)
        .sum::<f64>()
}

/// Coverage gain over cost increase; zero for a cluster without members.
///
/// # Panics
/// If member distances are missing.
pub fn evaluation(cluster: &Cluster, v: &ScoringVector, total_vertices: usize) -> f64 {
    if cluster.members.is_empty() {
        return 0.0;
    }
    let gain = v.c3 * cluster.coverage() as f64 / total_vertices as f64;
    let cost = v.c1 + v.c2 * distances(cluster).iter().sum::<f64>();
    gain / cost
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: usize, b: usize) -> SubtrajectoryRef {
        SubtrajectoryRef::new_unchecked(a, b)
    }

    fn cluster(members: &[(usize, usize)], dist: &[f64]) -> Cluster {
        let mut c = Cluster::new(iv(members[0].0, members[0].1), members.iter().map(|&(a, b)| iv(a, b)).collect(), 1.0);
        c.member_distances = Some(dist.to_vec());
        c
    }

    #[test]
    fn vector_validation() {
        assert!(ScoringVector::new(1.0, 0.0, 0.0).is_ok());
        assert!(ScoringVector::new(0.0, 1.0, 1.0).is_err());
        assert!(ScoringVector::new(1.0, -1.0, 1.0).is_err());
        assert!(ScoringVector::new(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn empty_clustering_costs_c3() {
        let v = ScoringVector::new(1.0, 3e-5, 128.0).unwrap();
        let s = score(&Clustering::new(2840), &v, Objective::KMeans).unwrap();
        assert_eq!(s.total, 128.0);
        assert_eq!(format!("{:.2}", s.total), "128.00");
        assert!(matches!(score(&Clustering::new(0), &v, Objective::KCentre), Err(Error::UndefinedScore)));
    }

    #[test]
    fn full_coverage_without_distance_weight_costs_c1() {
        let v = ScoringVector::new(2.5, 0.0, 7.0).unwrap();
        let mut c = Clustering::new(10);
        c.push(cluster(&[(1, 10)], &[0.0])).unwrap();
        assert_eq!(score(&c, &v, Objective::KCentre).unwrap().total, 2.5);
    }

    #[test]
    fn two_cluster_hand_computation() {
        let v = ScoringVector::new(1.0, 0.5, 10.0).unwrap();
        let mut c = Clustering::new(20);
        c.push(cluster(&[(1, 3), (5, 8)], &[0.0, 2.0])).unwrap();
        c.push(cluster(&[(10, 10), (12, 15)], &[1.0, 3.0])).unwrap();
        // covered 3 + 4 + 1 + 4 = 12 of 20
        let kc = score(&c, &v, Objective::KCentre).unwrap();
        assert_eq!(kc.cluster_term, 2.0);
        assert_eq!(kc.frechet_term, 1.5);
        assert_eq!(kc.uncovered_term, 4.0);
        assert_eq!(kc.total, 7.5);
        let km = score(&c, &v, Objective::KMeans).unwrap();
        assert_eq!(km.frechet_term, 3.0);
        assert_eq!(km.total, 9.0);
        assert_eq!(c.covered_count(), 12);
        assert_eq!(c.recount_covered(), 12);
    }

    #[test]
    fn overlapping_members_are_refused() {
        let mut c = Clustering::new(20);
        c.push(cluster(&[(4, 8)], &[0.0])).unwrap();
        assert!(c.push(cluster(&[(8, 9)], &[0.0])).is_err());
        assert!(c.push(cluster(&[(1, 4)], &[0.0])).is_err());
        assert!(c.push(cluster(&[(1, 2), (2, 3)], &[0.0, 0.0])).is_err());
        assert!(c.push(cluster(&[(1, 3), (9, 9)], &[0.0, 0.0])).is_ok());
        assert_eq!(c.covered_count(), 9);
    }

    #[test]
    fn contributions() {
        let v = ScoringVector::new(1.0, 0.0, 1.0).unwrap();
        let none = cluster(&[(1, 1)], &[0.0]);
        assert_eq!(kcentre_contribution(&Cluster::new(iv(1, 1), vec![], 1.0), &v, 10), 1.0);
        assert_eq!(kcentre_contribution(&none, &ScoringVector::new(1.0, 0.0, 1.0).unwrap(), 1), 0.0);
        let v0 = ScoringVector::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(kmeans_contribution(&none, &v0, 10), 1.0);
        let full = cluster(&[(1, 10)], &[0.0]);
        let v2 = ScoringVector::new(1.0, 0.0, 2.0).unwrap();
        assert_eq!(kmeans_contribution(&full, &v2, 10), -1.0);
    }

    #[test]
    fn evaluation_prefers_smaller_distance_sums() {
        let v = ScoringVector::new(1.0, 1.0, 4.0).unwrap();
        let a = cluster(&[(1, 2), (5, 6)], &[1.0, 1.0]);
        let b = cluster(&[(1, 2), (5, 6)], &[0.5, 0.5]);
        assert!(evaluation(&b, &v, 10) > evaluation(&a, &v, 10));
        assert_eq!(evaluation(&Cluster::new(iv(1, 1), vec![], 1.0), &v, 10), 0.0);
        let v0 = ScoringVector::new(2.0, 0.0, 4.0).unwrap();
        assert_eq!(evaluation(&a, &v0, 10), 4.0 * 4.0 / (10.0 * 2.0));
    }
}
