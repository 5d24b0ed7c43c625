//! Trajectories, their concatenation into a single indexed store, and
//! boundary-free subtrajectory intervals.
//!
//! All global vertex indices are 1-based: a store with `n` vertices uses
//! indices `1..=n`. Edge `(i, i + 1)` is a *boundary edge* when vertex `i`
//! is the last vertex of one input piece and `i + 1` the first of the next.
//! A subtrajectory never contains a boundary edge.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex in the plane, in dataset units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// An ordered, non-empty sequence of vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    vertices: Vec<Point>,
}

impl Trajectory {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if let Some(p) = vertices.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::NonFinite { x: p.x, y: p.y });
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Where a store vertex came from: input trajectory id (0-based, in input
/// order) and position inside that trajectory (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Origin {
    pub trajectory: usize,
    pub local: usize,
}

/// A boundary-free vertex interval `[a, b]` of a [`TrajectoryStore`],
/// 1-based and inclusive on both ends.
///
/// Its *length* is `b - a` (edge count); it has `b - a + 1` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubtrajectoryRef {
    a: usize,
    b: usize,
}

impl SubtrajectoryRef {
    /// Interval `[a, b]` if `1 <= a <= b`. Use
    /// [`TrajectoryStore::subtrajectory`] to also check boundaries.
    pub fn new(a: usize, b: usize) -> Option<Self> {
        (1 <= a && a <= b).then_some(Self { a, b })
    }

    /// Builds an interval without checking it against a store. Callers must
    /// guarantee `1 <= a <= b` and that no boundary edge lies inside.
    pub(crate) fn new_unchecked(a: usize, b: usize) -> Self {
        debug_assert!(1 <= a && a <= b, "bad interval [{a}, {b}]");
        Self { a, b }
    }

    pub fn start(&self) -> usize {
        self.a
    }

    pub fn end(&self) -> usize {
        self.b
    }

    /// Edge count `b - a`.
    pub fn len(&self) -> usize {
        self.b - self.a
    }

    /// Vertex count `b - a + 1`.
    pub fn vertex_count(&self) -> usize {
        self.b - self.a + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.a <= i && i <= self.b
    }

    pub fn intersects(&self, other: &SubtrajectoryRef) -> bool {
        self.a <= other.b && other.a <= self.b
    }

    pub fn is_within(&self, outer: &SubtrajectoryRef) -> bool {
        outer.a <= self.a && self.b <= outer.b
    }
}

impl std::fmt::Display for SubtrajectoryRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// All input trajectories concatenated into one vertex sequence.
///
/// Stores produced by [`TrajectoryStore::remove_intervals`] keep a link to
/// the *root* store they were cut from, so intervals found on a residual
/// store can be translated back with [`TrajectoryStore::to_root`].
#[derive(Debug, Clone)]
pub struct TrajectoryStore {
    vertices: Vec<Point>,
    // boundary_after[i - 1] is true iff edge (i, i + 1) is a boundary edge.
    boundary_after: Vec<bool>,
    // segment_end[i - 1] is the last index of the boundary-free piece holding i.
    segment_end: Vec<usize>,
    segment_start: Vec<usize>,
    origin: Vec<Origin>,
    // First root index of each input trajectory, shared with residual stores.
    offsets: Arc<Vec<usize>>,
}

impl TrajectoryStore {
    /// Concatenates trajectories in order; one boundary edge per junction.
    pub fn concatenate(trajectories: &[Trajectory]) -> Result<Self> {
        if trajectories.is_empty() {
            return Err(Error::EmptyStore);
        }
        let n: usize = trajectories.iter().map(Trajectory::len).sum();
        let mut vertices = Vec::with_capacity(n);
        let mut origin = Vec::with_capacity(n);
        let mut boundary_after = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(trajectories.len());
        for (t, traj) in trajectories.iter().enumerate() {
            if traj.is_empty() {
                return Err(Error::EmptyTrajectory);
            }
            offsets.push(vertices.len() + 1);
            for (local, p) in traj.vertices().iter().enumerate() {
                vertices.push(*p);
                origin.push(Origin { trajectory: t, local });
                boundary_after.push(false);
            }
            if t + 1 < trajectories.len() {
                *boundary_after.last_mut().unwrap() = true;
            }
        }
        Ok(Self::assemble(vertices, boundary_after, origin, Arc::new(offsets)))
    }

    fn assemble(
        vertices: Vec<Point>,
        boundary_after: Vec<bool>,
        origin: Vec<Origin>,
        offsets: Arc<Vec<usize>>,
    ) -> Self {
        let n = vertices.len();
        let mut segment_start = vec![0; n];
        let mut segment_end = vec![0; n];
        let mut start = 1;
        for i in 1..=n {
            segment_start[i - 1] = start;
            if boundary_after[i - 1] || i == n {
                for e in segment_end.iter_mut().take(i).skip(start - 1) {
                    *e = i;
                }
                start = i + 1;
            }
        }
        Self { vertices, boundary_after, segment_end, segment_start, origin, offsets }
    }

    /// Number of vertices `n`.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex `i` (1-based).
    #[inline]
    pub fn point(&self, i: usize) -> Point {
        self.vertices[i - 1]
    }

    pub fn points(&self) -> &[Point] {
        &self.vertices
    }

    /// Points of a subtrajectory, in order.
    pub fn slice(&self, s: &SubtrajectoryRef) -> &[Point] {
        &self.vertices[s.a - 1..s.b]
    }

    /// True iff edge `(i, i + 1)` is a boundary edge.
    #[inline]
    pub fn is_boundary(&self, i: usize) -> bool {
        i >= 1 && i <= self.len() && self.boundary_after[i - 1]
    }

    /// Sorted indices `i` whose edge `(i, i + 1)` is a boundary edge.
    pub fn boundaries(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&i| self.boundary_after[i - 1]).collect()
    }

    pub fn origin(&self, i: usize) -> Origin {
        self.origin[i - 1]
    }

    /// Global index of vertex `i` in the root store this one was cut from.
    pub fn root_index(&self, i: usize) -> usize {
        let o = self.origin[i - 1];
        self.offsets[o.trajectory] + o.local
    }

    /// Number of input trajectories of the root store.
    pub fn root_trajectory_count(&self) -> usize {
        self.offsets.len()
    }

    /// Last index of the boundary-free piece that contains `i`.
    #[inline]
    pub fn segment_end(&self, i: usize) -> usize {
        self.segment_end[i - 1]
    }

    #[inline]
    pub fn segment_start(&self, i: usize) -> usize {
        self.segment_start[i - 1]
    }

    /// Maximal boundary-free pieces, in order.
    pub fn segments(&self) -> Vec<SubtrajectoryRef> {
        let mut out = Vec::new();
        let mut i = 1;
        while i <= self.len() {
            let e = self.segment_end(i);
            out.push(SubtrajectoryRef::new_unchecked(i, e));
            i = e + 1;
        }
        out
    }

    /// Validated subtrajectory `[a, b]`.
    pub fn subtrajectory(&self, a: usize, b: usize) -> Result<SubtrajectoryRef> {
        let n = self.len();
        if a < 1 || a > b || b > n {
            return Err(Error::OutOfRange { a, b, n });
        }
        if self.segment_end(a) < b {
            return Err(Error::BoundaryViolation { a, b, at: self.segment_end(a) });
        }
        Ok(SubtrajectoryRef::new_unchecked(a, b))
    }

    /// Translates an interval of this store into root-store indices. The
    /// result is contiguous in the root because every cut is a boundary.
    pub fn to_root(&self, s: &SubtrajectoryRef) -> SubtrajectoryRef {
        SubtrajectoryRef::new_unchecked(self.root_index(s.a), self.root_index(s.b))
    }

    /// Deletes every vertex covered by `intervals`; each surviving run becomes
    /// its own boundary-delimited piece. Survivors are re-indexed densely and
    /// keep their origin.
    pub fn remove_intervals(&self, intervals: &[SubtrajectoryRef]) -> Result<Self> {
        let mut sorted: Vec<SubtrajectoryRef> = intervals.to_vec();
        sorted.sort();
        for s in &sorted {
            self.subtrajectory(s.a, s.b)?;
        }
        for w in sorted.windows(2) {
            if w[0].intersects(&w[1]) {
                return Err(Error::Overlapping { first: w[0], second: w[1] });
            }
        }
        let n = self.len();
        let mut removed = vec![false; n + 1];
        for s in &sorted {
            for r in &mut removed[s.a..=s.b] {
                *r = true;
            }
        }
        let mut vertices = Vec::with_capacity(n);
        let mut origin = Vec::with_capacity(n);
        let mut boundary_after: Vec<bool> = Vec::with_capacity(n);
        let mut last_kept: Option<usize> = None;
        for i in 1..=n {
            if removed[i] {
                continue;
            }
            if let Some(prev) = last_kept {
                // Cut whenever survivors were not adjacent or were split already.
                let joined = prev + 1 == i && !self.boundary_after[prev - 1];
                *boundary_after.last_mut().unwrap() = !joined;
            }
            vertices.push(self.point(i));
            origin.push(self.origin(i));
            boundary_after.push(false);
            last_kept = Some(i);
        }
        Ok(Self::assemble(vertices, boundary_after, origin, Arc::clone(&self.offsets)))
    }

    /// The same vertices in reverse order, with mirrored boundaries. Vertex
    /// `i` of `self` becomes vertex `n + 1 - i`.
    pub fn reversed(&self) -> Self {
        let n = self.len();
        let vertices: Vec<Point> = self.vertices.iter().rev().copied().collect();
        let origin: Vec<Origin> = self.origin.iter().rev().copied().collect();
        let mut boundary_after = vec![false; n];
        for i in 1..n {
            // edge (i, i+1) of self becomes edge (n-i, n+1-i)
            if self.boundary_after[i - 1] {
                boundary_after[n - i - 1] = true;
            }
        }
        Self::assemble(vertices, boundary_after, origin, Arc::clone(&self.offsets))
    }

    /// Maps an interval under the reversal bijection `i -> n + 1 - i`.
    pub fn mirror(&self, s: &SubtrajectoryRef) -> SubtrajectoryRef {
        let n = self.len();
        SubtrajectoryRef::new_unchecked(n + 1 - s.b, n + 1 - s.a)
    }

    /// Length of the bounding-box diagonal of all vertices.
    pub fn diameter_bound(&self) -> f64 {
        let mut it = self.vertices.iter();
        let Some(first) = it.next() else { return 0.0 };
        let (mut lo, mut hi) = (*first, *first);
        for p in it {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        lo.dist(&hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(pts: &[(f64, f64)]) -> Trajectory {
        Trajectory::new(pts.iter().map(|&p| p.into()).collect()).unwrap()
    }

    fn line(n: usize) -> Trajectory {
        traj(&(0..n).map(|i| (i as f64, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn concatenate_records_junctions() {
        let s = TrajectoryStore::concatenate(&[line(3), line(2)]).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.boundaries(), vec![3]);
        assert_eq!(s.origin(4), Origin { trajectory: 1, local: 0 });
        assert_eq!(s.root_index(4), 4);
        assert_eq!(s.segments().len(), 2);
    }

    #[test]
    fn single_trajectory_has_no_boundary() {
        let s = TrajectoryStore::concatenate(&[line(4)]).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.boundaries().is_empty());
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(matches!(TrajectoryStore::concatenate(&[]), Err(Error::EmptyStore)));
        assert!(matches!(Trajectory::new(vec![]), Err(Error::EmptyTrajectory)));
        assert!(Trajectory::new(vec![Point::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn subtrajectory_checks_boundaries_and_range() {
        let s = TrajectoryStore::concatenate(&[line(3), line(2)]).unwrap();
        assert!(s.subtrajectory(1, 3).is_ok());
        assert!(matches!(s.subtrajectory(3, 4), Err(Error::BoundaryViolation { .. })));
        assert!(s.subtrajectory(2, 2).is_ok());
        assert!(matches!(s.subtrajectory(0, 2), Err(Error::OutOfRange { .. })));
        assert!(matches!(s.subtrajectory(4, 6), Err(Error::OutOfRange { .. })));
        assert!(matches!(s.subtrajectory(3, 2), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn remove_single_interval_splits() {
        let s = TrajectoryStore::concatenate(&[line(10)]).unwrap();
        let r = s.remove_intervals(&[s.subtrajectory(4, 6).unwrap()]).unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r.boundaries(), vec![3]);
        assert_eq!(r.root_index(4), 7);
    }

    #[test]
    fn remove_everything() {
        let s = TrajectoryStore::concatenate(&[line(10)]).unwrap();
        let r = s.remove_intervals(&[s.subtrajectory(1, 10).unwrap()]).unwrap();
        assert!(r.is_empty());
        assert!(r.segments().is_empty());
    }

    #[test]
    fn remove_two_intervals_matches_list_surgery() {
        let s = TrajectoryStore::concatenate(&[line(10)]).unwrap();
        let cut = [s.subtrajectory(2, 3).unwrap(), s.subtrajectory(7, 8).unwrap()];
        let r = s.remove_intervals(&cut).unwrap();
        // direct surgery on the index list
        let expected: Vec<usize> = (1..=10).filter(|i| !(2..=3).contains(i) && !(7..=8).contains(i)).collect();
        assert_eq!(r.len(), 6);
        let got: Vec<usize> = (1..=r.len()).map(|i| r.root_index(i)).collect();
        assert_eq!(got, expected);
        for (k, &root) in expected.iter().enumerate() {
            assert_eq!(r.point(k + 1), s.point(root));
        }
        assert_eq!(r.boundaries(), vec![1, 4]);
    }

    #[test]
    fn overlapping_removal_is_rejected() {
        let s = TrajectoryStore::concatenate(&[line(10)]).unwrap();
        let cut = [s.subtrajectory(2, 5).unwrap(), s.subtrajectory(5, 8).unwrap()];
        assert!(matches!(s.remove_intervals(&cut), Err(Error::Overlapping { .. })));
    }

    #[test]
    fn residual_of_residual_maps_to_root() {
        let s = TrajectoryStore::concatenate(&[line(4), line(6)]).unwrap();
        let r1 = s.remove_intervals(&[s.subtrajectory(6, 7).unwrap()]).unwrap();
        let r2 = r1.remove_intervals(&[r1.subtrajectory(1, 2).unwrap()]).unwrap();
        let roots: Vec<usize> = (1..=r2.len()).map(|i| r2.root_index(i)).collect();
        assert_eq!(roots, vec![3, 4, 5, 8, 9, 10]);
        assert_eq!(r2.boundaries(), vec![2, 3]);
        let seg = r2.subtrajectory(4, 6).unwrap();
        assert_eq!(r2.to_root(&seg), s.subtrajectory(8, 10).unwrap());
    }

    #[test]
    fn reversal_mirrors_boundaries() {
        let s = TrajectoryStore::concatenate(&[line(3), line(2)]).unwrap();
        let r = s.reversed();
        assert_eq!(r.boundaries(), vec![2]);
        assert_eq!(r.point(1), s.point(5));
        let sub = s.subtrajectory(1, 3).unwrap();
        assert_eq!(s.mirror(&sub), r.subtrajectory(3, 5).unwrap());
    }
}
