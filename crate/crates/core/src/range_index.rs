//! Output-sensitive row generation.
//!
//! A balanced binary decomposition of the index range `[1, n]`; every node
//! carries the bounding box of its vertices. A node whose box is farther than
//! `delta` from the query point cannot hold a free column and is skipped as a
//! whole, so enumerating the `k` free columns of a row touches `O(k log n)`
//! nodes plus the pruned frontier.
//!
//! The box is a conservative proximity summary: it answers "may contain a
//! point within `delta`" exactly only at the leaves. On trajectory data the
//! vertices of an index range are spatially coherent and the frontier stays
//! small; on adversarial input (e.g. every range spanning the whole domain) a
//! query degrades towards a linear scan. A per-node range tree would bound
//! that case by `O(log^2 n)` per reported column at `O(n log n)` space; the
//! boxes use `O(n)`.

use crate::error::{Error, Result};
use crate::trajectory::{Point, TrajectoryStore};

const NO_CHILD: u32 = u32::MAX;
pub const DEFAULT_LEAF_SIZE: usize = 8;

#[derive(Debug, Clone, Copy)]
struct Node {
    lo: u32,
    hi: u32,
    left: u32,
    right: u32,
    min: Point,
    max: Point,
}

impl Node {
    #[inline]
    fn is_leaf(&self) -> bool {
        self.left == NO_CHILD
    }

    #[inline]
    fn box_dist_sq(&self, q: &Point) -> f64 {
        let dx = (self.min.x - q.x).max(q.x - self.max.x).max(0.0);
        let dy = (self.min.y - q.y).max(q.y - self.max.y).max(0.0);
        dx * dx + dy * dy
    }
}

/// Hierarchy of bounding boxes over consecutive index ranges of a store.
#[derive(Debug, Clone)]
pub struct RangeIndex {
    points: Vec<Point>,
    nodes: Vec<Node>,
    leaf_size: usize,
}

impl RangeIndex {
    pub fn build(store: &TrajectoryStore) -> Result<Self> {
        Self::build_with_leaf_size(store, DEFAULT_LEAF_SIZE)
    }

    pub fn build_with_leaf_size(store: &TrajectoryStore, leaf_size: usize) -> Result<Self> {
        if store.is_empty() {
            return Err(Error::EmptyInput);
        }
        let leaf_size = leaf_size.max(1);
        let mut index = Self {
            points: store.points().to_vec(),
            nodes: Vec::with_capacity(2 * store.len() / leaf_size + 2),
            leaf_size,
        };
        index.build_node(1, store.len());
        Ok(index)
    }

    fn build_node(&mut self, lo: usize, hi: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            lo: lo as u32,
            hi: hi as u32,
            left: NO_CHILD,
            right: NO_CHILD,
            min: Point::new(f64::INFINITY, f64::INFINITY),
            max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        });
        let (min, max) = if hi + 1 - lo <= self.leaf_size {
            let mut min = Point::new(f64::INFINITY, f64::INFINITY);
            let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
            for p in &self.points[lo - 1..hi] {
                min.x = min.x.min(p.x);
                min.y = min.y.min(p.y);
                max.x = max.x.max(p.x);
                max.y = max.y.max(p.y);
            }
            (min, max)
        } else {
            let mid = (lo + hi) / 2;
            let l = self.build_node(lo, mid);
            let r = self.build_node(mid + 1, hi);
            let (ln, rn) = (self.nodes[l as usize], self.nodes[r as usize]);
            let node = &mut self.nodes[id as usize];
            node.left = l;
            node.right = r;
            (
                Point::new(ln.min.x.min(rn.min.x), ln.min.y.min(rn.min.y)),
                Point::new(ln.max.x.max(rn.max.x), ln.max.y.max(rn.max.y)),
            )
        };
        let node = &mut self.nodes[id as usize];
        node.min = min;
        node.max = max;
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], id: u32) -> usize {
            let n = &nodes[id as usize];
            if n.is_leaf() {
                0
            } else {
                1 + go(nodes, n.left).max(go(nodes, n.right))
            }
        }
        go(&self.nodes, 0)
    }

    /// Index ranges of the leaves, left to right.
    pub fn leaves(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .nodes
            .iter()
            .filter(|n| n.is_leaf())
            .map(|n| (n.lo as usize, n.hi as usize))
            .collect();
        out.sort_unstable();
        out
    }

    /// Disjoint node ranges covering `[1, j]`, right to left.
    pub fn prefix_cover(&self, j: usize) -> Vec<(usize, usize)> {
        let mut ids = Vec::new();
        let j = j.min(self.len());
        if j > 0 {
            self.cover_from(0, j as u32, &mut ids);
        }
        ids.iter()
            .map(|&id| {
                let n = &self.nodes[id as usize];
                (n.lo as usize, (n.hi as usize).min(j))
            })
            .collect()
    }

    fn cover_from(&self, id: u32, j: u32, out: &mut Vec<u32>) {
        let n = &self.nodes[id as usize];
        if n.lo > j {
            return;
        }
        if n.hi <= j || n.is_leaf() {
            out.push(id);
            return;
        }
        let l = self.nodes[n.left as usize];
        if l.hi < j {
            self.cover_from(n.right, j, out);
            out.push(n.left);
        } else {
            self.cover_from(n.left, j, out);
        }
    }

    /// Greatest column `j' <= j` with `d(T(j'), q) <= delta`.
    pub fn prev_free_column(&self, q: Point, delta: f64, j: usize) -> Option<usize> {
        if j == 0 {
            return None;
        }
        let j = j.min(self.len());
        let d2 = delta * delta;
        let mut cover = Vec::with_capacity(32);
        self.cover_from(0, j as u32, &mut cover);
        cover.into_iter().find_map(|id| self.last_in(id, &q, d2, j))
    }

    fn last_in(&self, id: u32, q: &Point, d2: f64, j: usize) -> Option<usize> {
        let n = &self.nodes[id as usize];
        if n.lo as usize > j || n.box_dist_sq(q) > d2 {
            return None;
        }
        if n.is_leaf() {
            let hi = (n.hi as usize).min(j);
            return (n.lo as usize..=hi).rev().find(|&c| self.points[c - 1].dist_sq(q) <= d2);
        }
        self.last_in(n.right, q, d2, j).or_else(|| self.last_in(n.left, q, d2, j))
    }

    /// Free columns of the row whose point is `q`, strictly descending.
    pub fn enumerate_row_free(&self, q: Point, delta: f64) -> RowFree<'_> {
        RowFree {
            index: self,
            q,
            d2: delta * delta,
            stack: vec![0],
            pending: Vec::new(),
        }
    }

    /// Appends the free columns of the row whose point is `q` to `out`, in
    /// ascending order.
    pub fn free_columns_into(&self, q: Point, delta: f64, out: &mut Vec<u32>) {
        let d2 = delta * delta;
        let mut stack = Vec::with_capacity(64);
        stack.push(0u32);
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id as usize];
            if n.box_dist_sq(&q) > d2 {
                continue;
            }
            if n.is_leaf() {
                for c in n.lo..=n.hi {
                    if self.points[c as usize - 1].dist_sq(&q) <= d2 {
                        out.push(c);
                    }
                }
            } else {
                stack.push(n.right);
                stack.push(n.left);
            }
        }
    }
}

/// Descending stream of free columns, see [`RangeIndex::enumerate_row_free`].
pub struct RowFree<'a> {
    index: &'a RangeIndex,
    q: Point,
    d2: f64,
    stack: Vec<u32>,
    // leaf hits, ascending; popped from the back
    pending: Vec<usize>,
}

impl Iterator for RowFree<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if let Some(c) = self.pending.pop() {
                return Some(c);
            }
            let id = self.stack.pop()?;
            let n = &self.index.nodes[id as usize];
            if n.box_dist_sq(&self.q) > self.d2 {
                continue;
            }
            if n.is_leaf() {
                for c in n.lo as usize..=n.hi as usize {
                    if self.index.points[c - 1].dist_sq(&self.q) <= self.d2 {
                        self.pending.push(c);
                    }
                }
            } else {
                self.stack.push(n.left);
                self.stack.push(n.right);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::Trajectory;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn store_of(points: Vec<Point>) -> TrajectoryStore {
        TrajectoryStore::concatenate(&[Trajectory::new(points).unwrap()]).unwrap()
    }

    fn random_walk(n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
        let mut p = Point::new(0.0, 0.0);
        (0..n)
            .map(|_| {
                p.x += rng.gen_range(-5.0..5.0);
                p.y += rng.gen_range(-5.0..5.0);
                p
            })
            .collect()
    }

    #[test]
    fn single_vertex_is_a_single_leaf() {
        let idx = RangeIndex::build_with_leaf_size(&store_of(vec![Point::new(1.0, 1.0)]), 1).unwrap();
        assert_eq!(idx.node_count(), 1);
        assert_eq!(idx.leaves(), vec![(1, 1)]);
    }

    #[test]
    fn eight_vertices_give_three_levels() {
        let pts = (0..8).map(|i| Point::new(i as f64, 0.0)).collect();
        let idx = RangeIndex::build_with_leaf_size(&store_of(pts), 1).unwrap();
        assert_eq!(idx.depth(), 3);
        assert_eq!(idx.leaves(), (1..=8).map(|i| (i, i)).collect::<Vec<_>>());
    }

    #[test]
    fn empty_store_is_rejected() {
        let s = store_of(vec![Point::new(0.0, 0.0)]);
        let empty = s.remove_intervals(&[s.subtrajectory(1, 1).unwrap()]).unwrap();
        assert!(matches!(RangeIndex::build(&empty), Err(Error::EmptyInput)));
    }

    #[test]
    fn query_at_own_vertex_returns_it() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = store_of(random_walk(50, &mut rng));
        let idx = RangeIndex::build(&s).unwrap();
        for j in 1..=50 {
            assert_eq!(idx.prev_free_column(s.point(j), 0.0, j), Some(j));
        }
    }

    #[test]
    fn far_query_finds_nothing() {
        let s = store_of((0..20).map(|i| Point::new(i as f64, 0.0)).collect());
        let idx = RangeIndex::build(&s).unwrap();
        let q = Point::new(0.0, 100.0);
        assert_eq!(idx.prev_free_column(q, 50.0, 20), None);
        assert_eq!(idx.enumerate_row_free(q, 50.0).count(), 0);
    }

    #[test]
    fn zero_delta_and_distinct_points_stream_is_empty() {
        let s = store_of((0..20).map(|i| Point::new(i as f64, 0.0)).collect());
        let idx = RangeIndex::build(&s).unwrap();
        assert_eq!(idx.enumerate_row_free(Point::new(0.5, 0.0), 0.0).count(), 0);
    }

    #[test]
    fn constant_trajectory_streams_every_column() {
        let s = store_of(vec![Point::new(2.0, 2.0); 13]);
        let idx = RangeIndex::build_with_leaf_size(&s, 1).unwrap();
        let got: Vec<usize> = idx.enumerate_row_free(Point::new(2.0, 2.0), 0.0).collect();
        assert_eq!(got, (1..=13).rev().collect::<Vec<_>>());
    }

    #[test]
    fn prefix_cover_is_small_and_exact() {
        for n in [1usize, 2, 7, 8, 9, 100, 257] {
            let s = store_of((0..n).map(|i| Point::new(i as f64, 0.0)).collect());
            let idx = RangeIndex::build_with_leaf_size(&s, 1).unwrap();
            for j in 1..=n {
                let cover = idx.prefix_cover(j);
                let mut ranges = cover.clone();
                ranges.sort_unstable();
                let mut next = 1;
                for (lo, hi) in ranges {
                    assert_eq!(lo, next);
                    next = hi + 1;
                }
                assert_eq!(next, j + 1);
                assert!(cover.len() <= 2 * (idx.depth() + 1));
                // right to left
                assert!(cover.windows(2).all(|w| w[0].0 > w[1].1));
            }
        }
    }

    #[test]
    fn random_queries_match_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for leaf in [1usize, 4, DEFAULT_LEAF_SIZE] {
            let s = store_of(random_walk(200, &mut rng));
            let idx = RangeIndex::build_with_leaf_size(&s, leaf).unwrap();
            for _ in 0..500 {
                let q = s.point(rng.gen_range(1..=200));
                let q = Point::new(q.x + rng.gen_range(-3.0..3.0), q.y + rng.gen_range(-3.0..3.0));
                let delta = rng.gen_range(0.0..25.0);
                let j = rng.gen_range(1..=200);
                let scan = (1..=j).rev().find(|&c| s.point(c).dist_sq(&q) <= delta * delta);
                assert_eq!(idx.prev_free_column(q, delta, j), scan);

                let all: Vec<usize> =
                    (1..=200).rev().filter(|&c| s.point(c).dist_sq(&q) <= delta * delta).collect();
                assert_eq!(idx.enumerate_row_free(q, delta).collect::<Vec<_>>(), all);
                let mut asc = Vec::new();
                idx.free_columns_into(q, delta, &mut asc);
                assert!(asc.iter().map(|&c| c as usize).eq(all.iter().rev().copied()));
            }
        }
    }
}
