//! Streaming approximate Pareto front of (centre length, cardinality).
//!
//! Every boundary-free piece of the store is split by a balanced binary tree.
//! For each tree node `[lo, hi]` a forward pass anchored at `lo` emits the
//! best cluster of every prefix `[lo, c]`, and a pass on the reversed store
//! emits the best cluster of every suffix `[c, hi]`. Any centre contains a
//! prefix or suffix of some node with at least half its vertices, so every
//! cluster is dominated up to a factor two in length.
//!
//! Clusters are handed to a consumer as they are produced; nothing is stored.
//! The same centre may be emitted more than once.

use std::ops::ControlFlow;

use crate::cluster::Cluster;
use crate::error::{Error, Result};
use crate::freespace::{ColState, DenseScan, RowSource};
use crate::range_index::RangeIndex;
use crate::trajectory::{SubtrajectoryRef, TrajectoryStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeInterval {
    pub lo: usize,
    pub hi: usize,
    pub depth: usize,
}

impl NodeInterval {
    pub fn vertex_count(&self) -> usize {
        self.hi - self.lo + 1
    }
}

/// Balanced-tree node intervals of every piece, in preorder, leaves included.
pub fn decompose(store: &TrajectoryStore) -> Vec<NodeInterval> {
    let mut out = Vec::new();
    for seg in store.segments() {
        let mut stack = vec![NodeInterval { lo: seg.start(), hi: seg.end(), depth: 0 }];
        while let Some(node) = stack.pop() {
            out.push(node);
            if node.lo < node.hi {
                let mid = (node.lo + node.hi) / 2;
                let depth = node.depth + 1;
                stack.push(NodeInterval { lo: mid + 1, hi: node.hi, depth });
                stack.push(NodeInterval { lo: node.lo, hi: mid, depth });
            }
        }
    }
    out
}

/// Maximum-cardinality cluster for centre `[anchor, row]` of `state`.
pub fn query_prefix(state: &ColState, delta: f64) -> Cluster {
    let mut members = Vec::new();
    let mut bound = u32::MAX;
    for &y in state.free_columns().iter().rev() {
        if y > bound {
            continue;
        }
        let Some(j1) = state.get(y as usize) else { continue };
        members.push(SubtrajectoryRef::new_unchecked(j1 as usize, y as usize));
        if j1 == 1 {
            break;
        }
        bound = j1 - 1;
    }
    Cluster::new(
        SubtrajectoryRef::new_unchecked(state.anchor(), state.row()),
        members,
        delta,
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PscStats {
    pub emitted: usize,
    pub max_centre_vertices: usize,
    pub max_cardinality: usize,
    /// Free cells visited over all passes.
    pub free_cells: u64,
    pub nodes: usize,
    /// Label slots held by the sweep state.
    pub sweep_slots: usize,
    /// Nodes of the two proximity indexes, zero for the dense source.
    pub index_nodes: usize,
    pub stopped_early: bool,
}

enum Source {
    Index(RangeIndex),
    Dense,
}

impl RowSource for Source {
    fn free_columns(&self, store: &TrajectoryStore, row: usize, delta: f64, out: &mut Vec<u32>) {
        match self {
            Source::Index(ix) => ix.free_columns(store, row, delta, out),
            Source::Dense => DenseScan.free_columns(store, row, delta, out),
        }
    }
}

/// Forward and reversed views of one store, ready for repeated streams.
pub struct PscSolver<'s> {
    store: &'s TrajectoryStore,
    reversed: TrajectoryStore,
    forward_src: Source,
    reversed_src: Source,
}

impl<'s> PscSolver<'s> {
    pub fn new(store: &'s TrajectoryStore) -> Result<Self> {
        let reversed = store.reversed();
        let forward_src = Source::Index(RangeIndex::build(store)?);
        let reversed_src = Source::Index(RangeIndex::build(&reversed)?);
        Ok(Self { store, reversed, forward_src, reversed_src })
    }

    /// Linear-scan row generation, for differential tests.
    pub fn dense(store: &'s TrajectoryStore) -> Result<Self> {
        if store.is_empty() {
            return Err(Error::EmptyStore);
        }
        Ok(Self { store, reversed: store.reversed(), forward_src: Source::Dense, reversed_src: Source::Dense })
    }

    pub fn store(&self) -> &TrajectoryStore {
        self.store
    }

    fn index_nodes(&self) -> usize {
        [&self.forward_src, &self.reversed_src]
            .iter()
            .map(|s| match s {
                Source::Index(ix) => ix.node_count(),
                Source::Dense => 0,
            })
            .sum()
    }

    /// Emits prefix and suffix clusters of every node. The consumer may stop
    /// the stream by returning `Break`.
    pub fn stream(
        &self,
        delta: f64,
        mut consumer: impl FnMut(Cluster) -> ControlFlow<()>,
    ) -> Result<PscStats> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidDelta(delta));
        }
        let n = self.store.len();
        let nodes = decompose(self.store);
        let mut stats = PscStats {
            nodes: nodes.len(),
            sweep_slots: 2 * (n + 1),
            index_nodes: self.index_nodes(),
            ..PscStats::default()
        };
        let mut state = ColState::new(n, delta);
        let mut emit = |c: Cluster, stats: &mut PscStats| {
            stats.emitted += 1;
            stats.max_centre_vertices = stats.max_centre_vertices.max(c.centre_vertices());
            stats.max_cardinality = stats.max_cardinality.max(c.cardinality());
            consumer(c)
        };
        for node in &nodes {
            for backward in [false, true] {
                let (store, src, lo, hi) = if backward {
                    (&self.reversed, &self.reversed_src, n + 1 - node.hi, n + 1 - node.lo)
                } else {
                    (self.store, &self.forward_src, node.lo, node.hi)
                };
                // a leaf's suffix equals its prefix
                if backward && lo == hi {
                    continue;
                }
                state.anchor_at(store, src, lo);
                let mut c = lo;
                loop {
                    stats.free_cells += state.free_columns().len() as u64;
                    let mut cluster = query_prefix(&state, delta);
                    if backward {
                        cluster = mirror_cluster(store, &cluster);
                    }
                    if emit(cluster, &mut stats).is_break() {
                        stats.stopped_early = true;
                        return Ok(stats);
                    }
                    if c == hi {
                        break;
                    }
                    c += 1;
                    state.step_second(store, src, c);
                }
            }
        }
        Ok(stats)
    }
}

fn mirror_cluster(reversed: &TrajectoryStore, c: &Cluster) -> Cluster {
    Cluster::new(
        reversed.mirror(&c.centre),
        c.members.iter().map(|m| reversed.mirror(m)).collect(),
        c.delta,
    )
}

/// `PSC(delta)` on `store`, building the indexes once.
pub fn psc_stream(
    delta: f64,
    store: &TrajectoryStore,
    consumer: impl FnMut(Cluster) -> ControlFlow<()>,
) -> Result<PscStats> {
    if store.is_empty() {
        return Err(Error::EmptyStore);
    }
    PscSolver::new(store)?.stream(delta, consumer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{Point, Trajectory};

    fn store(lens: &[usize]) -> TrajectoryStore {
        let ts: Vec<Trajectory> = lens
            .iter()
            .map(|&l| Trajectory::new((0..l).map(|i| Point::new(i as f64, (i * i) as f64)).collect()).unwrap())
            .collect();
        TrajectoryStore::concatenate(&ts).unwrap()
    }

    fn spans(nodes: &[NodeInterval]) -> Vec<(usize, usize)> {
        nodes.iter().map(|n| (n.lo, n.hi)).collect()
    }

    #[test]
    fn decompose_single_piece_of_eight() {
        let nodes = decompose(&store(&[8]));
        let mut got = spans(&nodes);
        got.sort();
        let mut want = vec![(1, 8), (1, 4), (5, 8), (1, 2), (3, 4), (5, 6), (7, 8)];
        want.extend((1..=8).map(|i| (i, i)));
        want.sort();
        assert_eq!(got, want);
        assert_eq!(nodes.iter().map(|n| n.depth).max(), Some(3));
    }

    #[test]
    fn decompose_respects_boundaries() {
        let nodes = decompose(&store(&[3, 5]));
        assert_eq!(nodes[0], NodeInterval { lo: 1, hi: 3, depth: 0 });
        assert!(nodes.iter().all(|n| n.hi <= 3 || n.lo >= 4));
        assert!(nodes.contains(&NodeInterval { lo: 4, hi: 8, depth: 0 }));
    }

    #[test]
    fn two_vertex_store_emits_all_three_centres() {
        let s = store(&[2]);
        let mut seen = Vec::new();
        psc_stream(0.5, &s, |c| {
            seen.push((c.centre.start(), c.centre.end()));
            ControlFlow::Continue(())
        })
        .unwrap();
        seen.sort();
        seen.dedup();
        assert_eq!(seen, vec![(1, 1), (1, 2), (2, 2)]);
    }

    #[test]
    fn consumer_can_stop_the_stream() {
        let s = store(&[10]);
        let mut count = 0;
        let stats = psc_stream(1.0, &s, |_| {
            count += 1;
            if count == 3 { ControlFlow::Break(()) } else { ControlFlow::Continue(()) }
        })
        .unwrap();
        assert!(stats.stopped_early);
        assert_eq!(stats.emitted, 3);
    }

    #[test]
    fn dense_and_indexed_streams_match() {
        let s = store(&[7, 6, 9]);
        for delta in [0.0, 3.0, 20.0, 1e4] {
            let mut a = Vec::new();
            let mut b = Vec::new();
            PscSolver::new(&s).unwrap().stream(delta, |c| { a.push(c); ControlFlow::Continue(()) }).unwrap();
            PscSolver::dense(&s).unwrap().stream(delta, |c| { b.push(c); ControlFlow::Continue(()) }).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn invalid_delta_is_rejected() {
        let s = store(&[3]);
        assert!(psc_stream(f64::NAN, &s, |_| ControlFlow::Continue(())).is_err());
    }
}
