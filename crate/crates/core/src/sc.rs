//! Single-cluster search over a sliding window of free-space rows.
//!
//! A centre `T[a, b]` has length `ell = b - a` (edges). The window holds rows
//! `a..=b`; `step_first` drops row `a`, `step_second` appends row `b + 1`,
//! and [`query_centre`] extracts a maximum-cardinality set of disjoint
//! members from the bottom row. Centres never cross a boundary edge: each
//! boundary-free piece of the store is swept on its own.

use crate::cluster::Cluster;
use crate::error::{Error, Result};
use crate::freespace::{RowSource, RowWindow, WindowStats};
use crate::range_index::RangeIndex;
use crate::trajectory::{SubtrajectoryRef, TrajectoryStore};

/// Greedy member extraction for the centre `T[top, bottom]` of `window`.
///
/// Scans the bottom row right to left. A cell whose label reaches the top
/// row starts a member; its left end is the right-most landing column in the
/// top row, found by walking to the right-most neighbour that still reaches
/// the top row. The scan resumes left of that landing column.
///
/// Without `target` the result is a maximum-cardinality disjoint member set.
/// With `target = Some(m)` the scan stops after `m` members and returns
/// `None` if fewer exist.
pub fn query_centre(
    window: &RowWindow,
    store: &TrajectoryStore,
    target: Option<usize>,
) -> Option<Cluster> {
    let (a, b) = (window.top()?, window.bottom()?);
    let bottom = window.cells(b)?;
    let mut members = Vec::new();
    let mut bound = u32::MAX;
    for cell in bottom.iter().rev() {
        if cell.col > bound || cell.reach as usize > a {
            continue;
        }
        let j2 = cell.col as usize;
        let j1 = landing_column(window, store, a, b, j2);
        members.push(SubtrajectoryRef::new_unchecked(j1, j2));
        if target.is_some_and(|m| members.len() >= m) {
            break;
        }
        if j1 == 1 {
            break;
        }
        bound = j1 as u32 - 1;
    }
    if target.is_some_and(|m| members.len() < m) {
        return None;
    }
    Some(Cluster::new(
        SubtrajectoryRef::new_unchecked(a, b),
        members,
        window.delta(),
    ))
}

fn reaches(window: &RowWindow, row: usize, col: usize, a: usize) -> bool {
    window.reach(row, col).is_some_and(|r| r as usize <= a)
}

/// Right-most column of row `a` reachable from `(b, j)`.
fn landing_column(window: &RowWindow, store: &TrajectoryStore, a: usize, b: usize, j: usize) -> usize {
    let (mut i, mut j) = (b, j);
    while i > a {
        let up_open = !store.is_boundary(i - 1);
        let left_open = j > 1 && !store.is_boundary(j - 1);
        if up_open && reaches(window, i - 1, j, a) {
            i -= 1;
        } else if up_open && left_open && reaches(window, i - 1, j - 1, a) {
            i -= 1;
            j -= 1;
        } else if left_open && reaches(window, i, j - 1, a) {
            j -= 1;
        } else {
            unreachable!("cell ({i}, {j}) is labelled as reaching row {a} but has no such neighbour");
        }
    }
    j
}

/// Counters of one solver call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScStats {
    pub peak_rows: usize,
    pub peak_cells: usize,
    pub rows_generated: usize,
    pub queries: usize,
}

impl ScStats {
    fn absorb(&mut self, w: WindowStats) {
        self.peak_rows = self.peak_rows.max(w.peak_rows);
        self.peak_cells = self.peak_cells.max(w.peak_cells);
        self.rows_generated += w.rows_generated;
    }
}

type Observer<'o> = Box<dyn FnMut(&RowWindow) + 'o>;

/// Runs the SC variants on one store with a fixed row source.
pub struct ScSolver<'s, 'o, S: RowSource> {
    store: &'s TrajectoryStore,
    source: &'s S,
    stats: ScStats,
    observer: Option<Observer<'o>>,
}

impl<'s, 'o, S: RowSource> ScSolver<'s, 'o, S> {
    pub fn new(store: &'s TrajectoryStore, source: &'s S) -> Self {
        Self { store, source, stats: ScStats::default(), observer: None }
    }

    /// Calls `f` with the window after every row change.
    pub fn with_observer(mut self, f: impl FnMut(&RowWindow) + 'o) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    pub fn stats(&self) -> ScStats {
        self.stats
    }

    fn observe(&mut self, w: &RowWindow) {
        if let Some(f) = self.observer.as_mut() {
            f(w);
        }
    }

    fn push(&mut self, w: &mut RowWindow, row: usize) {
        w.step_second(self.store, self.source, row);
        self.observe(w);
    }

    fn pop(&mut self, w: &mut RowWindow) {
        w.step_first();
        self.observe(w);
    }

    fn query(&mut self, w: &RowWindow, target: Option<usize>) -> Option<Cluster> {
        self.stats.queries += 1;
        query_centre(w, self.store, target)
    }

    /// Slides a window of `ell + 1` rows over every piece, calling `visit`
    /// after each position; stops early when `visit` returns true.
    fn sweep_fixed(&mut self, ell: usize, delta: f64, mut visit: impl FnMut(&mut Self, &RowWindow) -> bool) {
        let mut w = RowWindow::new(delta);
        for seg in self.store.segments() {
            if seg.len() < ell {
                continue;
            }
            w.clear();
            for r in seg.start()..=seg.start() + ell {
                self.push(&mut w, r);
            }
            loop {
                if visit(self, &w) {
                    self.stats.absorb(w.stats());
                    return;
                }
                let b = w.bottom().unwrap();
                if b == seg.end() {
                    break;
                }
                self.pop(&mut w);
                self.push(&mut w, b + 1);
            }
        }
        self.stats.absorb(w.stats());
    }

    /// A cluster with centre length `ell` and at least `m` members, if any.
    pub fn fixed(&mut self, m: usize, ell: usize, delta: f64) -> Result<Option<Cluster>> {
        check_delta(delta)?;
        let m = m.max(1);
        let mut found = None;
        self.sweep_fixed(ell, delta, |s, w| {
            found = s.query(w, Some(m));
            found.is_some()
        });
        Ok(found)
    }

    /// Over all centres of length `ell`, one with the most members; ties go
    /// to the smallest start index.
    pub fn max_cardinality(&mut self, ell: usize, delta: f64) -> Result<Option<Cluster>> {
        check_delta(delta)?;
        let mut best: Option<Cluster> = None;
        self.sweep_fixed(ell, delta, |s, w| {
            let c = s.query(w, None).expect("untargeted query always answers");
            if best.as_ref().map_or(true, |b| c.cardinality() > b.cardinality()) {
                best = Some(c);
            }
            false
        });
        Ok(best)
    }

    /// The longest centre with at least `m` members (ties: smallest start),
    /// reported with its full maximum-cardinality member set.
    pub fn max_length(&mut self, m: usize, delta: f64) -> Result<Option<Cluster>> {
        check_delta(delta)?;
        let m = m.max(1);
        let mut best: Option<(usize, usize)> = None;
        let mut w = RowWindow::new(delta);
        for seg in self.store.segments() {
            w.clear();
            let (mut a, mut b) = (seg.start(), seg.start());
            self.push(&mut w, a);
            loop {
                let ok = self.query(&w, Some(m)).is_some();
                if ok && best.map_or(true, |(ba, bb)| b - a > bb - ba) {
                    best = Some((a, b));
                }
                if ok || a < b {
                    if ok {
                        if b == seg.end() {
                            break;
                        }
                        b += 1;
                        self.push(&mut w, b);
                    } else {
                        a += 1;
                        self.pop(&mut w);
                    }
                } else {
                    if b == seg.end() {
                        break;
                    }
                    self.pop(&mut w);
                    a += 1;
                    b += 1;
                    self.push(&mut w, b);
                }
            }
        }
        self.stats.absorb(w.stats());
        let Some((a, b)) = best else { return Ok(None) };
        let mut w = RowWindow::new(delta);
        for r in a..=b {
            w.step_second(self.store, self.source, r);
        }
        self.stats.absorb(w.stats());
        Ok(self.query(&w, None))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta >= 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}

/// `SC(m, ell, delta)`: first cluster with centre length `ell` and `>= m` members.
pub fn sc_fixed(m: usize, ell: usize, delta: f64, store: &TrajectoryStore) -> Result<Option<Cluster>> {
    if store.is_empty() {
        return Ok(None);
    }
    let index = RangeIndex::build(store)?;
    ScSolver::new(store, &index).fixed(m, ell, delta)
}

/// `SC(max, ell, delta)`.
pub fn sc_max_cardinality(ell: usize, delta: f64, store: &TrajectoryStore) -> Result<Option<Cluster>> {
    if store.is_empty() {
        return Ok(None);
    }
    let index = RangeIndex::build(store)?;
    ScSolver::new(store, &index).max_cardinality(ell, delta)
}

/// `SC(m, max, delta)`.
pub fn sc_max_length(m: usize, delta: f64, store: &TrajectoryStore) -> Result<Option<Cluster>> {
    if store.is_empty() {
        return Ok(None);
    }
    let index = RangeIndex::build(store)?;
    ScSolver::new(store, &index).max_length(m, delta)
}
