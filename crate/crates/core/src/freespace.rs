//! The free-space matrix of a store against itself, seen as a digraph, and
//! the two row-by-row sweep states built over it.
//!
//! Cell `(i, j)` is *free* when `d(T(i), T(j)) <= delta`. There is an edge
//! from a free `(i, j)` to a free `(s, k)` with `s in {i, i-1}` and
//! `k in {j, j-1}`, except that no edge steps across a boundary edge of the
//! store, neither in the row direction (`i -> i-1` with `i-1` a boundary)
//! nor in the column direction. A directed path from `(b, d)` to `(a, c)`
//! exists iff the discrete Fréchet distance of `T[a, b]` and `T[c, d]` is at
//! most `delta`.
//!
//! * [`RowWindow`] stores only the free cells of rows `a..=b`, each labelled
//!   with the minimum row it can reach. Dropping the top row is `O(1)`; the
//!   labels of surviving rows are left untouched. A label can then point
//!   above the window, but every consumer only asks "is `reach <= a`", and a
//!   path that reaches a row above `a` passes through row `a` first, so the
//!   answer stays exact.
//! * [`ColState`] holds, for a fixed anchor row `a` and current row `c`, the
//!   maximum column in row `a` reachable from each `(c, y)`; two dense rows.

use std::collections::VecDeque;

use crate::range_index::RangeIndex;
use crate::trajectory::TrajectoryStore;

/// True iff `(i, j)` is a free cell.
#[inline]
pub fn is_free(store: &TrajectoryStore, i: usize, j: usize, delta: f64) -> bool {
    store.point(i).dist_sq(&store.point(j)) <= delta * delta
}

/// Produces the free columns of one matrix row.
pub trait RowSource {
    /// Replaces `out` with the free columns of `row`, ascending.
    fn free_columns(&self, store: &TrajectoryStore, row: usize, delta: f64, out: &mut Vec<u32>);
}

/// Scans all `n` columns. Reference source for differential testing.
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseScan;

impl RowSource for DenseScan {
    fn free_columns(&self, store: &TrajectoryStore, row: usize, delta: f64, out: &mut Vec<u32>) {
        out.clear();
        let q = store.point(row);
        let d2 = delta * delta;
        out.extend(
            store
                .points()
                .iter()
                .enumerate()
                .filter(|(_, p)| p.dist_sq(&q) <= d2)
                .map(|(k, _)| k as u32 + 1),
        );
    }
}

impl RowSource for RangeIndex {
    fn free_columns(&self, store: &TrajectoryStore, row: usize, delta: f64, out: &mut Vec<u32>) {
        debug_assert_eq!(self.len(), store.len());
        out.clear();
        self.free_columns_into(store.point(row), delta, out);
    }
}

/// A free cell of a window row and its reach label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReachCell {
    pub col: u32,
    /// Minimum row reachable from this cell within the rows present when it
    /// was added. Only comparisons against the current top row are exact;
    /// [`RowWindow::reach`] returns the clamped value.
    pub reach: u32,
}

#[derive(Debug, Clone)]
struct WindowRow {
    row: usize,
    cells: Vec<ReachCell>,
}

/// Counters maintained by a [`RowWindow`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WindowStats {
    pub rows: usize,
    pub cells: usize,
    pub peak_rows: usize,
    pub peak_cells: usize,
    pub rows_generated: usize,
}

/// Sparse band of rows `a..=b` of the free-space matrix with reach labels.
#[derive(Debug, Clone)]
pub struct RowWindow {
    delta: f64,
    rows: VecDeque<WindowRow>,
    stats: WindowStats,
    scratch: Vec<u32>,
    spare: Vec<Vec<ReachCell>>,
}

impl RowWindow {
    pub fn new(delta: f64) -> Self {
        Self {
            delta,
            rows: VecDeque::new(),
            stats: WindowStats::default(),
            scratch: Vec::new(),
            spare: Vec::new(),
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn top(&self) -> Option<usize> {
        self.rows.front().map(|r| r.row)
    }

    pub fn bottom(&self) -> Option<usize> {
        self.rows.back().map(|r| r.row)
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn stats(&self) -> WindowStats {
        self.stats
    }

    /// Drops every row; counters other than the current sizes are kept.
    pub fn clear(&mut self) {
        while self.step_first() {}
    }

    /// Free cells of a stored row, ascending by column.
    pub fn cells(&self, row: usize) -> Option<&[ReachCell]> {
        let top = self.top()?;
        if row < top {
            return None;
        }
        self.rows.get(row - top).map(|r| r.cells.as_slice())
    }

    /// Minimum row reachable from `(row, col)` without leaving the window,
    /// or `None` if the cell is not stored (not free, or outside the window).
    pub fn reach(&self, row: usize, col: usize) -> Option<u32> {
        let top = self.top()? as u32;
        let cells = self.cells(row)?;
        cells
            .binary_search_by_key(&(col as u32), |c| c.col)
            .ok()
            .map(|k| cells[k].reach.max(top))
    }

    /// Appends row `row` below the current bottom row.
    ///
    /// # Panics
    /// If the window is non-empty and `row` is not `bottom + 1`.
    pub fn step_second(&mut self, store: &TrajectoryStore, source: &impl RowSource, row: usize) {
        if let Some(b) = self.bottom() {
            assert_eq!(row, b + 1, "window rows must be consecutive");
        }
        let mut free = std::mem::take(&mut self.scratch);
        source.free_columns(store, row, self.delta, &mut free);

        let mut cells = self.spare.pop().unwrap_or_default();
        cells.clear();
        cells.reserve(free.len());
        let up: &[ReachCell] = match self.rows.back() {
            Some(prev) if !store.is_boundary(row - 1) => &prev.cells,
            _ => &[],
        };
        let mut p = 0;
        for &c in &free {
            let mut best = row as u32;
            let left_open = c > 1 && !store.is_boundary(c as usize - 1);
            if left_open {
                if let Some(last) = cells.last() {
                    if last.col + 1 == c {
                        best = best.min(last.reach);
                    }
                }
            }
            while p < up.len() && up[p].col + 1 < c {
                p += 1;
            }
            let mut k = p;
            if k < up.len() && up[k].col + 1 == c {
                if left_open {
                    best = best.min(up[k].reach);
                }
                k += 1;
            }
            if k < up.len() && up[k].col == c {
                best = best.min(up[k].reach);
            }
            cells.push(ReachCell { col: c, reach: best });
        }
        self.scratch = free;

        self.stats.rows += 1;
        self.stats.cells += cells.len();
        self.stats.rows_generated += 1;
        self.stats.peak_rows = self.stats.peak_rows.max(self.stats.rows);
        self.stats.peak_cells = self.stats.peak_cells.max(self.stats.cells);
        self.rows.push_back(WindowRow { row, cells });
    }

    /// Discards the top row. Returns false if the window was empty.
    pub fn step_first(&mut self) -> bool {
        match self.rows.pop_front() {
            Some(r) => {
                self.stats.rows -= 1;
                self.stats.cells -= r.cells.len();
                self.spare.push(r.cells);
                true
            }
            None => false,
        }
    }
}

/// Dense `col_a(c, .)` labels for anchor row `a` and current row `c`.
///
/// `None` stands for minus infinity: no path from the cell lands in row `a`.
#[derive(Debug, Clone)]
pub struct ColState {
    delta: f64,
    anchor: usize,
    row: usize,
    cur: Vec<Option<u32>>,
    prev: Vec<Option<u32>>,
    cur_cols: Vec<u32>,
    prev_cols: Vec<u32>,
}

impl ColState {
    /// State for a store of `n` vertices; call [`ColState::anchor_at`] next.
    pub fn new(n: usize, delta: f64) -> Self {
        Self {
            delta,
            anchor: 0,
            row: 0,
            cur: vec![None; n + 1],
            prev: vec![None; n + 1],
            cur_cols: Vec::new(),
            prev_cols: Vec::new(),
        }
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn row(&self) -> usize {
        self.row
    }

    /// `col_a(c, y)` for the current row `c`.
    #[inline]
    pub fn get(&self, y: usize) -> Option<u32> {
        self.cur[y]
    }

    /// `col_a(c - 1, y)`, if the previous row belongs to this pass.
    pub fn get_prev(&self, y: usize) -> Option<u32> {
        self.prev[y]
    }

    /// Free columns of the current row, ascending.
    pub fn free_columns(&self) -> &[u32] {
        &self.cur_cols
    }

    fn reset(&mut self) {
        for &y in &self.cur_cols {
            self.cur[y as usize] = None;
        }
        for &y in &self.prev_cols {
            self.prev[y as usize] = None;
        }
        self.cur_cols.clear();
        self.prev_cols.clear();
    }

    /// Starts a pass at anchor row `a`: `col_a(a, y) = y` on free cells.
    pub fn anchor_at(&mut self, store: &TrajectoryStore, source: &impl RowSource, a: usize) {
        self.reset();
        self.anchor = a;
        self.row = a;
        source.free_columns(store, a, self.delta, &mut self.cur_cols);
        for &y in &self.cur_cols {
            self.cur[y as usize] = Some(y);
        }
    }

    /// Advances to row `c = row + 1`.
    pub fn step_second(&mut self, store: &TrajectoryStore, source: &impl RowSource, c: usize) {
        assert_eq!(c, self.row + 1, "rows must be consecutive");
        for &y in &self.prev_cols {
            self.prev[y as usize] = None;
        }
        std::mem::swap(&mut self.cur, &mut self.prev);
        std::mem::swap(&mut self.cur_cols, &mut self.prev_cols);
        self.row = c;
        let up = !store.is_boundary(c - 1);
        if !up {
            for &y in &self.prev_cols {
                self.prev[y as usize] = None;
            }
            self.prev_cols.clear();
        }
        source.free_columns(store, c, self.delta, &mut self.cur_cols);
        for &y in &self.cur_cols {
            let y = y as usize;
            let mut best = self.prev[y];
            if y > 1 && !store.is_boundary(y - 1) {
                best = best.max(self.prev[y - 1]).max(self.cur[y - 1]);
            }
            self.cur[y] = best;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::Trajectory;

    fn store(pieces: &[&[(f64, f64)]]) -> TrajectoryStore {
        let ts: Vec<Trajectory> = pieces
            .iter()
            .map(|p| Trajectory::new(p.iter().map(|&q| q.into()).collect()).unwrap())
            .collect();
        TrajectoryStore::concatenate(&ts).unwrap()
    }

    #[test]
    fn diagonal_is_free_and_far_cells_are_not() {
        let s = store(&[&[(0.0, 0.0), (3.0, 4.0)]]);
        assert!(is_free(&s, 1, 1, 0.0));
        assert!(!is_free(&s, 1, 2, 4.0));
        assert!(is_free(&s, 1, 2, 5.0));
    }

    #[test]
    fn first_row_reaches_itself() {
        let s = store(&[&[(0.0, 0.0); 4]]);
        let mut w = RowWindow::new(0.0);
        w.step_second(&s, &DenseScan, 2);
        assert!(w.cells(2).unwrap().iter().all(|c| c.reach == 2));
        assert_eq!(w.cells(2).unwrap().len(), 4);
    }

    #[test]
    fn all_free_block_reaches_top() {
        let s = store(&[&[(0.0, 0.0), (0.0, 0.0)]]);
        let mut w = RowWindow::new(1.0);
        w.step_second(&s, &DenseScan, 1);
        w.step_second(&s, &DenseScan, 2);
        assert_eq!(w.reach(2, 2), Some(1));
    }

    #[test]
    fn boundary_blocks_column_and_row_steps() {
        // Two identical single-point pieces: every cell free, but the boundary
        // after vertex 1 cuts all edges between index 1 and 2.
        let s = store(&[&[(0.0, 0.0)], &[(0.0, 0.0)]]);
        let mut w = RowWindow::new(0.0);
        w.step_second(&s, &DenseScan, 1);
        w.step_second(&s, &DenseScan, 2);
        assert_eq!(w.reach(2, 2), Some(2));
        assert_eq!(w.reach(2, 1), Some(2));
        assert_eq!(w.reach(1, 2), Some(1));
    }

    #[test]
    fn step_first_drops_rows_and_tracks_peaks() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 0.0)).collect();
        let s = store(&[&pts]);
        let mut w = RowWindow::new(1.0);
        for r in 2..=5 {
            w.step_second(&s, &DenseScan, r);
        }
        assert_eq!((w.top(), w.bottom()), (Some(2), Some(5)));
        assert!(w.step_first());
        assert_eq!((w.top(), w.bottom()), (Some(3), Some(5)));
        let ell = 2;
        let mut w = RowWindow::new(1.0);
        for r in 1..=6 {
            w.step_second(&s, &DenseScan, r);
            if w.row_count() > ell + 1 {
                w.step_first();
            }
        }
        assert_eq!(w.stats().peak_rows, ell + 2);
        w.clear();
        assert!(w.is_empty());
        assert_eq!(w.stats().cells, 0);
    }

    #[test]
    fn col_labels_anchor_row_and_isolated_cells() {
        let s = store(&[&[(0.0, 0.0), (0.0, 0.0), (10.0, 0.0)]]);
        let mut st = ColState::new(s.len(), 1.0);
        st.anchor_at(&s, &DenseScan, 1);
        assert_eq!(st.get(1), Some(1));
        assert_eq!(st.get(2), Some(2));
        assert_eq!(st.get(3), None);
        st.step_second(&s, &DenseScan, 2);
        assert_eq!(st.get(2), Some(2));
        assert_eq!(st.get(1), Some(1));
        st.step_second(&s, &DenseScan, 3);
        assert_eq!(st.get(3), Some(2));
        assert_eq!(st.get(1), None);
    }
}
