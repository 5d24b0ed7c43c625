//! Slow reference implementations for tests.
//!
//! Nothing here shares code with the solvers except [`Point`]. Instances are
//! given as plain trajectory lists and indexed 1-based over their
//! concatenation, like the production store. Every entry point enforces a
//! hard size cap.

use std::collections::{BTreeMap, HashSet};

use crate::trajectory::Point;

pub const MATRIX_CAP: usize = 64;
pub const CARDINALITY_CAP: usize = 30;
pub const PARETO_CAP: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance of size {n} exceeds the oracle cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("interval [{0}, {1}] is not a valid boundary-free subtrajectory")]
    BadInterval(usize, usize),
}

fn check_cap(n: usize, cap: usize) -> Result<(), OracleError> {
    if n > cap {
        Err(OracleError::CapExceeded { n, cap })
    } else {
        Ok(())
    }
}

/// Concatenated vertices (index 0 unused) and, per index, the id of its
/// trajectory.
fn flatten(trajectories: &[Vec<Point>]) -> (Vec<Point>, Vec<usize>) {
    let mut pts = vec![Point::new(f64::NAN, f64::NAN)];
    let mut owner = vec![usize::MAX];
    for (t, tr) in trajectories.iter().enumerate() {
        for p in tr {
            pts.push(*p);
            owner.push(t);
        }
    }
    (pts, owner)
}

/// The full free-space matrix as an explicit digraph.
#[derive(Debug, Clone)]
pub struct ExplicitMatrix {
    n: usize,
    free: Vec<Vec<bool>>,
    owner: Vec<usize>,
}

impl ExplicitMatrix {
    pub fn new(trajectories: &[Vec<Point>], delta: f64) -> Result<Self, OracleError> {
        let (pts, owner) = flatten(trajectories);
        let n = pts.len() - 1;
        check_cap(n, MATRIX_CAP)?;
        let mut free = vec![vec![false; n + 1]; n + 1];
        for i in 1..=n {
            for j in 1..=n {
                let dx = pts[i].x - pts[j].x;
                let dy = pts[i].y - pts[j].y;
                free[i][j] = dx * dx + dy * dy <= delta * delta;
            }
        }
        Ok(Self { n, free, owner })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_free(&self, i: usize, j: usize) -> bool {
        (1..=self.n).contains(&i) && (1..=self.n).contains(&j) && self.free[i][j]
    }

    /// True iff `i` and `i + 1` lie on different input trajectories.
    pub fn is_boundary(&self, i: usize) -> bool {
        i >= 1 && i < self.n && self.owner[i] != self.owner[i + 1]
    }

    /// Out-neighbours of a free cell: one step up, left, or diagonally,
    /// into a free cell, never across a boundary edge.
    pub fn successors(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if !self.is_free(i, j) {
            return out;
        }
        for (di, dj) in [(1, 0), (0, 1), (1, 1)] {
            if i < 1 + di || j < 1 + dj {
                continue;
            }
            let (s, k) = (i - di, j - dj);
            if di == 1 && self.is_boundary(s) {
                continue;
            }
            if dj == 1 && self.is_boundary(k) {
                continue;
            }
            if self.is_free(s, k) {
                out.push((s, k));
            }
        }
        out
    }
}

/// Everything reachable from one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reach {
    /// `None` when the start cell is not free.
    pub min_row: Option<usize>,
    /// For each reachable row, the largest reachable column.
    pub landing: BTreeMap<usize, usize>,
    pub cells: HashSet<(usize, usize)>,
}

/// Depth-first search over the explicit digraph.
pub fn brute_reach(m: &ExplicitMatrix, from: (usize, usize)) -> Reach {
    let mut cells = HashSet::new();
    let mut landing = BTreeMap::new();
    if !m.is_free(from.0, from.1) {
        return Reach { min_row: None, landing, cells };
    }
    let mut stack = vec![from];
    cells.insert(from);
    while let Some((i, j)) = stack.pop() {
        let e = landing.entry(i).or_insert(j);
        *e = (*e).max(j);
        for nb in m.successors(i, j) {
            if cells.insert(nb) {
                stack.push(nb);
            }
        }
    }
    let min_row = landing.keys().next().copied();
    Reach { min_row, landing, cells }
}

/// Discrete Fréchet decision by a full boolean table.
pub fn frechet_within(p: &[Point], q: &[Point], delta: f64) -> bool {
    let close = |a: &Point, b: &Point| {
        let (dx, dy) = (a.x - b.x, a.y - b.y);
        dx * dx + dy * dy <= delta * delta
    };
    let mut ok = vec![vec![false; q.len()]; p.len()];
    for i in 0..p.len() {
        for j in 0..q.len() {
            let prior = if i == 0 && j == 0 {
                true
            } else {
                (i > 0 && ok[i - 1][j]) || (j > 0 && ok[i][j - 1]) || (i > 0 && j > 0 && ok[i - 1][j - 1])
            };
            ok[i][j] = prior && close(&p[i], &q[j]);
        }
    }
    ok[p.len() - 1][q.len() - 1]
}

struct Instance {
    pts: Vec<Point>,
    owner: Vec<usize>,
}

impl Instance {
    fn new(trajectories: &[Vec<Point>], cap: usize) -> Result<Self, OracleError> {
        let (pts, owner) = flatten(trajectories);
        check_cap(pts.len() - 1, cap)?;
        Ok(Self { pts, owner })
    }

    fn n(&self) -> usize {
        self.pts.len() - 1
    }

    fn valid(&self, a: usize, b: usize) -> bool {
        a >= 1 && a <= b && b <= self.n() && self.owner[a] == self.owner[b]
    }

    fn last_of_piece(&self, c: usize) -> usize {
        let mut d = c;
        while d < self.n() && self.owner[d + 1] == self.owner[c] {
            d += 1;
        }
        d
    }

    /// Every interval within `delta` of the centre, by one table per start.
    fn close_intervals(&self, a: usize, b: usize, delta: f64) -> Vec<(usize, usize)> {
        let centre = &self.pts[a..=b];
        let mut out = Vec::new();
        for c in 1..=self.n() {
            let e = self.last_of_piece(c);
            let cand = &self.pts[c..=e];
            let close = |p: &Point, q: &Point| {
                let (dx, dy) = (p.x - q.x, p.y - q.y);
                dx * dx + dy * dy <= delta * delta
            };
            let mut ok = vec![vec![false; cand.len()]; centre.len()];
            for i in 0..centre.len() {
                for j in 0..cand.len() {
                    let prior = if i == 0 && j == 0 {
                        true
                    } else {
                        (i > 0 && ok[i - 1][j])
                            || (j > 0 && ok[i][j - 1])
                            || (i > 0 && j > 0 && ok[i - 1][j - 1])
                    };
                    ok[i][j] = prior && close(&centre[i], &cand[j]);
                }
            }
            for (j, &hit) in ok[centre.len() - 1].iter().enumerate() {
                if hit {
                    out.push((c, c + j));
                }
            }
        }
        out
    }

    fn max_cardinality(&self, a: usize, b: usize, delta: f64) -> (usize, Vec<(usize, usize)>) {
        let mut iv = self.close_intervals(a, b, delta);
        iv.sort_by_key(|&(c, d)| (d, c));
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        for (c, d) in iv {
            if chosen.last().map_or(true, |&(_, e)| c > e) {
                chosen.push((c, d));
            }
        }
        (chosen.len(), chosen)
    }
}

/// Maximum number of disjoint intervals within `delta` of centre `[a, b]`,
/// with a witness, by earliest-right-endpoint scheduling.
pub fn brute_max_cardinality(
    trajectories: &[Vec<Point>],
    centre: (usize, usize),
    delta: f64,
) -> Result<(usize, Vec<(usize, usize)>), OracleError> {
    let inst = Instance::new(trajectories, CARDINALITY_CAP)?;
    let (a, b) = centre;
    if !inst.valid(a, b) {
        return Err(OracleError::BadInterval(a, b));
    }
    Ok(inst.max_cardinality(a, b, delta))
}

/// One centre and its best cardinality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentreCardinality {
    pub centre: (usize, usize),
    pub vertices: usize,
    pub cardinality: usize,
    pub members: Vec<(usize, usize)>,
}

/// Best cardinality of every boundary-free centre.
pub fn brute_all_centres(trajectories: &[Vec<Point>], delta: f64) -> Result<Vec<CentreCardinality>, OracleError> {
    let inst = Instance::new(trajectories, CARDINALITY_CAP)?;
    let n = inst.n();
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a..=inst.last_of_piece(a) {
            let (cardinality, members) = inst.max_cardinality(a, b, delta);
            out.push(CentreCardinality { centre: (a, b), vertices: b - a + 1, cardinality, members });
        }
    }
    Ok(out)
}

/// Pareto-maximal (vertex count, cardinality) pairs with one witness each,
/// ascending by vertex count.
pub fn brute_pareto_front(trajectories: &[Vec<Point>], delta: f64) -> Result<Vec<CentreCardinality>, OracleError> {
    let n: usize = trajectories.iter().map(Vec::len).sum();
    check_cap(n, PARETO_CAP)?;
    let all = brute_all_centres(trajectories, delta)?;
    let mut front: Vec<CentreCardinality> = Vec::new();
    for c in &all {
        let dominated = all.iter().any(|o| {
            o.vertices >= c.vertices
                && o.cardinality >= c.cardinality
                && (o.vertices > c.vertices || o.cardinality > c.cardinality)
        });
        let repeat = front.iter().any(|f| f.vertices == c.vertices && f.cardinality == c.cardinality);
        if !dominated && !repeat {
            front.push(c.clone());
        }
    }
    front.sort_by_key(|c| c.vertices);
    Ok(front)
}
