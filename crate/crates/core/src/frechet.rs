//! Discrete Fréchet distance by dynamic programming.
//!
//! Both routines keep a single rolling row of the `|P| x |Q|` table and
//! compare squared distances; only [`discrete_frechet`] takes a square root,
//! once, at the end.

use crate::error::{Error, Result};
use crate::trajectory::Point;

/// Exact discrete Fréchet distance between two non-empty point sequences.
pub fn discrete_frechet(p: &[Point], q: &[Point]) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut row = vec![0.0f64; q.len()];
    for (i, pi) in p.iter().enumerate() {
        let mut diag = 0.0f64;
        for (j, qj) in q.iter().enumerate() {
            let d = pi.dist_sq(qj);
            let best_prev = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => row[j - 1],
                (_, 0) => row[0],
                _ => diag.min(row[j]).min(row[j - 1]),
            };
            diag = row[j];
            row[j] = d.max(best_prev);
        }
    }
    Ok(row[q.len() - 1].sqrt())
}

/// Decides `discrete_frechet(p, q) <= delta` without computing the value.
pub fn frechet_leq(p: &[Point], q: &[Point], delta: f64) -> Result<bool> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidDelta(delta));
    }
    let d2 = delta * delta;
    let mut row = vec![false; q.len()];
    for (i, pi) in p.iter().enumerate() {
        let mut diag = false;
        let mut any = false;
        for (j, qj) in q.iter().enumerate() {
            let reach = match (i, j) {
                (0, 0) => true,
                (0, _) => row[j - 1],
                (_, 0) => row[0],
                _ => diag || row[j] || row[j - 1],
            };
            diag = row[j];
            row[j] = reach && pi.dist_sq(qj) <= d2;
            any |= row[j];
        }
        if !any {
            return Ok(false);
        }
    }
    Ok(row[q.len() - 1])
}
