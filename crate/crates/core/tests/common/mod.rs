#![allow(dead_code)]

use proptest::prelude::*;
use subtraj::{Point, Trajectory, TrajectoryStore};

pub type Instance = Vec<Vec<Point>>;

/// Up to `max_pieces` trajectories with at most `max_total` vertices in
/// total, integer coordinates in `[0, coord]^2`.
pub fn instance(max_pieces: usize, max_total: usize, coord: i32) -> impl Strategy<Value = Instance> {
    prop::collection::vec(
        prop::collection::vec((0..=coord, 0..=coord), 1..=max_total),
        1..=max_pieces,
    )
    .prop_map(move |pieces| {
        let mut left = max_total;
        let mut out = Vec::new();
        for p in pieces {
            if left == 0 {
                break;
            }
            let take = p.len().min(left);
            left -= take;
            out.push(p[..take].iter().map(|&(x, y)| Point::new(x as f64, y as f64)).collect());
        }
        out
    })
}

pub fn store_of(inst: &Instance) -> TrajectoryStore {
    let ts: Vec<Trajectory> = inst.iter().map(|t| Trajectory::new(t.clone()).unwrap()).collect();
    TrajectoryStore::concatenate(&ts).unwrap()
}

pub fn pair(s: &subtraj::SubtrajectoryRef) -> (usize, usize) {
    (s.start(), s.end())
}
