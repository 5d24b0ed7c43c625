use thiserror::Error;

use crate::trajectory::SubtrajectoryRef;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no trajectories given")]
    EmptyStore,
    #[error("trajectory has no vertices")]
    EmptyTrajectory,
    #[error("point sequence is empty")]
    EmptyInput,
    #[error("non-finite coordinate ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("interval [{a}, {b}] out of range for store of {n} vertices")]
    OutOfRange { a: usize, b: usize, n: usize },
    #[error("interval [{a}, {b}] crosses the boundary edge after vertex {at}")]
    BoundaryViolation { a: usize, b: usize, at: usize },
    #[error("intervals {first} and {second} overlap")]
    Overlapping { first: SubtrajectoryRef, second: SubtrajectoryRef },
    #[error("negative or non-finite distance threshold {0}")]
    InvalidDelta(f64),
    #[error("invalid scoring vector ({c1}, {c2}, {c3}): c1 must be > 0, c2 and c3 >= 0")]
    InvalidScoringVector { c1: f64, c2: f64, c3: f64 },
    #[error("score is undefined for a clustering over zero vertices")]
    UndefinedScore,
    #[error("time limit exceeded")]
    Timeout,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
