//! Subtrajectory clustering under the discrete Fréchet distance.
//!
//! Indices into a [`TrajectoryStore`] are 1-based and global over the
//! concatenation of all input trajectories. A centre `[a, b]` has length
//! `b - a`, counted in edges, so it has `b - a + 1` vertices.

pub mod cluster;
pub mod error;
pub mod frechet;
pub mod freespace;
pub mod greedy;
pub mod oracle;
pub mod psc;
pub mod range_index;
pub mod sc;
pub mod score;
pub mod trajectory;

pub use cluster::Cluster;
pub use error::{Error, Result};
pub use frechet::{discrete_frechet, frechet_leq};
pub use greedy::{run_configuration, Algorithm, Configuration, Deadline, DeltaSchedule, Outcome};
pub use psc::{psc_stream, PscSolver, PscStats};
pub use range_index::RangeIndex;
pub use sc::{sc_fixed, sc_max_cardinality, sc_max_length, ScSolver};
pub use score::{score, Clustering, Objective, ScoreBreakdown, ScoringVector};
pub use trajectory::{Origin, Point, SubtrajectoryRef, Trajectory, TrajectoryStore};
