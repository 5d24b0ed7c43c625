//! Greedy k-centre and k-means clustering on top of a candidate source.
//!
//! Each round asks the source for a candidate on the residual store (the
//! input minus everything covered so far), accepts it iff the cost strictly
//! drops, and cuts the accepted members out of the residual. Clusters are
//! stored in root-store coordinates.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::Cluster;
use crate::error::{Error, Result};
use crate::frechet::discrete_frechet;
use crate::psc::PscSolver;
use crate::range_index::RangeIndex;
use crate::sc::ScSolver;
use crate::score::{
    evaluation, level_score, score, Clustering, Objective, ScoreBreakdown, ScoringVector,
};
use crate::trajectory::{SubtrajectoryRef, TrajectoryStore};

/// Optional wall-clock limit shared by a run.
#[derive(Debug, Clone, Copy, Default)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn none() -> Self {
        Self(None)
    }

    pub fn after(limit: Duration) -> Self {
        Self(Some(Instant::now() + limit))
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }

    pub fn check(&self) -> Result<()> {
        if self.expired() {
            Err(Error::Timeout)
        } else {
            Ok(())
        }
    }
}

/// How a source ranks the clusters it could return.
#[derive(Debug, Clone, Copy)]
pub enum Pick {
    /// Most covered vertices.
    Coverage,
    /// Highest [`evaluation`] under the vector, over `total_vertices`.
    Evaluation { vector: ScoringVector, total_vertices: usize },
}

/// Produces one candidate cluster on a residual store at one threshold.
/// Returned intervals are in the coordinates of `residual`.
pub trait CandidateSource: Sync {
    fn candidate(&self, residual: &TrajectoryStore, delta: f64, pick: Pick, deadline: &Deadline) -> Result<Option<Cluster>>;
}

/// Max-cardinality cluster with a fixed centre length.
#[derive(Debug, Clone, Copy)]
pub struct ScEllSource {
    pub ell: usize,
}

/// Longest centre with a fixed cardinality.
#[derive(Debug, Clone, Copy)]
pub struct ScMSource {
    pub m: usize,
}

/// Best cluster of the approximate Pareto stream.
#[derive(Debug, Clone, Copy)]
pub struct PscSource;

impl CandidateSource for ScEllSource {
    fn candidate(&self, residual: &TrajectoryStore, delta: f64, _: Pick, deadline: &Deadline) -> Result<Option<Cluster>> {
        deadline.check()?;
        if residual.is_empty() {
            return Ok(None);
        }
        let index = RangeIndex::build(residual)?;
        ScSolver::new(residual, &index).max_cardinality(self.ell, delta)
    }
}

impl CandidateSource for ScMSource {
    fn candidate(&self, residual: &TrajectoryStore, delta: f64, _: Pick, deadline: &Deadline) -> Result<Option<Cluster>> {
        deadline.check()?;
        if residual.is_empty() {
            return Ok(None);
        }
        let index = RangeIndex::build(residual)?;
        ScSolver::new(residual, &index).max_length(self.m, delta)
    }
}

impl CandidateSource for PscSource {
    fn candidate(&self, residual: &TrajectoryStore, delta: f64, pick: Pick, deadline: &Deadline) -> Result<Option<Cluster>> {
        deadline.check()?;
        if residual.is_empty() {
            return Ok(None);
        }
        let solver = PscSolver::new(residual)?;
        best_of_stream(&solver, delta, pick, deadline)
    }
}

/// Any `Fn(residual, delta)`; handy for scripted tests.
pub struct FnSource<F>(pub F);

impl<F> CandidateSource for FnSource<F>
where
    F: Fn(&TrajectoryStore, f64) -> Option<Cluster> + Sync,
{
    fn candidate(&self, residual: &TrajectoryStore, delta: f64, _: Pick, _: &Deadline) -> Result<Option<Cluster>> {
        Ok((self.0)(residual, delta))
    }
}

const DEADLINE_POLL: usize = 1024;

/// Selects from one PSC stream. Evaluation ranking prunes candidates whose
/// optimistic evaluation (endpoint distances as lower bounds on the Fréchet
/// distances) cannot beat the best so far; ties keep the earliest emission.
pub fn best_of_stream(solver: &PscSolver<'_>, delta: f64, pick: Pick, deadline: &Deadline) -> Result<Option<Cluster>> {
    let store = solver.store();
    let mut best: Option<Cluster> = None;
    let mut best_key = f64::NEG_INFINITY;
    let mut cache: HashMap<(SubtrajectoryRef, SubtrajectoryRef), f64> = HashMap::new();
    let mut seen = 0usize;
    let mut timed_out = false;
    solver.stream(delta, |mut c| {
        seen += 1;
        if seen % DEADLINE_POLL == 0 && deadline.expired() {
            timed_out = true;
            return ControlFlow::Break(());
        }
        let cov = c.coverage();
        if cov == 0 {
            return ControlFlow::Continue(());
        }
        match pick {
            Pick::Coverage => {
                if cov as f64 > best_key {
                    best_key = cov as f64;
                    best = Some(c);
                }
            }
            Pick::Evaluation { vector: v, total_vertices } => {
                let gain = v.c3 * cov as f64 / total_vertices as f64;
                let centre = store.slice(&c.centre);
                let lower: Vec<f64> = c
                    .members
                    .iter()
                    .map(|m| {
                        let s = store.slice(m);
                        let first = centre[0].dist(&s[0]);
                        let last = centre[centre.len() - 1].dist(&s[s.len() - 1]);
                        first.max(last)
                    })
                    .collect();
                let mut rest: f64 = lower.iter().sum();
                if gain / (v.c1 + v.c2 * rest) <= best_key {
                    return ControlFlow::Continue(());
                }
                let mut exact = 0.0;
                let mut dist = Vec::with_capacity(c.members.len());
                for (m, lb) in c.members.iter().zip(&lower) {
                    let d = *cache
                        .entry((c.centre, *m))
                        .or_insert_with(|| discrete_frechet(centre, store.slice(m)).expect("non-empty"));
                    exact += d;
                    rest -= lb;
                    dist.push(d);
                    if gain / (v.c1 + v.c2 * (exact + rest.max(0.0))) <= best_key {
                        return ControlFlow::Continue(());
                    }
                }
                c.member_distances = Some(dist);
                let e = evaluation(&c, &v, total_vertices);
                if e > best_key {
                    best_key = e;
                    best = Some(c);
                }
            }
        }
        ControlFlow::Continue(())
    })?;
    if timed_out {
        return Err(Error::Timeout);
    }
    Ok(best)
}

/// Result of one greedy run.
#[derive(Debug, Clone)]
pub struct GreedyRun {
    pub clustering: Clustering,
    /// Cost after 0, 1, 2, ... accepted clusters, as used for acceptance.
    pub trace: Vec<f64>,
    /// Radius level of a k-centre run.
    pub delta: Option<f64>,
}

fn accept(root: &TrajectoryStore, residual: &mut TrajectoryStore, clustering: &mut Clustering, cand: Cluster) -> Result<()> {
    let mut rooted = cand.to_root(residual);
    rooted.ensure_distances(root);
    *residual = residual.remove_intervals(&cand.members)?;
    clustering.push(rooted)
}

/// Greedy k-centre at radius level `delta`. A candidate is accepted iff the
/// level cost (Fréchet term `c2 * delta` once non-empty) strictly drops.
pub fn greedy_k_centre(
    v: &ScoringVector,
    delta: f64,
    root: &TrajectoryStore,
    source: &dyn CandidateSource,
    deadline: &Deadline,
) -> Result<GreedyRun> {
    let x = root.len();
    let mut clustering = Clustering::new(x);
    let mut residual = root.clone();
    let mut current = level_score(0, x, x, v, delta)?.total;
    let mut trace = vec![current];
    while !residual.is_empty() {
        deadline.check()?;
        let Some(cand) = source.candidate(&residual, delta, Pick::Coverage, deadline)? else { break };
        let next = level_score(clustering.len() + 1, clustering.uncovered_count() - cand.coverage(), x, v, delta)?.total;
        if !(next < current) {
            break;
        }
        accept(root, &mut residual, &mut clustering, cand)?;
        current = next;
        trace.push(current);
    }
    Ok(GreedyRun { clustering, trace, delta: Some(delta) })
}

/// Greedy k-means. Each round queries every threshold of `grid` on the
/// residual, keeps the candidate of highest evaluation (first on ties) and
/// accepts it iff the score strictly drops.
pub fn greedy_k_means(
    v: &ScoringVector,
    grid: &[f64],
    root: &TrajectoryStore,
    source: &dyn CandidateSource,
    deadline: &Deadline,
) -> Result<GreedyRun> {
    let x = root.len();
    let pick = Pick::Evaluation { vector: *v, total_vertices: x };
    let mut clustering = Clustering::new(x);
    let mut residual = root.clone();
    let mut current = score(&clustering, v, Objective::KMeans)?.total;
    let mut trace = vec![current];
    while !residual.is_empty() {
        deadline.check()?;
        let found: Vec<Option<Cluster>> = grid
            .par_iter()
            .map(|&d| source.candidate(&residual, d, pick, deadline))
            .collect::<Result<_>>()?;
        let mut best: Option<(f64, Cluster)> = None;
        for mut c in found.into_iter().flatten() {
            c.ensure_distances(&residual);
            let e = evaluation(&c, v, x);
            if best.as_ref().map_or(true, |(be, _)| e > *be) {
                best = Some((e, c));
            }
        }
        let Some((_, cand)) = best else { break };
        let mut tentative = clustering.clone();
        let mut rooted = cand.to_root(&residual);
        rooted.ensure_distances(root);
        tentative.push(rooted)?;
        let next = score(&tentative, v, Objective::KMeans)?.total;
        if !(next < current) {
            break;
        }
        residual = residual.remove_intervals(&cand.members)?;
        clustering = tentative;
        current = next;
        trace.push(current);
    }
    Ok(GreedyRun { clustering, trace, delta: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Fixed centre length (edges), maximum cardinality.
    ScEll(usize),
    /// Fixed cardinality, maximum centre length.
    ScM(usize),
    Psc,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::ScEll(l) => write!(f, "SC-l-{l}"),
            Algorithm::ScM(m) => write!(f, "SC-m-{m}"),
            Algorithm::Psc => f.write_str("PSC"),
        }
    }
}

impl Algorithm {
    fn source(&self) -> Box<dyn CandidateSource> {
        match *self {
            Algorithm::ScEll(ell) => Box::new(ScEllSource { ell }),
            Algorithm::ScM(m) => Box::new(ScMSource { m }),
            Algorithm::Psc => Box::new(PscSource),
        }
    }
}

/// Thresholds `min, 2 min, 4 min, ...` up to `max`; at least `min` itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaSchedule {
    pub min: f64,
    pub max: f64,
}

impl DeltaSchedule {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min.is_finite()) {
            return Err(Error::InvalidDelta(min));
        }
        if !(max >= 0.0 && max.is_finite()) {
            return Err(Error::InvalidDelta(max));
        }
        Ok(Self { min, max })
    }

    /// Default schedule for a store: from 2 up to its bounding-box diagonal.
    pub fn for_store(store: &TrajectoryStore) -> Self {
        Self { min: 2.0, max: store.diameter_bound() }
    }

    pub fn levels(&self) -> Vec<f64> {
        let mut out = vec![self.min];
        let mut d = self.min * 2.0;
        while d <= self.max {
            out.push(d);
            d *= 2.0;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub algorithm: Algorithm,
    pub objective: Objective,
    pub vector: ScoringVector,
    pub schedule: DeltaSchedule,
}

/// Best clustering of a configuration with its reported cost.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub clustering: Clustering,
    pub breakdown: ScoreBreakdown,
    pub delta: Option<f64>,
    pub trace: Vec<f64>,
}

/// k-centre: one run per level, the cheapest (first on ties) wins.
/// k-means: a single run over all levels.
pub fn run_configuration(config: &Configuration, root: &TrajectoryStore, deadline: &Deadline) -> Result<Outcome> {
    let source = config.algorithm.source();
    let levels = config.schedule.levels();
    let v = &config.vector;
    match config.objective {
        Objective::KCentre => {
            let runs: Vec<GreedyRun> = levels
                .par_iter()
                .map(|&d| greedy_k_centre(v, d, root, source.as_ref(), deadline))
                .collect::<Result<_>>()?;
            let mut best: Option<Outcome> = None;
            for run in runs {
                let breakdown = score(&run.clustering, v, Objective::KCentre)?;
                if best.as_ref().map_or(true, |b| breakdown.total < b.breakdown.total) {
                    best = Some(Outcome { clustering: run.clustering, breakdown, delta: run.delta, trace: run.trace });
                }
            }
            Ok(best.expect("schedule has at least one level"))
        }
        Objective::KMeans => {
            let run = greedy_k_means(v, &levels, root, source.as_ref(), deadline)?;
            let breakdown = score(&run.clustering, v, Objective::KMeans)?;
            Ok(Outcome { clustering: run.clustering, breakdown, delta: None, trace: run.trace })
        }
    }
}
