//! One clustering run end to end: configuration, timing, metrics row and
//! the clustering artifact.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use subtraj::greedy::Deadline;
use subtraj::{
    run_configuration, Algorithm, Configuration, DeltaSchedule, Error, Objective, ScoreBreakdown, ScoringVector,
    Trajectory, TrajectoryStore,
};

use crate::memory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Free-form description of the input.
    pub dataset: String,
    pub algorithm: Algorithm,
    pub objective: Objective,
    pub vector: ScoringVector,
    pub delta_min: f64,
    /// Defaults to the bounding-box diagonal of the dataset.
    pub delta_max: Option<f64>,
    pub time_limit_secs: Option<f64>,
    pub seed: u64,
}

/// Interval of one input trajectory, with 0-based local indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalInterval {
    pub traj: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberJson {
    pub traj: usize,
    pub start: usize,
    pub end: usize,
    pub frechet: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterJson {
    pub centre: LocalInterval,
    pub delta: f64,
    pub members: Vec<MemberJson>,
    pub coverage: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringJson {
    pub config: ExperimentConfig,
    pub clusters: Vec<ClusterJson>,
    pub score_breakdown: ScoreBreakdown,
    pub runtime_seconds: f64,
}

/// One row of a metrics table. Aggregates over no clusters are `-inf`
/// (maxima) and `nan` (means).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub name: String,
    /// `None` marks a run that hit its time limit.
    pub outcome: Option<RowValues>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowValues {
    pub seconds: f64,
    pub gbytes: Option<f64>,
    pub vector: ScoringVector,
    pub clusters: usize,
    pub max_frechet: f64,
    pub avg_frechet: f64,
    pub score: f64,
    pub max_size: f64,
    pub avg_size: f64,
}

pub fn score_header(objective: Objective) -> &'static str {
    match objective {
        Objective::KCentre => "kCenters",
        Objective::KMeans => "kMeans",
    }
}

pub fn metrics_header(objective: Objective) -> [&'static str; 10] {
    [
        "Name",
        "Seconds",
        "GBytes",
        "c",
        "Clusters",
        "Max Frechet",
        "Avg Frechet",
        score_header(objective),
        "Max Size",
        "Avg Size",
    ]
}

/// Float in the short style `1.0`, `0.0003`, `3e-05`.
pub fn short_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x:?}")
    } else {
        let s = format!("{x:e}");
        let (mant, exp) = s.split_once('e').unwrap();
        let (sign, digits) = exp.strip_prefix('-').map_or(("+", exp), |d| ("-", d));
        format!("{mant}e{sign}{digits:0>2}")
    }
}

pub fn format_vector(v: &ScoringVector) -> String {
    let c3 = if v.c3.fract() == 0.0 && v.c3.abs() < 1e15 { format!("{}", v.c3 as i64) } else { short_float(v.c3) };
    format!("({}, {}, {})", short_float(v.c1), short_float(v.c2), c3)
}

fn fixed2(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.2}")
    }
}

impl MetricsRow {
    pub fn timeout(name: impl Into<String>) -> Self {
        Self { name: name.into(), outcome: None }
    }

    pub fn cells(&self) -> Vec<String> {
        let Some(v) = &self.outcome else {
            let mut c = vec![self.name.clone()];
            c.extend(std::iter::repeat("---".to_string()).take(9));
            return c;
        };
        let max_size = if v.max_size == f64::NEG_INFINITY { "-inf".into() } else { format!("{}", v.max_size) };
        vec![
            self.name.clone(),
            format!("{:.2}", v.seconds),
            v.gbytes.map_or("nan".into(), |g| format!("{g:.2}")),
            format_vector(&v.vector),
            v.clusters.to_string(),
            fixed2(v.max_frechet),
            fixed2(v.avg_frechet),
            format!("{:.2}", v.score),
            max_size,
            fixed2(v.avg_size),
        ]
    }

    /// Fields derived from a clustering artifact.
    pub fn from_clustering(name: &str, seconds: f64, gbytes: Option<f64>, c: &ClusteringJson) -> Self {
        let dists: Vec<f64> = c.clusters.iter().flat_map(|k| k.members.iter().map(|m| m.frechet)).collect();
        let sizes: Vec<f64> = c.clusters.iter().map(|k| k.members.len() as f64).collect();
        let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
        let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            name: name.to_string(),
            outcome: Some(RowValues {
                seconds,
                gbytes,
                vector: c.config.vector,
                clusters: c.clusters.len(),
                max_frechet: max(&dists),
                avg_frechet: mean(&dists),
                score: c.score_breakdown.total,
                max_size: max(&sizes),
                avg_size: mean(&sizes),
            }),
        }
    }
}

/// CSV text of a metrics table.
pub fn metrics_csv(objective: Objective, rows: &[MetricsRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(metrics_header(objective)).unwrap();
    for r in rows {
        w.write_record(r.cells()).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// The same table as aligned plain text.
pub fn metrics_table(objective: Objective, rows: &[MetricsRow]) -> String {
    let mut all: Vec<Vec<String>> = vec![metrics_header(objective).iter().map(|s| s.to_string()).collect()];
    all.extend(rows.iter().map(MetricsRow::cells));
    let widths: Vec<usize> = (0..10).map(|k| all.iter().map(|r| r[k].len()).max().unwrap()).collect();
    let mut s = String::new();
    for r in &all {
        let line: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        writeln!(s, "{}", line.join("  ").trim_end()).unwrap();
    }
    s
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub row: MetricsRow,
    /// Absent on timeout.
    pub clustering: Option<ClusteringJson>,
}

/// Runs one configuration under its time limit.
pub fn run_experiment(config: &ExperimentConfig, trajectories: &[Trajectory]) -> subtraj::Result<ExperimentResult> {
    let store = TrajectoryStore::concatenate(trajectories)?;
    let delta_max = config.delta_max.unwrap_or_else(|| store.diameter_bound());
    let schedule = DeltaSchedule::new(config.delta_min, delta_max)?;
    let cfg = Configuration { algorithm: config.algorithm, objective: config.objective, vector: config.vector, schedule };
    let deadline = config.time_limit_secs.map_or(Deadline::none(), |s| Deadline::after(Duration::from_secs_f64(s)));
    let name = config.algorithm.to_string();

    memory::reset_peak();
    let start = Instant::now();
    let outcome = match run_configuration(&cfg, &store, &deadline) {
        Ok(o) => o,
        Err(Error::Timeout) => return Ok(ExperimentResult { row: MetricsRow::timeout(name), clustering: None }),
        Err(e) => return Err(e),
    };
    let seconds = start.elapsed().as_secs_f64();
    let gbytes = memory::peak_bytes().map(|b| b as f64 / 1e9);

    let local = |s: &subtraj::SubtrajectoryRef| {
        let (a, b) = (store.origin(s.start()), store.origin(s.end()));
        (a.trajectory, a.local, b.local)
    };
    let clusters = outcome
        .clustering
        .clusters()
        .iter()
        .map(|c| {
            let (traj, start, end) = local(&c.centre);
            let dist = c.member_distances.as_ref().expect("accepted clusters carry distances");
            ClusterJson {
                centre: LocalInterval { traj, start, end },
                delta: c.delta,
                members: c
                    .members
                    .iter()
                    .zip(dist)
                    .map(|(m, &frechet)| {
                        let (traj, start, end) = local(m);
                        MemberJson { traj, start, end, frechet }
                    })
                    .collect(),
                coverage: c.coverage(),
            }
        })
        .collect();
    let json = ClusteringJson {
        config: config.clone(),
        clusters,
        score_breakdown: outcome.breakdown,
        runtime_seconds: seconds,
    };
    let row = MetricsRow::from_clustering(&name, seconds, gbytes, &json);
    Ok(ExperimentResult { row, clustering: Some(json) })
}

/// `(1, 0.1 b, t)`, `(1, b, t)`, `(1, 10 b, t)` for `t` trajectories.
pub fn scoring_vector_protocol(trajectory_count: usize, base_c2: f64) -> subtraj::Result<[ScoringVector; 3]> {
    let c3 = trajectory_count as f64;
    if !(base_c2 > 0.0) {
        return Err(Error::InvalidScoringVector { c1: 1.0, c2: base_c2, c3 });
    }
    // round away the binary noise of scaling by ten
    let tidy = |x: f64| format!("{x:.12e}").parse::<f64>().expect("formatted float");
    Ok([
        ScoringVector::new(1.0, tidy(base_c2 / 10.0), c3)?,
        ScoringVector::new(1.0, base_c2, c3)?,
        ScoringVector::new(1.0, tidy(base_c2 * 10.0), c3)?,
    ])
}

/// Centre lengths and cardinalities of the standard grid.
pub const GRID_ELLS: [usize; 5] = [4, 8, 16, 32, 64];
pub const GRID_MS: [usize; 4] = [2, 4, 8, 16];

pub fn grid_algorithms() -> Vec<Algorithm> {
    let mut v: Vec<Algorithm> = GRID_ELLS.iter().map(|&l| Algorithm::ScEll(l)).collect();
    v.extend(GRID_MS.iter().map(|&m| Algorithm::ScM(m)));
    v.push(Algorithm::Psc);
    v
}

/// Timing of one `SC(m, max, delta)` call.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub seconds: f64,
    pub gbytes: Option<f64>,
    pub delta: f64,
    pub m: usize,
    pub centre_vertices: Option<usize>,
    pub peak_rows: usize,
}

pub fn bench_sc_m(store: &TrajectoryStore, delta: f64, m: usize) -> subtraj::Result<BenchRow> {
    memory::reset_peak();
    let start = Instant::now();
    let index = subtraj::RangeIndex::build(store)?;
    let mut solver = subtraj::ScSolver::new(store, &index);
    let found = solver.max_length(m, delta)?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(BenchRow {
        seconds,
        gbytes: memory::peak_bytes().map(|b| b as f64 / 1e9),
        delta,
        m,
        centre_vertices: found.map(|c| c.centre_vertices()),
        peak_rows: solver.stats().peak_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_floats() {
        assert_eq!(short_float(1.0), "1.0");
        assert_eq!(short_float(3e-5), "3e-05");
        assert_eq!(short_float(3e-4), "0.0003");
        assert_eq!(short_float(0.003), "0.003");
        assert_eq!(format_vector(&ScoringVector::new(1.0, 3e-5, 128.0).unwrap()), "(1.0, 3e-05, 128)");
    }

    #[test]
    fn protocol_vectors() {
        let v = scoring_vector_protocol(128, 3e-4).unwrap();
        assert_eq!(v.map(|x| format_vector(&x)), ["(1.0, 3e-05, 128)", "(1.0, 0.0003, 128)", "(1.0, 0.003, 128)"]);
        assert_eq!(scoring_vector_protocol(50, 1.0).unwrap()[0].c3, 50.0);
        let mid = scoring_vector_protocol(7, 0.25).unwrap()[1];
        assert_eq!((mid.c1, mid.c2, mid.c3), (1.0, 0.25, 7.0));
        assert!(scoring_vector_protocol(7, 0.0).is_err());
    }

    #[test]
    fn timeout_row() {
        let r = MetricsRow::timeout("SC-l-4");
        assert_eq!(r.cells()[1..], vec!["---"; 9][..]);
    }
}
