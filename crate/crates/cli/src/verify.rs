//! Randomised comparisons of the solvers against the brute-force oracle.
//!
//! Each check draws its own instances from a seeded generator and returns a
//! report instead of panicking, so both the `verify` command and the
//! acceptance tests can print one line per check.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subtraj::freespace::{is_free, ColState, RowWindow};
use subtraj::oracle::{brute_all_centres, brute_reach, ExplicitMatrix, Reach};
use subtraj::{
    frechet_leq, psc_stream, run_configuration, Algorithm, Configuration, Deadline, DeltaSchedule, Objective, Point,
    RangeIndex, ScSolver, ScoringVector, SubtrajectoryRef, Trajectory, TrajectoryStore,
};

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    pub comparisons: u64,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, comparisons: 0, failures: Vec::new(), elapsed: Duration::ZERO }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 20 {
            self.failures.push(msg);
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "{} {}: {} cases, {} comparisons, {:.2}s{}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.comparisons,
            self.elapsed.as_secs_f64(),
            self.failures.first().map(|f| format!(" (first failure: {f})")).unwrap_or_default()
        )
    }
}

type Instance = Vec<Vec<Point>>;

/// `total` vertices split into up to `max_pieces` trajectories, each at most
/// `max_len` long, with integer coordinates in `[0, coord]^2`.
pub fn random_instance(rng: &mut impl Rng, total: usize, max_pieces: usize, max_len: usize, coord: i32) -> Instance {
    let mut out = Vec::new();
    let mut left = total;
    while left > 0 && out.len() < max_pieces {
        let cap = left.min(max_len);
        let len = if out.len() + 1 == max_pieces { cap } else { rng.gen_range(1..=cap) };
        out.push(
            (0..len)
                .map(|_| Point::new(rng.gen_range(0..=coord) as f64, rng.gen_range(0..=coord) as f64))
                .collect(),
        );
        left -= len;
    }
    out
}

pub fn store_of(inst: &Instance) -> TrajectoryStore {
    let ts: Vec<Trajectory> = inst.iter().map(|t| Trajectory::new(t.clone()).expect("finite")).collect();
    TrajectoryStore::concatenate(&ts).expect("non-empty")
}

const DELTAS: [f64; 8] = [0.0, 1.0, std::f64::consts::SQRT_2, 2.0, 2.5, 3.0, 4.0, 6.0];

fn reach_table(inst: &Instance, delta: f64) -> HashMap<(usize, usize), Reach> {
    let m = ExplicitMatrix::new(inst, delta).expect("within cap");
    let mut out = HashMap::new();
    for i in 1..=m.len() {
        for j in 1..=m.len() {
            out.insert((i, j), brute_reach(&m, (i, j)));
        }
    }
    out
}

fn intervals(store: &TrajectoryStore) -> Vec<SubtrajectoryRef> {
    let mut v = Vec::new();
    for a in 1..=store.len() {
        for b in a..=store.segment_end(a) {
            v.push(store.subtrajectory(a, b).unwrap());
        }
    }
    v
}

/// Decision procedure against path existence in the explicit digraph, for
/// every pair of subtrajectories.
pub fn check_frechet_reachability(instances: usize, seed: u64) -> CheckReport {
    let t0 = Instant::now();
    let mut rep = CheckReport::new("frechet/reachability equivalence");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let pieces = rng.gen_range(1..=2);
        let total = rng.gen_range(1..=12 * pieces);
        let inst = random_instance(&mut rng, total, pieces, 12, 8);
        let delta = *DELTAS.choose(&mut rng).unwrap();
        let store = store_of(&inst);
        let table = reach_table(&inst, delta);
        let ivs = intervals(&store);
        for p in &ivs {
            for q in &ivs {
                let leq = frechet_leq(store.slice(p), store.slice(q), delta).unwrap();
                let path = table[&(p.end(), q.end())].cells.contains(&(p.start(), q.start()));
                rep.comparisons += 1;
                if leq != path {
                    rep.fail(format!("{inst:?} delta {delta}: {p} vs {q}: decision {leq}, path {path}"));
                }
            }
        }
        rep.cases += 1;
    }
    rep.elapsed = t0.elapsed();
    rep
}

/// Window reach labels and column labels against explicit search at every
/// sweep step.
pub fn check_labels(instances: usize, n: usize, seed: u64) -> CheckReport {
    let t0 = Instant::now();
    let mut rep = CheckReport::new("window and column labels");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let pieces = rng.gen_range(1..=3);
        let inst = random_instance(&mut rng, n, pieces, n, 8);
        let delta = DELTAS[rng.gen_range(1..DELTAS.len())];
        let store = store_of(&inst);
        let table = reach_table(&inst, delta);
        let index = RangeIndex::build(&store).unwrap();
        let mut failures: Vec<String> = Vec::new();
        let mut comparisons = 0u64;
        {
            let mut observe = |w: &RowWindow| {
                let Some(top) = w.top() else { return };
                for r in top..=w.bottom().unwrap() {
                    for j in 1..=store.len() {
                        let want = table[&(r, j)].min_row.map(|m| m.max(top) as u32);
                        comparisons += 1;
                        if w.reach(r, j) != want {
                            failures.push(format!("delta {delta}: window top {top}, cell ({r}, {j})"));
                        }
                    }
                }
            };
            for ell in [0, 1, 2, 3, 5, 8] {
                ScSolver::new(&store, &index).with_observer(&mut observe).max_cardinality(ell, delta).unwrap();
            }
            for m in 1..=3 {
                ScSolver::new(&store, &index).with_observer(&mut observe).max_length(m, delta).unwrap();
            }
        }
        let mut st = ColState::new(store.len(), delta);
        for a in 1..=store.len() {
            st.anchor_at(&store, &index, a);
            for c in a..=store.segment_end(a) {
                if c > a {
                    st.step_second(&store, &index, c);
                }
                for y in 1..=store.len() {
                    let want = table[&(c, y)].landing.get(&a).map(|&j| j as u32);
                    comparisons += 1;
                    if st.get(y) != want {
                        failures.push(format!("delta {delta}: anchor {a}, cell ({c}, {y})"));
                    }
                }
            }
        }
        rep.comparisons += comparisons;
        for f in failures {
            rep.fail(format!("{inst:?} {f}"));
        }
        rep.cases += 1;
    }
    rep.elapsed = t0.elapsed();
    rep
}

/// SC variants against exhaustive centre enumeration.
pub fn check_sc_optimality(instances: usize, max_n: usize, seed: u64) -> CheckReport {
    let t0 = Instant::now();
    let mut rep = CheckReport::new("SC optimality");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let n = rng.gen_range(max_n / 3..=max_n).max(1);
        let pieces = rng.gen_range(1..=3);
        let inst = random_instance(&mut rng, n, pieces, n, 8);
        let store = store_of(&inst);
        let mut deltas = DELTAS[1..].to_vec();
        deltas.shuffle(&mut rng);
        for &delta in &deltas[..3] {
            let all = brute_all_centres(&inst, delta).unwrap();
            let longest = all.iter().map(|c| c.vertices - 1).max().unwrap();
            for ell in 0..=longest {
                let best = all.iter().filter(|c| c.vertices == ell + 1).map(|c| c.cardinality).max();
                let got = subtraj::sc_max_cardinality(ell, delta, &store).unwrap();
                rep.comparisons += 1;
                if got.as_ref().map(|c| c.cardinality()) != best {
                    rep.fail(format!("{inst:?} delta {delta} ell {ell}: got {:?}, want {best:?}", got.map(|c| c.cardinality())));
                }
            }
            for m in 1..=6 {
                let best = all.iter().filter(|c| c.cardinality >= m).map(|c| c.vertices - 1).max();
                let got = subtraj::sc_max_length(m, delta, &store).unwrap();
                rep.comparisons += 1;
                if got.as_ref().map(|c| c.centre.len()) != best {
                    rep.fail(format!("{inst:?} delta {delta} m {m}: got {:?}, want {best:?}", got.map(|c| c.centre.len())));
                }
            }
        }
        rep.cases += 1;
    }
    rep.elapsed = t0.elapsed();
    rep
}

/// Every centre's best cardinality is dominated by a streamed cluster with
/// at least half as many centre vertices.
pub fn check_psc_two_approximation(instances: usize, max_n: usize, seed: u64) -> CheckReport {
    let t0 = Instant::now();
    let mut rep = CheckReport::new("PSC 2-approximation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let n = rng.gen_range(max_n / 3..=max_n).max(1);
        let pieces = rng.gen_range(1..=3);
        let inst = random_instance(&mut rng, n, pieces, n, 8);
        let store = store_of(&inst);
        for _ in 0..2 {
            let delta = *DELTAS.choose(&mut rng).unwrap();
            let mut stream: Vec<(usize, usize)> = Vec::new();
            psc_stream(delta, &store, |c| {
                stream.push((c.centre_vertices(), c.cardinality()));
                ControlFlow::Continue(())
            })
            .unwrap();
            for cc in brute_all_centres(&inst, delta).unwrap() {
                rep.comparisons += 1;
                let ok = stream.iter().any(|&(v, m)| m >= cc.cardinality && cc.vertices <= 2 * v);
                if !ok {
                    rep.fail(format!("{inst:?} delta {delta}: centre {:?} with {} members", cc.centre, cc.cardinality));
                }
            }
        }
        rep.cases += 1;
    }
    rep.elapsed = t0.elapsed();
    rep
}

/// Score trace, global disjointness and coverage bookkeeping of every
/// configuration on random inputs.
pub fn check_greedy_soundness(instances: usize, seed: u64) -> CheckReport {
    let t0 = Instant::now();
    let mut rep = CheckReport::new("greedy soundness");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let pieces = rng.gen_range(2..=6);
        let n = rng.gen_range(10..=60);
        let inst = random_instance(&mut rng, n, pieces, 20, 20);
        let store = store_of(&inst);
        let vector = ScoringVector::new(1.0, [0.01, 0.1, 1.0][rng.gen_range(0..3)], inst.len() as f64).unwrap();
        let schedule = DeltaSchedule::new(1.0, 32.0).unwrap();
        for algorithm in [Algorithm::ScEll(2), Algorithm::ScEll(4), Algorithm::ScM(2), Algorithm::ScM(3), Algorithm::Psc] {
            for objective in [Objective::KCentre, Objective::KMeans] {
                let cfg = Configuration { algorithm, objective, vector, schedule };
                let out = run_configuration(&cfg, &store, &Deadline::none()).unwrap();
                rep.comparisons += 1;
                if let Err(e) = greedy_invariants(&store, &vector, objective, &out) {
                    rep.fail(format!("{inst:?} {algorithm} {objective}: {e}"));
                }
            }
        }
        rep.cases += 1;
    }
    rep.elapsed = t0.elapsed();
    rep
}

/// Checks the invariants of one greedy outcome.
pub fn greedy_invariants(
    store: &TrajectoryStore,
    vector: &ScoringVector,
    objective: Objective,
    out: &subtraj::Outcome,
) -> Result<(), String> {
    if let Some(w) = out.trace.windows(2).find(|w| w[1] >= w[0]) {
        return Err(format!("trace not strictly decreasing at {w:?}"));
    }
    let mut all: Vec<SubtrajectoryRef> = out.clustering.clusters().iter().flat_map(|c| c.members.clone()).collect();
    all.sort();
    if let Some(w) = all.windows(2).find(|w| w[0].end() >= w[1].start()) {
        return Err(format!("members {} and {} overlap", w[0], w[1]));
    }
    if let Some(m) = all.iter().find(|m| m.end() > store.segment_end(m.start())) {
        return Err(format!("member {m} crosses a trajectory boundary"));
    }
    let recount = out.clustering.recount_covered();
    if recount != out.clustering.covered_count() {
        return Err(format!("covered count {} but recount {recount}", out.clustering.covered_count()));
    }
    let fresh = subtraj::score(&out.clustering, vector, objective).map_err(|e| e.to_string())?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
    if !(close(fresh.total, out.breakdown.total) && close(fresh.uncovered_term, out.breakdown.uncovered_term)) {
        return Err(format!("reported {:?} but recomputed {fresh:?}", out.breakdown));
    }
    for c in out.clustering.clusters() {
        for m in &c.members {
            if !frechet_leq(store.slice(&c.centre), store.slice(m), c.delta).unwrap() {
                return Err(format!("member {m} is not within {} of centre {}", c.delta, c.centre));
            }
        }
    }
    Ok(())
}

/// Stored rows and cells of every SC sweep against the windowing bounds.
pub fn check_window_memory(instances: usize, seed: u64) -> CheckReport {
    let t0 = Instant::now();
    let mut rep = CheckReport::new("windowing memory");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let pieces = rng.gen_range(1..=5);
        let n = rng.gen_range(10..=80);
        let inst = random_instance(&mut rng, n, pieces, 40, 12);
        let store = store_of(&inst);
        let index = RangeIndex::build(&store).unwrap();
        let delta = [1.0, 2.0, 4.0, 8.0][rng.gen_range(0..4)];
        let failures = std::cell::RefCell::new(Vec::new());
        let mut steps = 0u64;
        {
            let mut observe = |w: &RowWindow, bound: Option<usize>| {
                steps += 1;
                let Some(top) = w.top() else { return };
                let bottom = w.bottom().unwrap();
                let rows = w.row_count();
                let free: usize = (top..=bottom)
                    .map(|r| (1..=store.len()).filter(|&j| is_free(&store, r, j, delta)).count())
                    .sum();
                if w.stats().cells > free {
                    failures.borrow_mut().push(format!("{} stored cells exceed {free} free cells", w.stats().cells));
                }
                if rows != bottom - top + 1 {
                    failures.borrow_mut().push(format!("{rows} rows stored for window [{top}, {bottom}]"));
                }
                if let Some(ell) = bound {
                    if rows > ell + 1 {
                        failures.borrow_mut().push(format!("{rows} rows stored for centre length {ell}"));
                    }
                }
            };
            for ell in 0..8 {
                let mut s = ScSolver::new(&store, &index).with_observer(|w| observe(w, Some(ell)));
                s.max_cardinality(ell, delta).unwrap();
                let peak = s.stats().peak_rows;
                drop(s);
                if peak > ell + 1 {
                    failures.borrow_mut().push(format!("max-cardinality peak {peak} rows for length {ell}"));
                }
                let mut s = ScSolver::new(&store, &index).with_observer(|w| observe(w, Some(ell)));
                s.fixed(2, ell, delta).unwrap();
                let peak = s.stats().peak_rows;
                drop(s);
                if peak > ell + 1 {
                    failures.borrow_mut().push(format!("fixed peak {peak} rows for length {ell}"));
                }
            }
            for m in 1..=4 {
                let mut s = ScSolver::new(&store, &index).with_observer(|w| observe(w, None));
                let found = s.max_length(m, delta).unwrap();
                let peak = s.stats().peak_rows;
                drop(s);
                let ell = found.map_or(0, |c| c.centre.len());
                if peak > ell + 2 {
                    failures.borrow_mut().push(format!("max-length peak {peak} rows for result length {ell}"));
                }
            }
        }
        rep.comparisons += steps;
        for f in failures.into_inner() {
            rep.fail(format!("{inst:?} delta {delta}: {f}"));
        }
        rep.cases += 1;
    }
    rep.elapsed = t0.elapsed();
    rep
}
