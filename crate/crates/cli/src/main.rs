use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use subtraj::{Algorithm, Objective, ScoringVector, TrajectoryStore};
use subtraj_cli::dataset::{load_dataset, write_dataset};
use subtraj_cli::experiment::{
    bench_sc_m, grid_algorithms, metrics_csv, metrics_table, run_experiment, scoring_vector_protocol, short_float,
    ExperimentConfig,
};
use subtraj_cli::synth::{generate_synthetic, road_network, RoadGrid};
use subtraj_cli::verify;

#[derive(Parser)]
#[command(name = "subtraj", version, about = "Subtrajectory clustering under the discrete Frechet distance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoKind {
    ScEll,
    ScM,
    Psc,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    KCentre,
    KMeans,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::KCentre => Objective::KCentre,
            ObjectiveArg::KMeans => Objective::KMeans,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    /// Random points of a square domain, each trajectory a short tour.
    Tsp,
    /// Noisy random walks on a street grid.
    Road,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Whitespace-separated `x y` lines, trajectories separated by blank lines.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value = "k-means")]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    /// Defaults to the number of trajectories.
    #[arg(long)]
    c3: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    delta_min: f64,
    /// Defaults to the bounding-box diagonal.
    #[arg(long)]
    delta_max: Option<f64>,
    /// Seconds; runs past this limit are reported as timeouts.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster one dataset with one configuration.
    Cluster {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        algo: AlgoKind,
        /// Centre length in edges, for `sc-ell`.
        #[arg(long)]
        ell: Option<usize>,
        /// Cluster size, for `sc-m`.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0.0003)]
        c2: f64,
    },
    /// Every grid algorithm under three scoring vectors `(c1, c2/10, c3)`,
    /// `(c1, c2, c3)` and `(c1, 10 c2, c3)`.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.0003)]
        c2: f64,
    },
    /// Write a synthetic dataset.
    Synth {
        #[arg(long, value_enum)]
        kind: SynthKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        trajectories: usize,
        /// Domain points for `tsp`, total vertices for `road`.
        #[arg(long, default_value_t = 1000)]
        size: usize,
        /// Percentage of the domain visited by each `tsp` trajectory.
        #[arg(long, default_value_t = 5.0)]
        c_percent: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the solvers with brute-force references on random inputs.
    Verify {
        /// Multiplies the default number of instances of every check.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Time the maximum-length solver for fixed cluster sizes.
    Bench {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 50.0)]
        delta: f64,
        #[arg(long, num_args = 1.., default_values_t = [2usize, 4, 8, 16, 20])]
        m: Vec<usize>,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Cluster { run, algo, ell, m, c2 } => {
            let algorithm = match algo {
                AlgoKind::ScEll => Algorithm::ScEll(ell.context("--ell is required for sc-ell")?),
                AlgoKind::ScM => Algorithm::ScM(m.context("--m is required for sc-m")?),
                AlgoKind::Psc => Algorithm::Psc,
            };
            let trajectories = load_dataset(&run.dataset)?;
            let vector = ScoringVector::new(run.c1, c2, run.c3.unwrap_or(trajectories.len() as f64))?;
            let objective = Objective::from(run.objective);
            fs::create_dir_all(&run.out_dir)?;
            let result = run_experiment(&config(&run, algorithm, vector), &trajectories)?;
            let stem = format!("{}_{}", algorithm, objective);
            if let Some(json) = &result.clustering {
                let path = run.out_dir.join(format!("{stem}.json"));
                fs::write(&path, serde_json::to_string_pretty(json)?)?;
                log::info!("clustering written to {}", path.display());
            }
            let rows = [result.row];
            fs::write(run.out_dir.join(format!("{stem}.csv")), metrics_csv(objective, &rows))?;
            print!("{}", metrics_table(objective, &rows));
        }
        Command::Sweep { run, c2 } => {
            let trajectories = load_dataset(&run.dataset)?;
            let objective = Objective::from(run.objective);
            fs::create_dir_all(&run.out_dir)?;
            let mut vectors = scoring_vector_protocol(trajectories.len(), c2)?;
            if run.c1 != 1.0 || run.c3.is_some() {
                for v in &mut vectors {
                    *v = ScoringVector::new(run.c1, v.c2, run.c3.unwrap_or(v.c3))?;
                }
            }
            for vector in vectors {
                let mut rows = Vec::new();
                for algorithm in grid_algorithms() {
                    log::info!("{algorithm} with c2 = {}", short_float(vector.c2));
                    let result = run_experiment(&config(&run, algorithm, vector), &trajectories)?;
                    if let Some(json) = &result.clustering {
                        let path = run.out_dir.join(format!("{algorithm}_{objective}_c2-{}.json", short_float(vector.c2)));
                        fs::write(path, serde_json::to_string_pretty(json)?)?;
                    }
                    rows.push(result.row);
                }
                let path = run.out_dir.join(format!("{objective}_c2-{}.csv", short_float(vector.c2)));
                fs::write(&path, metrics_csv(objective, &rows))?;
                println!("{}", metrics_table(objective, &rows));
            }
        }
        Command::Synth { kind, out, trajectories, size, c_percent, seed } => {
            let data = match kind {
                SynthKind::Tsp => generate_synthetic(size, trajectories, c_percent, seed),
                SynthKind::Road => road_network(trajectories, size, RoadGrid::default(), seed),
            };
            write_dataset(&out, &data).with_context(|| format!("writing {}", out.display()))?;
            let vertices: usize = data.iter().map(|t| t.len()).sum();
            log::info!("{} trajectories, {vertices} vertices written to {}", data.len(), out.display());
        }
        Command::Verify { scale, seed } => {
            let n = |base: usize| ((base as f64 * scale).ceil() as usize).max(1);
            let reports = [
                verify::check_frechet_reachability(n(1000), seed),
                verify::check_labels(n(200), 30, seed),
                verify::check_sc_optimality(n(200), 30, seed),
                verify::check_psc_two_approximation(n(100), 25, seed),
                verify::check_greedy_soundness(n(30), seed),
                verify::check_window_memory(n(100), seed),
            ];
            for r in &reports {
                println!("{}", r.summary());
            }
            if reports.iter().any(|r| !r.passed()) {
                bail!("verification failed");
            }
        }
        Command::Bench { dataset, delta, m } => bench(&dataset, delta, &m)?,
    }
    Ok(())
}

fn config(run: &RunArgs, algorithm: Algorithm, vector: ScoringVector) -> ExperimentConfig {
    ExperimentConfig {
        dataset: run.dataset.display().to_string(),
        algorithm,
        objective: run.objective.into(),
        vector,
        delta_min: run.delta_min,
        delta_max: run.delta_max,
        time_limit_secs: run.time_limit,
        seed: run.seed,
    }
}

fn bench(dataset: &Path, delta: f64, ms: &[usize]) -> Result<()> {
    let store = TrajectoryStore::concatenate(&load_dataset(dataset)?)?;
    println!("{:>8}  {:>8}  {:>8}  {:>6}  {:>4}  {:>8}", "Name", "Seconds", "GBytes", "Delta", "m", "Vertices");
    for &m in ms {
        let row = bench_sc_m(&store, delta, m)?;
        println!(
            "{:>8}  {:>8.3}  {:>8}  {:>6}  {:>4}  {:>8}",
            format!("SC-m-{m}"),
            row.seconds,
            row.gbytes.map_or("nan".into(), |g| format!("{g:.3}")),
            row.delta,
            row.m,
            row.centre_vertices.map_or("-".into(), |v| v.to_string()),
        );
    }
    Ok(())
}
