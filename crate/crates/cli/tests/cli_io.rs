use std::process::Command;

use subtraj::{Algorithm, Objective, ScoringVector, Trajectory};
use subtraj_cli::dataset::{load_dataset, parse_dataset, write_dataset};
use subtraj_cli::experiment::{metrics_csv, run_experiment, ClusteringJson, ExperimentConfig, MetricsRow};
use subtraj_cli::synth::{generate_synthetic, road_network, RoadGrid};

fn road() -> Vec<Trajectory> {
    road_network(128, 2840, RoadGrid::default(), 7)
}

fn small() -> Vec<Trajectory> {
    road_network(40, 800, RoadGrid::default(), 3)
}

fn config(algorithm: Algorithm, objective: Objective, c2: f64) -> ExperimentConfig {
    ExperimentConfig {
        dataset: "road".into(),
        algorithm,
        objective,
        vector: ScoringVector::new(1.0, c2, 128.0).unwrap(),
        delta_min: 2.0,
        delta_max: None,
        time_limit_secs: None,
        seed: 0,
    }
}

fn normalized(mut j: ClusteringJson) -> String {
    j.runtime_seconds = 0.0;
    serde_json::to_string(&j).unwrap()
}

#[test]
fn dataset_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.txt");
    for data in [generate_synthetic(200, 9, 50.0, 1), road_network(12, 300, RoadGrid::default(), 2)] {
        write_dataset(&path, &data).unwrap();
        assert_eq!(load_dataset(&path).unwrap(), data);
    }
}

#[test]
fn malformed_lines_are_reported_with_their_number() {
    let err = parse_dataset("1 2\n3 4\n\n5 six\n").unwrap_err().to_string();
    assert!(err.contains("line 4"), "{err}");
    assert!(parse_dataset("1 nan\n").is_err());
    assert!(parse_dataset("\n\n").is_err());
    assert!(load_dataset("/nonexistent/file").is_err());
}

#[test]
fn runs_are_deterministic_up_to_runtime() {
    let data = small();
    for (algorithm, objective) in [
        (Algorithm::ScEll(8), Objective::KCentre),
        (Algorithm::ScM(4), Objective::KMeans),
        (Algorithm::Psc, Objective::KCentre),
    ] {
        let mut cfg = config(algorithm, objective, 3e-4);
        cfg.delta_max = Some(512.0);
        let a = run_experiment(&cfg, &data).unwrap().clustering.unwrap();
        let b = run_experiment(&cfg, &data).unwrap().clustering.unwrap();
        assert_eq!(normalized(a), normalized(b), "{algorithm} {objective}");
    }
}

#[test]
fn metrics_row_is_recomputable_from_the_artifact() {
    let data = small();
    let mut cfg = config(Algorithm::ScEll(8), Objective::KMeans, 3e-4);
    cfg.vector = ScoringVector::new(1.0, 3e-4, 40.0).unwrap();
    let res = run_experiment(&cfg, &data).unwrap();
    let json = res.clustering.unwrap();
    let text = serde_json::to_string(&json).unwrap();
    let back: ClusteringJson = serde_json::from_str(&text).unwrap();
    let values = res.row.outcome.as_ref().unwrap();
    let again = MetricsRow::from_clustering(&res.row.name, values.seconds, values.gbytes, &back);
    assert_eq!(again.cells(), res.row.cells());
    assert!(!json.clusters.is_empty());
    let covered: usize = json.clusters.iter().map(|c| c.coverage).sum();
    let expected_unc = 40.0 * (800 - covered) as f64 / 800.0;
    assert!((json.score_breakdown.uncovered_term - expected_unc).abs() < 1e-9);
    for c in &json.clusters {
        assert!(c.members.iter().all(|m| m.frechet <= c.delta));
    }
}

#[test]
fn empty_clustering_reports_the_uncovered_baseline() {
    let data = road();
    let res = run_experiment(&config(Algorithm::ScEll(64), Objective::KMeans, 3e-5), &data).unwrap();
    let cells = res.row.cells();
    assert_eq!(cells[0], "SC-l-64");
    assert_eq!(cells[3], "(1.0, 3e-05, 128)");
    assert_eq!(&cells[4..], ["0", "-inf", "nan", "128.00", "-inf", "nan"]);
    let csv = metrics_csv(Objective::KMeans, &[res.row]);
    assert!(csv.starts_with("Name,Seconds,GBytes,c,Clusters,Max Frechet,Avg Frechet,kMeans,Max Size,Avg Size\n"));
}

#[test]
fn exceeded_time_limit_gives_a_timeout_row() {
    let data = road();
    let mut cfg = config(Algorithm::Psc, Objective::KMeans, 3e-5);
    cfg.time_limit_secs = Some(0.0);
    let res = run_experiment(&cfg, &data).unwrap();
    assert!(res.clustering.is_none());
    assert_eq!(res.row.cells(), ["PSC", "---", "---", "---", "---", "---", "---", "---", "---", "---"]);
}

#[test]
fn command_line_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("road.txt");
    let bin = env!("CARGO_BIN_EXE_subtraj");
    let ok = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let data_s = data.to_str().unwrap();
    let out_s = dir.path().to_str().unwrap();
    ok(&["synth", "--kind", "road", "--trajectories", "20", "--size", "400", "--out", data_s]);
    assert_eq!(load_dataset(&data).unwrap().len(), 20);

    let table = ok(&["cluster", "--dataset", data_s, "--algo", "sc-ell", "--ell", "4", "--objective", "k-centre", "--out-dir", out_s]);
    assert!(table.contains("kCenters") && table.contains("SC-l-4"), "{table}");
    let json: ClusteringJson =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("SC-l-4_k-centre.json")).unwrap()).unwrap();
    assert_eq!(json.config.algorithm, Algorithm::ScEll(4));
    assert!(dir.path().join("SC-l-4_k-centre.csv").exists());

    let bad = Command::new(bin).args(["cluster", "--dataset", data_s, "--algo", "sc-m"]).output().unwrap();
    assert!(!bad.status.success());
    let missing = Command::new(bin).args(["cluster", "--dataset", "/nonexistent", "--algo", "psc"]).output().unwrap();
    assert!(!missing.status.success());

    let bench = ok(&["bench", "--dataset", data_s, "--delta", "50", "--m", "2", "4"]);
    assert!(bench.contains("SC-m-4"), "{bench}");
    let verify = ok(&["verify", "--scale", "0.02"]);
    assert_eq!(verify.lines().filter(|l| l.starts_with("PASS")).count(), 6, "{verify}");
}
