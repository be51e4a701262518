use kacsim::harness::{read_csv, run_experiment, summarize, to_csv_string, ExperimentConfig, ExperimentKind};

fn config() -> ExperimentConfig {
    ExperimentConfig::from_toml_str(
        r#"
experiment = "coupling-distance"
model = "wealth:0.7"
p0 = "exponential:1"
p = 1
n_grid = [8, 16, 32]
t_grid = [1.0]
replicas = 5
pool_size = 1024
seed = 77
"#,
    )
    .unwrap()
}

#[test]
fn csv_round_trip_gives_the_same_summary() {
    let out = run_experiment(&config()).unwrap();
    let text = to_csv_string(&out.rows);
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows, out.rows);
    assert_eq!(summarize(&rows).cells, out.summary.cells);
}

#[test]
fn a_single_replica_reruns_identically() {
    let full = run_experiment(&config()).unwrap();
    let mut one = config();
    one.replicas = 1;
    let alone = run_experiment(&one).unwrap();
    for row in alone.rows {
        assert!(full.rows.contains(&row), "{row:?}");
    }
}

#[test]
fn every_kind_runs_on_a_tiny_grid() {
    for kind in ExperimentKind::ALL {
        let mut cfg = config();
        cfg.experiment = kind;
        cfg.n_grid = vec![6, 12];
        cfg.t_grid = vec![0.5, 1.0];
        cfg.replicas = 2;
        cfg.lemma7_reps = 20;
        let out = run_experiment(&cfg).unwrap();
        assert!(!out.rows.is_empty(), "{kind}");
        assert!(out.rows.iter().all(|r| r.value.is_finite()), "{kind}");
    }
}
