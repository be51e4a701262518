use std::path::Path;
use std::process::{Command, Output};

fn kacsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kacsim"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn run_to(dir: &Path, name: &str, extra: &[&str]) -> String {
    let out = dir.join(name);
    let mut args = vec![
        "run",
        "--experiment",
        "coupling-distance",
        "--model",
        "wealth:0.7",
        "--p0",
        "exponential:1",
        "--p",
        "1",
        "--n-grid",
        "8,16",
        "--t-grid",
        "0.5,1",
        "--replicas",
        "3",
        "--pool-size",
        "512",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let result = kacsim(&args);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn csv_has_versioned_header_and_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let csv = run_to(dir.path(), "a.csv", &[]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# kacsim-csv v1"));
    assert_eq!(lines.next(), Some("experiment,model_hash,N,t,replica,statistic,value,stderr,seed"));
    // 2 N × 2 t × 3 replicas × 2 statistics
    assert_eq!(lines.count(), 24);
    assert!(dir.path().join("a.json").exists());
}

#[test]
fn output_is_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_to(dir.path(), "a.csv", &["--workers", "1"]);
    let b = run_to(dir.path(), "b.csv", &["--workers", "1"]);
    let c = run_to(dir.path(), "c.csv", &["--workers", "8"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn summarize_reads_run_output() {
    let dir = tempfile::tempdir().unwrap();
    run_to(dir.path(), "a.csv", &[]);
    let json = dir.path().join("s.json");
    let out = kacsim(&["summarize", dir.path().join("a.csv").to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("xu_mean"), "{table}");
    assert!(std::fs::read_to_string(json).unwrap().contains("\"cells\""));
}

#[test]
fn dumps_are_written_per_n() {
    let dir = tempfile::tempdir().unwrap();
    run_to(dir.path(), "a.csv", &["--dump-states", "--dump-paths"]);
    for name in ["a.states.N8.csv", "a.states.N16.csv", "a.paths.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let states = std::fs::read_to_string(dir.path().join("a.states.N8.csv")).unwrap();
    assert!(states.starts_with("replica,time,particle_index,state\n"));
    // 2 times × 3 replicas × 8 particles
    assert_eq!(states.lines().count(), 1 + 48);
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(
        &config,
        "experiment = \"moment-decay\"\nmodel = \"kac\"\np0 = \"gaussian:0:1\"\np = 2\n\
         n_grid = [10]\nt_grid = [1.0]\nreplicas = 2\nseed = 5\n",
    )
    .unwrap();
    let out = dir.path().join("m.csv");
    let result = kacsim(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--replicas",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let csv = std::fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with("moment-decay,")).count(), 4);
}

#[test]
fn refusal_names_the_failing_hypothesis() {
    let out = kacsim(&["run", "--model", "kac:theta=0", "--n-grid", "4", "--replicas", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E(|R|+|R~|) > 0"));
}

#[test]
fn list_models_shows_kinds_and_recipes() {
    let out = kacsim(&["list-models"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for word in ["chaos-rate", "lemma7-audit", "acceptance", "wealth:<λ>", "pareto"] {
        assert!(text.contains(word), "{word}");
    }
}

#[test]
fn unknown_recipe_is_an_error() {
    let out = kacsim(&["run", "--recipe", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}
