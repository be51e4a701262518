use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kacsim::harness::acceptance::{recipe, recipes, run_suite, AcceptanceLab, SUITE_RECIPE};
use kacsim::harness::{
    parse_list, read_csv, run_experiment_with, summarize, write_csv, write_path_dump, write_state_dump,
    ExperimentConfig, ExperimentKind, RunOptions,
};

#[derive(Parser)]
#[command(name = "kacsim", version, about = "Monte Carlo experiments for Bird-type Kac particle systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file, a recipe, or flags.
    Run(RunArgs),
    /// Summarize a CSV produced by `run`.
    Summarize {
        csv: PathBuf,
        /// Also write the JSON summary here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// List model syntaxes, experiment kinds and recipes.
    ListModels,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset; `acceptance` runs the numbered suite.
    #[arg(long)]
    recipe: Option<String>,
    #[arg(long)]
    experiment: Option<ExperimentKind>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    p0: Option<String>,
    #[arg(long)]
    p: Option<u32>,
    /// Comma-separated particle counts.
    #[arg(long)]
    n_grid: Option<String>,
    /// Comma-separated times.
    #[arg(long)]
    t_grid: Option<String>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    pool_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV output; the summary goes next to it as `.json`. Stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write particle states at each grid time to `<out>.states.csv`, one
    /// file per N when there are several.
    #[arg(long)]
    dump_states: bool,
    /// Write the coupled path of particle 1 to `<out>.paths.csv`.
    #[arg(long)]
    dump_paths: bool,
    /// Build a fresh pool at every event time instead of on the time grid.
    #[arg(long)]
    exact_pool: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) if args.recipe.as_deref() == Some(SUITE_RECIPE) => run_acceptance(&args),
        Command::Run(args) => run(args),
        Command::Summarize { csv, json } => {
            let file = File::open(&csv).with_context(|| format!("opening {}", csv.display()))?;
            let summary = summarize(&read_csv(file)?);
            print!("{}", summary.to_table());
            if let Some(path) = json {
                std::fs::write(&path, summary.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ListModels => {
            list_models();
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_acceptance(args: &RunArgs) -> Result<ExitCode> {
    let lab = AcceptanceLab::new(args.seed.unwrap_or(20_240_601), args.workers);
    let outcomes = run_suite(&lab, &[], |o| println!("{o}"));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = match (&args.config, &args.recipe) {
        (Some(_), Some(_)) => bail!("--config and --recipe are mutually exclusive"),
        (Some(path), None) => ExperimentConfig::load(path)?,
        (None, Some(name)) => {
            let r = recipe(name).with_context(|| format!("unknown recipe `{name}`; see list-models"))?;
            (r.config)(args.seed.unwrap_or(1))
        }
        (None, None) => ExperimentConfig::default(),
    };
    if let Some(kind) = args.experiment {
        config.experiment = kind;
    }
    if let Some(m) = &args.model {
        config.model = m.clone();
    }
    if let Some(p0) = &args.p0 {
        config.p0 = p0.clone();
    }
    if let Some(p) = args.p {
        config.p = p;
    }
    if let Some(s) = &args.n_grid {
        config.n_grid = parse_list(s, "N")?;
    }
    if let Some(s) = &args.t_grid {
        config.t_grid = parse_list(s, "t")?;
    }
    if let Some(r) = args.replicas {
        config.replicas = r;
    }
    if let Some(m) = args.pool_size {
        config.pool_size = Some(m);
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.exact_pool {
        config.exact_pool = true;
    }
    if let Some(out) = &args.out {
        config.output = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "kacsim".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}{suffix}"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let config = build_config(&args)?;
    let options = RunOptions { workers: args.workers, dump_states: args.dump_states, dump_paths: args.dump_paths };
    log::info!(
        "{} on {} / {}: N={:?} t={:?} replicas={}",
        config.experiment,
        config.model,
        config.p0,
        config.n_grid,
        config.t_grid,
        config.replicas
    );
    let mut output = run_experiment_with(&config, options)?;
    if let Some(r) = args.recipe.as_deref().and_then(recipe) {
        let checks = (r.checks)(&output.summary);
        output.summary.checks.extend(checks);
    }
    match &config.output {
        Some(path) => {
            write_csv(create(path)?, &output.rows)?;
            create(&sibling(path, ".json"))?.write_all(output.summary.to_json().as_bytes())?;
            if args.dump_states {
                // the dump has no N column, so one file per N when there are several
                if config.n_grid.len() == 1 {
                    write_state_dump(create(&sibling(path, ".states.csv"))?, &output.states)?;
                } else {
                    for &n in &config.n_grid {
                        let part: Vec<_> = output.states.iter().copied().filter(|r| r.n == n).collect();
                        write_state_dump(create(&sibling(path, &format!(".states.N{n}.csv")))?, &part)?;
                    }
                }
            }
            if args.dump_paths {
                write_path_dump(create(&sibling(path, ".paths.csv"))?, &output.paths)?;
            }
            print!("{}", output.summary.to_table());
        }
        None => {
            let stdout = io::stdout();
            write_csv(stdout.lock(), &output.rows)?;
            if args.dump_states || args.dump_paths {
                log::warn!("dumps need --out; skipped");
            }
            eprint!("{}", output.summary.to_table());
        }
    }
    io::stdout().flush()?;
    let failed = output.summary.checks.iter().any(|c| !c.passed);
    Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn list_models() {
    println!("interaction laws (--model):");
    for line in [
        "kac                          uniform angle, conserves energy",
        "kac:theta=<θ>                fixed angle",
        "inelastic-kac:e=<e>[:theta=<θ>]",
        "wealth:<λ>                   conservative exchange, fixed λ",
        "wealth:uniform:<low>:<high>  conservative exchange, λ ~ U(low, high)",
        "table:<prob>@<l>,<r>,<l̃>,<r̃>[;...]",
    ] {
        println!("  {line}");
    }
    println!("initial laws (--p0):");
    for line in [
        "point:<c>",
        "uniform:<low>:<high>",
        "gaussian:<mean>:<variance>",
        "exponential:<rate>",
        "pareto:<index>:<scale>",
        "two-point:<x0>:<x1>:<w>",
    ] {
        println!("  {line}");
    }
    println!("experiments (--experiment):");
    for kind in ExperimentKind::ALL {
        println!("  {kind}");
    }
    println!("recipes (--recipe):");
    println!("  {SUITE_RECIPE:<18} the numbered acceptance suite");
    for r in recipes() {
        println!("  {:<18} {}", r.name, r.about);
    }
}
