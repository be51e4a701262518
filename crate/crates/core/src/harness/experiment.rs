//! Orchestration: one independent run per `(N, t, replica)` cell.

use std::io::Write;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind, ResolvedModel};
use super::report::{sort_rows, summarize, ReportRow, Summary};
use crate::coupling::{run_coupled_traced, run_decoupled_traced, PathPoint};
use crate::error::{Error, Result};
use crate::events::EventStream;
use crate::metrics::{lemma7_check, moment_q, wpp_presorted, wpp_presorted_vs_law, sorted, PerturbedIid};
use crate::model::{check_theorem_hypotheses, model_hash, InitialLaw};
use crate::particles::{run_bird, run_nanbu, TimeGrid};
use crate::reference::{is_analytically_stationary, AnalyticProvider, ExactProvider, GridProvider, PoolProvider};
use crate::rng::{derive_seed, seeded};

const POOL_TAG: u64 = 0x706F_6F6C;
const NANBU_STREAM: u64 = 1;
const LEMMA7_MAX_M: usize = 24;

/// Seed of one cell; independent of scheduling and of the other cells.
pub fn cell_seed(master: u64, kind: ExperimentKind, n: usize, t_index: usize, replica: usize) -> u64 {
    derive_seed(&[master, kind.tag(), n as u64, t_index as u64, replica as u64])
}

/// Seed of the reference pools of an experiment.
pub fn pool_seed(master: u64) -> u64 {
    derive_seed(&[master, POOL_TAG])
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub dump_states: bool,
    pub dump_paths: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRecord {
    pub n: usize,
    pub replica: usize,
    pub time: f64,
    pub particle_index: usize,
    pub state: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathRecord {
    pub n: usize,
    pub replica: usize,
    pub point: PathPoint,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
    pub states: Vec<StateRecord>,
    pub paths: Vec<PathRecord>,
}

/// Reference law at one time: exact, or the atoms of a pool.
enum Reference {
    Law(InitialLaw),
    Samples(Vec<f64>),
}

impl Reference {
    fn wpp(&self, sorted_states: &[f64], model: &ResolvedModel) -> f64 {
        match self {
            Reference::Law(law) => wpp_presorted_vs_law(sorted_states, law, model.order),
            Reference::Samples(s) => wpp_presorted(sorted_states, s, model.order),
        }
    }
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    model: ResolvedModel,
    hash: String,
    pools: Option<Arc<dyn PoolProvider>>,
    references: Vec<Reference>,
    options: RunOptions,
}

#[derive(Default)]
struct CellOutput {
    stats: Vec<(&'static str, f64)>,
    states: Vec<StateRecord>,
    paths: Vec<PathRecord>,
}

/// Builds the pool provider an experiment needs: exact quantiles for the
/// stationary cases, memoized grid pools otherwise. Grid pools up to
/// `prebuild_to` are built upfront, in parallel.
pub fn pool_provider(
    config: &ExperimentConfig,
    model: &ResolvedModel,
    prebuild_to: Option<f64>,
) -> Result<Arc<dyn PoolProvider>> {
    if is_analytically_stationary(&model.law, &model.p0) {
        return Ok(Arc::new(AnalyticProvider::new(&model.p0)?));
    }
    let size = config.effective_pool_size();
    let seed = pool_seed(config.seed);
    if config.exact_pool {
        return Ok(Arc::new(ExactProvider::new(model.law.clone(), model.p0, size, seed)));
    }
    let grid = GridProvider::new(model.law.clone(), model.p0, size, config.ref_time_step, seed)?;
    if let Some(t) = prebuild_to {
        grid.prebuild(t)?;
    }
    Ok(Arc::new(grid))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    run_experiment_with(config, RunOptions::default())
}

pub fn run_experiment_with(config: &ExperimentConfig, options: RunOptions) -> Result<ExperimentOutput> {
    match options.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
            pool.install(|| run_in_pool(config, options))
        }
        None => run_in_pool(config, options),
    }
}

fn run_in_pool(config: &ExperimentConfig, options: RunOptions) -> Result<ExperimentOutput> {
    let model = config.validate()?;
    let kind = config.experiment;
    let mut notes = Vec::new();
    if kind.needs_hypotheses() {
        let report = check_theorem_hypotheses(&model.law, &model.p0)?;
        let failures = report.failures();
        if !failures.is_empty() {
            return Err(Error::HypothesesFailed(format!(
                "{kind} refused for {} with P0 = {}: {}",
                model.law,
                model.p0,
                failures.join(", ")
            )));
        }
    }
    let hash = model_hash(&model.law, &model.p0);
    let mut pools = None;
    let mut references = Vec::new();
    if kind.needs_pools() {
        let stationary = is_analytically_stationary(&model.law, &model.p0);
        if !stationary {
            let m = config.effective_pool_size();
            let n = config.max_n();
            if (m as u128) < (n as u128).pow(2) {
                log::warn!("pool size {m} is below N² = {} at N = {n}", n * n);
                notes.push(format!("pool size {m} below N^2 = {}; pool noise may dominate at large N", n * n));
            }
        }
        if kind == ExperimentKind::ChaosRate {
            let provider = pool_provider(config, &model, None)?;
            for &t in &config.t_grid {
                references.push(if stationary {
                    Reference::Law(model.p0)
                } else {
                    Reference::Samples(provider.view(t)?.materialize())
                });
            }
        } else {
            pools = Some(pool_provider(config, &model, Some(config.max_t()))?);
        }
    }
    let ctx = Context { config, model, hash, pools, references, options };

    let cells: Vec<(usize, usize, usize)> = config
        .n_grid
        .iter()
        .flat_map(|&n| (0..config.t_grid.len()).flat_map(move |ti| (0..config.replicas).map(move |r| (n, ti, r))))
        .collect();
    let outputs: Vec<((usize, usize, usize), CellOutput)> = cells
        .par_iter()
        .map(|&(n, ti, r)| run_cell(&ctx, n, ti, r).map(|out| ((n, ti, r), out)))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut states = Vec::new();
    let mut paths = Vec::new();
    for ((n, ti, r), out) in outputs {
        let seed = cell_seed(config.seed, kind, n, ti, r);
        for (statistic, value) in out.stats {
            if !value.is_finite() {
                return Err(Error::NonFinite(format!("{statistic} at N={n}, t={}, replica {r}", config.t_grid[ti])));
            }
            rows.push(ReportRow {
                experiment: kind,
                model_hash: ctx.hash.clone(),
                n,
                t: config.t_grid[ti],
                replica: r,
                statistic: statistic.to_string(),
                value,
                stderr: None,
                seed,
            });
        }
        states.extend(out.states);
        paths.extend(out.paths);
    }
    sort_rows(&mut rows);
    let mut summary = summarize(&rows);
    summary.notes.extend(notes);
    Ok(ExperimentOutput { rows, summary, states, paths })
}

fn mean_power(xs: &[f64], p: f64) -> f64 {
    moment_q(xs, p).expect("non-empty states")
}

fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n
}

fn run_cell(ctx: &Context<'_>, n: usize, ti: usize, replica: usize) -> Result<CellOutput> {
    let config = ctx.config;
    let model = &ctx.model;
    let kind = config.experiment;
    let t = config.t_grid[ti];
    let seed = cell_seed(config.seed, kind, n, ti, replica);
    let grid = TimeGrid::single(t)?;
    let p = model.order.value();
    let mut out = CellOutput::default();
    let dump_states = |out: &mut CellOutput, time: f64, xs: &[f64]| {
        if ctx.options.dump_states {
            out.states.extend(xs.iter().enumerate().map(|(i, &state)| StateRecord {
                n,
                replica,
                time,
                particle_index: i,
                state,
            }));
        }
    };
    let mut paths = Vec::new();
    let mut trace = |point: PathPoint| {
        if ctx.options.dump_paths {
            paths.push(PathRecord { n, replica, point });
        }
    };
    let pools = || ctx.pools.as_deref().ok_or_else(|| Error::InvalidParameter("no pool provider".into()));
    match kind {
        ExperimentKind::ChaosRate => {
            let traj = run_bird(&model.law, &model.p0, &grid, &mut EventStream::new(n, seed, 0)?)?;
            let xs = &traj.snapshots[0].states;
            dump_states(&mut out, t, xs);
            out.stats.push(("wpp_ref", ctx.references[ti].wpp(&sorted(xs), model)));
        }
        ExperimentKind::MomentDecay => {
            let traj = run_bird(&model.law, &model.p0, &grid, &mut EventStream::new(n, seed, 0)?)?;
            let xs = &traj.snapshots[0].states;
            dump_states(&mut out, t, xs);
            out.stats.push(("moment_p", mean_power(xs, p)));
        }
        ExperimentKind::NanbuVsBird => {
            let bird = run_bird(&model.law, &model.p0, &grid, &mut EventStream::new(n, seed, 0)?)?;
            let nanbu = run_nanbu(&model.law, &model.p0, &grid, &mut EventStream::new(n, seed, NANBU_STREAM)?)?;
            let (xb, xn) = (&bird.snapshots[0].states, &nanbu.snapshots[0].states);
            dump_states(&mut out, t, xb);
            out.stats.extend([
                ("bird_moment_p", mean_power(xb, p)),
                ("nanbu_moment_p", mean_power(xn, p)),
                ("bird_var", variance(xb)),
                ("nanbu_var", variance(xn)),
            ]);
        }
        ExperimentKind::CouplingDistance | ExperimentKind::SupDistance => {
            let mut stream = EventStream::new(n, seed, 0)?;
            let run = run_coupled_traced(&model.law, &model.p0, &grid, &mut stream, pools()?, &mut trace)?;
            let snap = &run.snapshots[0];
            dump_states(&mut out, t, &snap.x);
            if kind == ExperimentKind::CouplingDistance {
                out.stats.push(("xu_mean", snap.mean_distance(model.order)));
                out.stats.push(("xu_first", snap.distance(0, model.order)));
            } else {
                out.stats.push(("sup_mean", snap.mean_sup()));
                out.stats.push(("sup_first", snap.sup[0]));
            }
        }
        ExperimentKind::Decoupling => {
            let mut stream = EventStream::new(n, seed, 0)?;
            let mut copy = stream.fork_independent_copy();
            let run = run_decoupled_traced(
                &model.law,
                &model.p0,
                config.k,
                &grid,
                &mut stream,
                &mut copy,
                pools()?,
                &mut trace,
            )?;
            let snap = &run.snapshots[0];
            out.stats.push(("uv_mean", snap.mean_distance(model.order)));
            out.stats.push(("uv_first", snap.distance(0, model.order)));
        }
        ExperimentKind::Lemma7Audit => {
            let mut rng = seeded(seed);
            let m = rng.random_range(1..=LEMMA7_MAX_M);
            let block = rng.random_range(1..=m);
            let mut generator = PerturbedIid {
                law: model.p0,
                m,
                common: rng.random::<f64>(),
                idiosyncratic: rng.random::<f64>(),
            };
            let report = lemma7_check(&mut generator, &model.p0, block, model.order, config.lemma7_reps, &mut rng)?;
            out.stats.extend([
                ("lemma7_lhs", report.lhs),
                ("lemma7_rhs", report.rhs),
                ("lemma7_holds", if report.holds { 1.0 } else { 0.0 }),
                ("lemma7_m", m as f64),
                ("lemma7_n", block as f64),
            ]);
        }
    }
    out.paths = paths;
    Ok(out)
}

/// `replica,time,particle_index,state`, for the records of one `N`.
pub fn write_state_dump<W: Write>(mut out: W, records: &[StateRecord]) -> Result<()> {
    writeln!(out, "replica,time,particle_index,state")?;
    for r in records {
        writeln!(out, "{},{},{},{}", r.replica, r.time, r.particle_index, r.state)?;
    }
    Ok(())
}

/// `N,replica,time,x1,u1,v1` with an empty `v1` for coupled-only runs.
pub fn write_path_dump<W: Write>(mut out: W, records: &[PathRecord]) -> Result<()> {
    writeln!(out, "N,replica,time,x1,u1,v1")?;
    for r in records {
        let v1 = r.point.v1.map(|v| v.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{},{}", r.n, r.replica, r.point.time, r.point.x1, r.point.u1, v1)?;
    }
    Ok(())
}
