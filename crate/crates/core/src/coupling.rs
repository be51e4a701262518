//! Nonlinear processes driven by the particle system's own atoms.
//!
//! `U^i` jumps exactly when `X^i` does, with the same coefficients, but its
//! intake is `G(X_{t−}, τ)`: the point of `P_t` matched by the increasing
//! coupling to the partner state `x^{⌊τ⌋}` among the other particles. The
//! decoupled system `V` replaces the atoms shared by two of the first `k`
//! particles with atoms of an independent copy of the stream, which makes
//! `V^1, …, V^k` independent.

use crate::error::{Error, Result};
use crate::events::{EventAtom, EventStream};
use crate::model::{InitialLaw, InteractionLaw, Order};
use crate::particles::{drive, initial_states, ParticleEnsemble, Snapshot, TimeGrid};
use crate::reference::{PoolProvider, PoolView};

/// Rank of `x[j]` among the states other than `x[i]`, from 1, ties broken
/// by index.
pub fn leave_one_out_rank(x: &[f64], i: usize, j: usize) -> usize {
    let xj = x[j];
    1 + x
        .iter()
        .enumerate()
        .filter(|&(k, &xk)| k != i && k != j && (xk < xj || (xk == xj && k < j)))
        .count()
}

/// `G_t^i(x, τ)`: pool quantile at `(r − 1 + frac τ)/(N − 1)` where `r` is
/// the leave-one-out rank of the partner `⌊τ⌋`. Particles are 0-based.
pub fn g_coupling(x: &[f64], i: usize, tau: f64, pool: &PoolView) -> Result<f64> {
    let n = x.len();
    if n < 2 || i >= n {
        return Err(Error::InvalidParameter(format!("particle {i} out of range for N={n}")));
    }
    if !(tau >= 0.0 && tau < n as f64) {
        return Err(Error::Domain { value: tau, domain: "[0, N)" });
    }
    let j = tau.floor() as usize;
    if j == i {
        return Err(Error::Domain { value: tau, domain: "τ outside the particle's own cell" });
    }
    Ok(g_unchecked(x, i, j, tau.fract(), pool))
}

fn g_unchecked(x: &[f64], i: usize, j: usize, frac: f64, pool: &PoolView) -> f64 {
    let r = leave_one_out_rank(x, i, j);
    let mut u = ((r - 1) as f64 + frac) / (x.len() - 1) as f64;
    if u <= 0.0 {
        u = f64::MIN_POSITIVE;
    }
    pool.quantile_unchecked(u.min(1.0))
}

/// One point of a paired path, emitted after every atom touching
/// particle 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub time: f64,
    pub x1: f64,
    pub u1: f64,
    pub v1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSnapshot {
    pub time: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// Running maximum of `|X^i − U^i|^p` over all event times up to `time`.
    pub sup: Vec<f64>,
}

impl CoupledSnapshot {
    /// `|X^i − U^i|^p` for particle `i`.
    pub fn distance(&self, i: usize, p: Order) -> f64 {
        p.cost(self.x[i] - self.u[i])
    }

    /// `(1/N) Σ_i |X^i − U^i|^p`; same mean as the particle-1 value by
    /// exchangeability, with less noise.
    pub fn mean_distance(&self, p: Order) -> f64 {
        self.x.iter().zip(&self.u).map(|(x, u)| p.cost(x - u)).sum::<f64>() / self.x.len() as f64
    }

    pub fn mean_sup(&self) -> f64 {
        self.sup.iter().sum::<f64>() / self.sup.len() as f64
    }

    pub fn x_snapshot(&self) -> Snapshot {
        Snapshot { time: self.time, states: self.x.clone() }
    }
}

#[derive(Debug, Clone)]
pub struct CoupledRun {
    pub p: Order,
    pub n_particles: usize,
    pub master_seed: u64,
    pub stream_id: u64,
    pub snapshots: Vec<CoupledSnapshot>,
    pub collisions: u64,
}

/// Running max of `|X¹ − U¹|^p` up to the horizon.
pub fn sup_distance_statistic(run: &CoupledRun) -> f64 {
    run.snapshots.last().map_or(0.0, |s| s.sup[0])
}

/// Runs `X` and `U` on the same atoms with `U₀ = X₀`.
pub fn run_coupled(
    law: &InteractionLaw,
    p0: &InitialLaw,
    grid: &TimeGrid,
    stream: &mut EventStream,
    pools: &dyn PoolProvider,
) -> Result<CoupledRun> {
    run_coupled_traced(law, p0, grid, stream, pools, &mut |_| {})
}

pub fn run_coupled_traced(
    law: &InteractionLaw,
    p0: &InitialLaw,
    grid: &TimeGrid,
    stream: &mut EventStream,
    pools: &dyn PoolProvider,
    trace: &mut dyn FnMut(PathPoint),
) -> Result<CoupledRun> {
    let p = law.order();
    let states = initial_states(p0, stream);
    let mut u = states.clone();
    let mut sup = vec![0.0f64; states.len()];
    let mut ens = ParticleEnsemble::new(states, law);
    let mut snapshots = Vec::with_capacity(grid.times().len());
    let cell = std::cell::RefCell::new((&mut ens, &mut u, &mut sup));
    drive(
        law,
        stream,
        grid,
        1.0,
        |atom, t| {
            let (ens, u, sup) = &mut *cell.borrow_mut();
            let view = pools.view(t)?;
            let (i, j) = (atom.first(), atom.second());
            let x = ens.states();
            let gi = g_unchecked(x, i, j, atom.sigma.fract(), &view);
            let gj = g_unchecked(x, j, i, atom.rho.fract(), &view);
            ens.apply_collision(atom)?;
            let a = atom.alpha;
            u[i] = a.l * u[i] + a.r * gi;
            u[j] = a.l_tilde * u[j] + a.r_tilde * gj;
            if !(u[i].is_finite() && u[j].is_finite()) {
                return Err(Error::Overflow { atom_index: ens.collision_count() - 1 });
            }
            let x = ens.states();
            for k in [i, j] {
                sup[k] = sup[k].max(p.cost(x[k] - u[k]));
            }
            if i == 0 || j == 0 {
                trace(PathPoint { time: t, x1: x[0], u1: u[0], v1: None });
            }
            Ok(())
        },
        |t| {
            let (ens, u, sup) = &*cell.borrow();
            snapshots.push(CoupledSnapshot { time: t, x: ens.states().to_vec(), u: u.to_vec(), sup: sup.to_vec() });
        },
    )?;
    Ok(CoupledRun {
        p,
        n_particles: stream.n_particles(),
        master_seed: stream.master_seed(),
        stream_id: stream.stream_id(),
        snapshots,
        collisions: ens.collision_count(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoupledSnapshot {
    pub time: f64,
    /// `U^1, …, U^k`.
    pub u: Vec<f64>,
    /// `V^1, …, V^k`.
    pub v: Vec<f64>,
}

impl DecoupledSnapshot {
    pub fn distance(&self, i: usize, p: Order) -> f64 {
        p.cost(self.u[i] - self.v[i])
    }

    /// `(1/k) Σ_{i<k} |U^i − V^i|^p`.
    pub fn mean_distance(&self, p: Order) -> f64 {
        (0..self.u.len()).map(|i| self.distance(i, p)).sum::<f64>() / self.u.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct DecoupledRun {
    pub k: usize,
    pub p: Order,
    pub n_particles: usize,
    pub master_seed: u64,
    pub stream_id: u64,
    pub copy_stream_id: u64,
    pub snapshots: Vec<DecoupledSnapshot>,
}

/// Runs `X` in full and `U`, `V` for the first `k` particles. Atoms of
/// `copy` only matter when both indices are below `k`.
pub fn run_decoupled(
    law: &InteractionLaw,
    p0: &InitialLaw,
    k: usize,
    grid: &TimeGrid,
    stream: &mut EventStream,
    copy: &mut EventStream,
    pools: &dyn PoolProvider,
) -> Result<DecoupledRun> {
    run_decoupled_traced(law, p0, k, grid, stream, copy, pools, &mut |_| {})
}

#[allow(clippy::too_many_arguments)]
pub fn run_decoupled_traced(
    law: &InteractionLaw,
    p0: &InitialLaw,
    k: usize,
    grid: &TimeGrid,
    stream: &mut EventStream,
    copy: &mut EventStream,
    pools: &dyn PoolProvider,
    trace: &mut dyn FnMut(PathPoint),
) -> Result<DecoupledRun> {
    let n = stream.n_particles();
    if k < 2 || k > n {
        return Err(Error::InvalidParameter(format!("need 2 ≤ k ≤ N, got k={k}, N={n}")));
    }
    if copy.n_particles() != n {
        return Err(Error::SizeMismatch { left: n, right: copy.n_particles() });
    }
    let p = law.order();
    let mut ens = ParticleEnsemble::new(initial_states(p0, stream), law);
    let mut u = ens.states()[..k].to_vec();
    let mut v = u.clone();
    let times = grid.times();
    let mut snapshots = Vec::with_capacity(times.len());
    let mut next_snap = 0;
    let mut main = stream.next_event(law);
    let horizon = grid.t_end();
    let mut side = next_copy_atom(copy, law, k, horizon);
    while next_snap < times.len() {
        let from_main = main.t <= side.t;
        let t = if from_main { main.t } else { side.t };
        while next_snap < times.len() && times[next_snap] <= t {
            snapshots.push(DecoupledSnapshot { time: times[next_snap], u: u.clone(), v: v.clone() });
            next_snap += 1;
        }
        if next_snap == times.len() {
            break;
        }
        let mut touched = false;
        if from_main {
            let atom = main;
            let (i, j) = (atom.first(), atom.second());
            if i < k || j < k {
                let view = pools.view(t)?;
                let a = atom.alpha;
                let x = ens.states();
                if i < k {
                    let g = g_unchecked(x, i, j, atom.sigma.fract(), &view);
                    u[i] = a.l * u[i] + a.r * g;
                    v[i] = a.l * v[i] + a.r * g;
                }
                if j < k {
                    let g = g_unchecked(x, j, i, atom.rho.fract(), &view);
                    u[j] = a.l_tilde * u[j] + a.r_tilde * g;
                    if i >= k {
                        v[j] = a.l_tilde * v[j] + a.r_tilde * g;
                    }
                }
                touched = i == 0 || j == 0;
            }
            ens.apply_collision(&atom)?;
            main = stream.next_event(law);
        } else {
            let atom = side;
            let (i, j) = (atom.first(), atom.second());
            let view = pools.view(t)?;
            let g = g_unchecked(ens.states(), j, i, atom.rho.fract(), &view);
            v[j] = atom.alpha.l_tilde * v[j] + atom.alpha.r_tilde * g;
            touched = j == 0;
            side = next_copy_atom(copy, law, k, horizon);
        }
        if u.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::Overflow { atom_index: ens.collision_count() });
        }
        if touched {
            trace(PathPoint { time: t, x1: ens.states()[0], u1: u[0], v1: Some(v[0]) });
        }
    }
    Ok(DecoupledRun {
        k,
        p,
        n_particles: n,
        master_seed: stream.master_seed(),
        stream_id: stream.stream_id(),
        copy_stream_id: copy.stream_id(),
        snapshots,
    })
}

/// Next copy atom with both indices below `k`, or the first one past the
/// horizon.
fn next_copy_atom(copy: &mut EventStream, law: &InteractionLaw, k: usize, horizon: f64) -> EventAtom {
    loop {
        let atom = copy.next_event(law);
        if (atom.first() < k && atom.second() < k) || atom.t > horizon {
            return atom;
        }
    }
}
