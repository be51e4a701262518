//! Bird-type N-particle system and the Nanbu variant.

use crate::error::{Error, Result};
use crate::events::{EventAtom, EventStream};
use crate::model::{ConservedQuantity, InitialLaw, InteractionLaw, Order};

/// Sorted, non-negative snapshot times; the last one is the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(mut times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidParameter("empty snapshot grid".into()));
        }
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::InvalidParameter("snapshot times must be finite and non-negative".into()));
        }
        times.sort_by(f64::total_cmp);
        times.dedup();
        Ok(TimeGrid(times))
    }

    pub fn single(t_end: f64) -> Result<Self> {
        TimeGrid::new(vec![t_end])
    }

    /// `k` equally spaced points on `(0, t_end]`.
    pub fn uniform(t_end: f64, k: usize) -> Result<Self> {
        TimeGrid::new((1..=k).map(|m| t_end * m as f64 / k as f64).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn t_end(&self) -> f64 {
        *self.0.last().expect("non-empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Tracker {
    quantity: ConservedQuantity,
    initial: f64,
    running: f64,
}

/// State of the N-particle system at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    pub time: f64,
    states: Vec<f64>,
    order: Order,
    collision_count: u64,
    tracker: Option<Tracker>,
}

impl ParticleEnsemble {
    /// Tracks the conserved quantity when `law` preserves one exactly.
    pub fn new(states: Vec<f64>, law: &InteractionLaw) -> Self {
        let tracker = law.conserved_quantity().map(|quantity| {
            let v = quantity.evaluate(&states);
            Tracker { quantity, initial: v, running: v }
        });
        ParticleEnsemble { time: 0.0, states, order: law.order(), collision_count: 0, tracker }
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn collision_count(&self) -> u64 {
        self.collision_count
    }

    pub fn conserved_quantity(&self) -> Option<ConservedQuantity> {
        self.tracker.as_ref().map(|t| t.quantity)
    }

    /// Running value of the conserved quantity, updated per collision.
    pub fn conserved_tracker(&self) -> Option<f64> {
        self.tracker.as_ref().map(|t| t.running)
    }

    /// `|Q(now) − Q(0)| / |Q(0)|` for the conserved quantity `Q`, recomputed
    /// from the states.
    pub fn relative_drift(&self) -> Option<f64> {
        self.tracker.as_ref().map(|t| {
            let now = t.quantity.evaluate(&self.states);
            let scale = if t.initial == 0.0 { 1.0 } else { t.initial.abs() };
            (now - t.initial).abs() / scale
        })
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t < self.time {
            Err(Error::OutOfOrder { atom_time: t, current: self.time })
        } else {
            Ok(())
        }
    }

    /// Bird collision: both particles move, computed from the pre-collision pair.
    pub fn apply_collision(&mut self, atom: &EventAtom) -> Result<()> {
        self.check_time(atom.t)?;
        let (i, j) = (atom.first(), atom.second());
        let (u, v) = (self.states[i], self.states[j]);
        let (new_u, new_v) = atom.alpha.collide(u, v);
        self.commit(atom.t, &[(i, u, new_u), (j, v, new_v)])
    }

    /// Nanbu update at time `time`: only the first particle moves, with the
    /// `(l, r)` pair on `frac(σ) < ½` and `(l̃, r̃)` otherwise.
    pub fn apply_nanbu(&mut self, atom: &EventAtom, time: f64) -> Result<()> {
        self.check_time(time)?;
        let (i, j) = (atom.first(), atom.second());
        let (l, r) = nanbu_pair(atom);
        let u = self.states[i];
        let new_u = l * u + r * self.states[j];
        self.commit(time, &[(i, u, new_u)])
    }

    fn commit(&mut self, time: f64, updates: &[(usize, f64, f64)]) -> Result<()> {
        if updates.iter().any(|&(_, _, new)| !new.is_finite()) {
            return Err(Error::Overflow { atom_index: self.collision_count });
        }
        for &(k, old, new) in updates {
            self.states[k] = new;
            if let Some(t) = self.tracker.as_mut() {
                t.running += t.quantity.term(new) - t.quantity.term(old);
            }
        }
        self.time = time;
        self.collision_count += 1;
        Ok(())
    }
}

pub(crate) fn nanbu_pair(atom: &EventAtom) -> (f64, f64) {
    if atom.sigma.fract() < 0.5 {
        (atom.alpha.l, atom.alpha.r)
    } else {
        (atom.alpha.l_tilde, atom.alpha.r_tilde)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub states: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Left limits at the grid times.
    pub snapshots: Vec<Snapshot>,
    /// State after the last atom before the horizon.
    pub last: ParticleEnsemble,
}

impl Trajectory {
    pub fn at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| s.time == t)
    }
}

/// Initial states: `N` i.i.d. draws of `P₀` from the stream's initial generator.
pub fn initial_states(p0: &InitialLaw, stream: &EventStream) -> Vec<f64> {
    let mut rng = stream.initial_state_rng();
    p0.sample_n(stream.n_particles(), &mut rng)
}

/// Pulls atoms up to the horizon, calling `snapshot` at every grid time (with
/// the state before any later atom) and `apply` for every atom in between.
/// `time_scale` maps stream time to system time.
pub(crate) fn drive<A, S>(
    law: &InteractionLaw,
    stream: &mut EventStream,
    grid: &TimeGrid,
    time_scale: f64,
    mut apply: A,
    mut snapshot: S,
) -> Result<()>
where
    A: FnMut(&EventAtom, f64) -> Result<()>,
    S: FnMut(f64),
{
    let times = grid.times();
    let mut next = 0;
    loop {
        let atom = stream.next_event(law);
        let t = atom.t * time_scale;
        while next < times.len() && times[next] <= t {
            snapshot(times[next]);
            next += 1;
        }
        if next == times.len() {
            return Ok(());
        }
        apply(&atom, t)?;
    }
}

/// Runs the Bird system from i.i.d. `P₀` initial states.
pub fn run_bird(law: &InteractionLaw, p0: &InitialLaw, grid: &TimeGrid, stream: &mut EventStream) -> Result<Trajectory> {
    run_bird_from(law, initial_states(p0, stream), grid, stream)
}

pub fn run_bird_from(
    law: &InteractionLaw,
    states: Vec<f64>,
    grid: &TimeGrid,
    stream: &mut EventStream,
) -> Result<Trajectory> {
    check_size(&states, stream)?;
    let mut ens = ParticleEnsemble::new(states, law);
    let mut snapshots = Vec::with_capacity(grid.times().len());
    let ens_ptr = std::cell::RefCell::new(&mut ens);
    drive(
        law,
        stream,
        grid,
        1.0,
        |atom, _| ens_ptr.borrow_mut().apply_collision(atom),
        |t| snapshots.push(Snapshot { time: t, states: ens_ptr.borrow().states.clone() }),
    )?;
    Ok(Trajectory { snapshots, last: ens })
}

/// Runs the Nanbu system. Stream time is halved so that each particle jumps
/// at rate 1, like in the Bird system.
pub fn run_nanbu(law: &InteractionLaw, p0: &InitialLaw, grid: &TimeGrid, stream: &mut EventStream) -> Result<Trajectory> {
    let states = initial_states(p0, stream);
    check_size(&states, stream)?;
    let mut ens = ParticleEnsemble::new(states, law);
    let mut snapshots = Vec::with_capacity(grid.times().len());
    let ens_ptr = std::cell::RefCell::new(&mut ens);
    drive(
        law,
        stream,
        grid,
        0.5,
        |atom, t| ens_ptr.borrow_mut().apply_nanbu(atom, t),
        |t| snapshots.push(Snapshot { time: t, states: ens_ptr.borrow().states.clone() }),
    )?;
    Ok(Trajectory { snapshots, last: ens })
}

fn check_size(states: &[f64], stream: &EventStream) -> Result<()> {
    if states.len() != stream.n_particles() {
        return Err(Error::InvalidParameter(format!(
            "{} states for a stream over {} particles",
            states.len(),
            stream.n_particles()
        )));
    }
    Ok(())
}

/// Replays a recorded atom sequence through the Bird rule.
pub fn replay_bird<'a>(
    law: &InteractionLaw,
    states: Vec<f64>,
    atoms: impl IntoIterator<Item = &'a EventAtom>,
) -> Result<ParticleEnsemble> {
    let mut ens = ParticleEnsemble::new(states, law);
    for atom in atoms {
        ens.apply_collision(atom)?;
    }
    Ok(ens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AngleLaw, Coefficients, InteractionKind};
    use std::f64::consts::FRAC_PI_2;

    fn quarter_turn() -> InteractionLaw {
        InteractionLaw::new(InteractionKind::Kac(AngleLaw::Fixed(FRAC_PI_2)), Order::Two).unwrap()
    }

    fn atom(t: f64, alpha: Coefficients, i: usize, j: usize) -> EventAtom {
        EventAtom { t, alpha, rho: i as f64 + 0.25, sigma: j as f64 + 0.25 }
    }

    #[test]
    fn quarter_turn_rotates_pair() {
        let law = quarter_turn();
        let mut ens = ParticleEnsemble::new(vec![3.0, 4.0], &law);
        let alpha = Coefficients::new(FRAC_PI_2.cos(), -1.0, FRAC_PI_2.cos(), 1.0);
        ens.apply_collision(&atom(0.1, alpha, 0, 1)).unwrap();
        assert!((ens.states()[0] + 4.0).abs() < 1e-15);
        assert!((ens.states()[1] - 3.0).abs() < 1e-15);
        let sq: f64 = ens.states().iter().map(|x| x * x).sum();
        assert!((sq - 25.0).abs() < 1e-12);
        assert_eq!(ens.collision_count(), 1);
        assert_eq!(ens.time, 0.1);
    }

    #[test]
    fn wealth_exchange_preserves_sum() {
        let law = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
        let mut ens = ParticleEnsemble::new(vec![10.0, 0.0], &law);
        ens.apply_collision(&atom(0.5, Coefficients::new(0.7, 0.3, 0.7, 0.3), 0, 1)).unwrap();
        assert!((ens.states()[0] - 7.0).abs() < 1e-12);
        assert!((ens.states()[1] - 3.0).abs() < 1e-12);
        assert!(ens.relative_drift().unwrap() < 1e-15);
    }

    #[test]
    fn bystanders_are_bit_identical() {
        let law = InteractionLaw::wealth_fixed(0.4, Order::One).unwrap();
        let before = vec![0.1, 0.2, 0.3, 0.4, 0.5];
        let mut ens = ParticleEnsemble::new(before.clone(), &law);
        ens.apply_collision(&atom(1.0, Coefficients::new(0.4, 0.6, 0.4, 0.6), 1, 3)).unwrap();
        for k in [0, 2, 4] {
            assert_eq!(ens.states()[k].to_bits(), before[k].to_bits());
        }
    }

    #[test]
    fn rejects_out_of_order_atoms() {
        let law = InteractionLaw::kac(Order::Two);
        let mut ens = ParticleEnsemble::new(vec![1.0, 2.0], &law);
        ens.time = 2.0;
        let err = ens.apply_collision(&atom(1.0, Coefficients::new(1.0, 0.0, 1.0, 0.0), 0, 1));
        assert!(matches!(err, Err(Error::OutOfOrder { .. })));
    }

    #[test]
    fn overflow_is_reported() {
        let law = InteractionLaw::table(&[(1.0, [1e300, 1e300, 1.0, 0.0])], Order::One).unwrap();
        let mut ens = ParticleEnsemble::new(vec![1e300, 1e300], &law);
        let err = ens.apply_collision(&atom(1.0, Coefficients::new(1e300, 1e300, 1.0, 0.0), 0, 1));
        assert_eq!(err, Err(Error::Overflow { atom_index: 0 }));
    }

    #[test]
    fn nanbu_moves_only_first_particle() {
        let law = quarter_turn();
        let mut ens = ParticleEnsemble::new(vec![3.0, 4.0], &law);
        let alpha = Coefficients::new(0.0, -1.0, 0.0, 1.0);
        ens.apply_nanbu(&atom(0.2, alpha, 0, 1), 0.1).unwrap();
        assert_eq!(ens.states(), &[-4.0, 4.0]);
    }

    #[test]
    fn point_mass_is_a_fixed_point() {
        let law = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
        let p0 = InitialLaw::PointMass(1.0);
        let grid = TimeGrid::uniform(3.0, 6).unwrap();
        let mut s = EventStream::new(20, 1, 0).unwrap();
        let bird = run_bird(&law, &p0, &grid, &mut s).unwrap();
        assert!(bird.snapshots.iter().all(|snap| snap.states.iter().all(|&x| (x - 1.0).abs() < 1e-15)));
        let mut s = EventStream::new(20, 1, 0).unwrap();
        let nanbu = run_nanbu(&law, &p0, &grid, &mut s).unwrap();
        assert!(nanbu.last.states().iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn snapshots_follow_grid_and_count_collisions() {
        let law = InteractionLaw::kac(Order::Two);
        let grid = TimeGrid::new(vec![0.0, 0.5, 2.0]).unwrap();
        let mut s = EventStream::new(100, 2, 0).unwrap();
        let traj = run_bird(&law, &InitialLaw::standard_gaussian(), &grid, &mut s).unwrap();
        let times: Vec<f64> = traj.snapshots.iter().map(|s| s.time).collect();
        assert_eq!(times, vec![0.0, 0.5, 2.0]);
        assert_eq!(traj.snapshots[0].states, initial_states(&InitialLaw::standard_gaussian(), &s));
        // one run: Poisson(100) collisions, within 3 sqrt(100)
        let c = traj.last.collision_count() as f64;
        assert!((c - 100.0).abs() <= 30.0, "{c}");
        assert_eq!(s.emitted(), traj.last.collision_count() + 1);
    }

    #[test]
    fn kac_energy_is_constant_along_path() {
        let law = InteractionLaw::kac(Order::Two);
        let grid = TimeGrid::uniform(5.0, 10).unwrap();
        let mut s = EventStream::new(50, 3, 0).unwrap();
        let traj = run_bird(&law, &InitialLaw::Uniform { low: -1.0, high: 2.0 }, &grid, &mut s).unwrap();
        let e0: f64 = traj.snapshots[0].states.iter().map(|x| x * x).sum();
        for snap in &traj.snapshots {
            let e: f64 = snap.states.iter().map(|x| x * x).sum();
            assert!(((e - e0) / e0).abs() < 1e-9);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![]).is_err());
        assert!(TimeGrid::new(vec![-1.0]).is_err());
        assert_eq!(TimeGrid::new(vec![2.0, 1.0, 2.0]).unwrap().times(), &[1.0, 2.0]);
    }
}
