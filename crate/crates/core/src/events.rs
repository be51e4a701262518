//! The Poisson point measure driving the particle systems.
//!
//! Atoms `(t, α, ρ, σ)` arrive at rate `N/2`; `α` is a draw of the
//! interaction law and `(ρ, σ)` is uniform on
//! `C = {(ρ, σ) ∈ [0,N)² : ⌊ρ⌋ ≠ ⌊σ⌋}`. The pair selects the colliding
//! particles `i = ⌊ρ⌋` and `j = ⌊σ⌋` (zero-based), while the fractional
//! parts stay available as within-cell randomization for the coupling.

use std::collections::VecDeque;
use std::io::{self, Read, Write};

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::model::{Coefficients, InteractionLaw};
use crate::rng::{derive_seed, mix64, seeded, stream_generator, Generator};

const INIT_TAG: u64 = 0x1A17_0000_0000_0001;
const FORK_TAG: u64 = 0xF0F0_0000_0000_0002;

/// Bytes per atom in the binary event log.
pub const RECORD_BYTES: usize = 7 * 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventAtom {
    pub t: f64,
    pub alpha: Coefficients,
    pub rho: f64,
    pub sigma: f64,
}

impl EventAtom {
    /// Zero-based index of the first particle, `⌊ρ⌋`.
    #[inline]
    pub fn first(&self) -> usize {
        self.rho as usize
    }

    /// Zero-based index of the second particle, `⌊σ⌋`.
    #[inline]
    pub fn second(&self) -> usize {
        self.sigma as usize
    }

    pub fn touches(&self, i: usize) -> bool {
        self.first() == i || self.second() == i
    }

    /// What particle `i` sees of this atom, if it is involved.
    pub fn view_for(&self, i: usize) -> Option<RestrictedEvent> {
        if self.first() == i {
            Some(RestrictedEvent { t: self.t, l: self.alpha.l, r: self.alpha.r, tau: self.sigma })
        } else if self.second() == i {
            Some(RestrictedEvent { t: self.t, l: self.alpha.l_tilde, r: self.alpha.r_tilde, tau: self.rho })
        } else {
            None
        }
    }

    fn to_le_bytes(self) -> [u8; RECORD_BYTES] {
        let mut out = [0u8; RECORD_BYTES];
        let fields = [self.t, self.alpha.l, self.alpha.r, self.alpha.l_tilde, self.alpha.r_tilde, self.rho, self.sigma];
        for (chunk, v) in out.chunks_exact_mut(8).zip(fields) {
            chunk.copy_from_slice(&v.to_le_bytes());
        }
        out
    }

    fn from_le_bytes(bytes: &[u8; RECORD_BYTES]) -> Self {
        let mut f = [0.0; 7];
        for (v, chunk) in f.iter_mut().zip(bytes.chunks_exact(8)) {
            *v = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        }
        EventAtom { t: f[0], alpha: Coefficients::new(f[1], f[2], f[3], f[4]), rho: f[5], sigma: f[6] }
    }
}

/// One jump of a single particle: `x ← l x + r x^{⌊τ⌋}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedEvent {
    pub t: f64,
    pub l: f64,
    pub r: f64,
    /// Lies in `[0, N) \ [i, i+1)`.
    pub tau: f64,
}

/// `index + frac`, kept strictly below `index + 1` under rounding.
#[inline]
pub fn cell_position(index: usize, frac: f64) -> f64 {
    let upper = (index + 1) as f64;
    let x = index as f64 + frac;
    if x < upper {
        x
    } else {
        upper.next_down()
    }
}

/// Lazily generated atoms of the Poisson measure for `N` particles.
#[derive(Debug, Clone)]
pub struct EventStream {
    n_particles: usize,
    master_seed: u64,
    stream_id: u64,
    clock: f64,
    emitted: u64,
    inter_arrival: Exp<f64>,
    rng: Generator,
}

impl EventStream {
    pub fn new(n_particles: usize, master_seed: u64, stream_id: u64) -> Result<Self> {
        if n_particles < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 particles, got {n_particles}")));
        }
        Ok(EventStream {
            n_particles,
            master_seed,
            stream_id,
            clock: 0.0,
            emitted: 0,
            inter_arrival: Exp::new(0.5 * n_particles as f64).expect("positive rate"),
            rng: stream_generator(master_seed, stream_id),
        })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    /// Number of atoms emitted so far.
    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn next_event(&mut self, law: &InteractionLaw) -> EventAtom {
        let n = self.n_particles;
        self.clock += self.inter_arrival.sample(&mut self.rng);
        let alpha = law.sample_alpha(&mut self.rng);
        let i = self.rng.random_range(0..n);
        let mut j = self.rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let rho = cell_position(i, self.rng.random());
        let sigma = cell_position(j, self.rng.random());
        self.emitted += 1;
        EventAtom { t: self.clock, alpha, rho, sigma }
    }

    /// An independent stream with the same `N`, starting at time 0.
    pub fn fork_independent_copy(&self) -> EventStream {
        let id = mix64(self.stream_id ^ FORK_TAG);
        EventStream::new(self.n_particles, self.master_seed, id).expect("N already validated")
    }

    /// Generator for the initial states, independent of the atoms.
    pub fn initial_state_rng(&self) -> Generator {
        seeded(derive_seed(&[self.master_seed, self.stream_id, INIT_TAG]))
    }
}

/// Bounded log of recent atoms, for replaying restricted views.
#[derive(Debug, Clone)]
pub struct EventLog {
    capacity: usize,
    atoms: VecDeque<EventAtom>,
}

impl EventLog {
    pub fn with_capacity(capacity: usize) -> Self {
        EventLog { capacity: capacity.max(1), atoms: VecDeque::with_capacity(capacity.min(1 << 16)) }
    }

    pub fn push(&mut self, atom: EventAtom) {
        if self.atoms.len() == self.capacity {
            self.atoms.pop_front();
        }
        self.atoms.push_back(atom);
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EventAtom> + '_ {
        self.atoms.iter()
    }

    /// The restricted view `N^i` over the logged atoms.
    pub fn restrict(&self, i: usize) -> impl Iterator<Item = RestrictedEvent> + '_ {
        restrict(self.atoms.iter(), i)
    }
}

/// Atoms touching particle `i`, as seen by `i`.
pub fn restrict<'a, I>(atoms: I, i: usize) -> impl Iterator<Item = RestrictedEvent> + 'a
where
    I: IntoIterator<Item = &'a EventAtom>,
    I::IntoIter: 'a,
{
    atoms.into_iter().filter_map(move |a| a.view_for(i))
}

/// Writes atoms as little-endian `(t, l, r, l̃, r̃, ρ, σ)` f64 records.
pub fn write_log<'a, W: Write>(mut out: W, atoms: impl IntoIterator<Item = &'a EventAtom>) -> io::Result<()> {
    for atom in atoms {
        out.write_all(&atom.to_le_bytes())?;
    }
    out.flush()
}

pub fn read_log<R: Read>(mut input: R) -> io::Result<Vec<EventAtom>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() % RECORD_BYTES != 0 {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "truncated event record"));
    }
    Ok(bytes
        .chunks_exact(RECORD_BYTES)
        .map(|c| EventAtom::from_le_bytes(c.try_into().expect("record size")))
        .collect())
}
