//! Exact samples of the limit law `P_t` and quantile-queryable pools built
//! from them.
//!
//! Samples come from the backward branching unfolding of the nonlinear
//! process: an Exp(1) clock is compared with the remaining time; if it rings
//! first, a pair `(a, b)` is drawn from the symmetrized coefficient law and
//! the value is `a·X + b·Y` with `X`, `Y` two independent samples at the
//! residual time.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::sync::{Arc, OnceLock, RwLock};

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{AngleLaw, InitialLaw, InteractionKind, InteractionLaw};
use crate::rng::{derive_seed, seeded};

pub const DEFAULT_MAX_LEAVES: u64 = 1_000_000;
/// Default spacing of the memoized pool grid.
pub const DEFAULT_REF_STEP: f64 = 0.01;
/// Minimum default pool size.
pub const MIN_POOL_SIZE: usize = 4096;

const POOL_CHUNK: usize = 4096;

/// Leaf cap per recursive sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WildNodeBudget {
    pub max_leaves: u64,
}

impl WildNodeBudget {
    /// Mean number of leaves of one tree at time `t`.
    pub fn expected_leaves_hint(t: f64) -> f64 {
        t.exp()
    }
}

impl Default for WildNodeBudget {
    fn default() -> Self {
        WildNodeBudget { max_leaves: DEFAULT_MAX_LEAVES }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WildDraw {
    pub value: f64,
    pub leaves: u64,
}

enum Frame {
    Expand(f64),
    Combine(f64, f64),
}

/// Reusable work stacks for repeated sampling.
#[derive(Default)]
pub struct WildSampler {
    frames: Vec<Frame>,
    values: Vec<f64>,
}

impl WildSampler {
    pub fn new() -> Self {
        WildSampler::default()
    }

    pub fn sample<R: Rng + ?Sized>(
        &mut self,
        law: &InteractionLaw,
        p0: &InitialLaw,
        t: f64,
        budget: WildNodeBudget,
        rng: &mut R,
    ) -> Result<WildDraw> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain { value: t, domain: "t >= 0" });
        }
        self.frames.clear();
        self.values.clear();
        self.frames.push(Frame::Expand(t));
        let mut leaves = 0u64;
        while let Some(frame) = self.frames.pop() {
            match frame {
                Frame::Expand(s) => {
                    let e: f64 = Exp1.sample(rng);
                    if e > s {
                        leaves += 1;
                        self.values.push(p0.sample(rng));
                    } else {
                        let pending = leaves + self.frames.len() as u64 + 2;
                        if pending > budget.max_leaves {
                            return Err(Error::BudgetExceeded { leaves: pending, cap: budget.max_leaves });
                        }
                        let c = law.sample_alpha(rng);
                        let (a, b) = if rng.random::<bool>() { (c.l, c.r) } else { (c.l_tilde, c.r_tilde) };
                        self.frames.push(Frame::Combine(a, b));
                        self.frames.push(Frame::Expand(s - e));
                        self.frames.push(Frame::Expand(s - e));
                    }
                }
                Frame::Combine(a, b) => {
                    let y = self.values.pop().expect("two children evaluated");
                    let x = self.values.pop().expect("two children evaluated");
                    self.values.push(a * x + b * y);
                }
            }
        }
        let value = self.values.pop().expect("root evaluated");
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("wild sample at t={t}")));
        }
        Ok(WildDraw { value, leaves })
    }
}

/// One draw of `P_t` with the default leaf budget.
pub fn wild_sample<R: Rng + ?Sized>(law: &InteractionLaw, p0: &InitialLaw, t: f64, rng: &mut R) -> Result<f64> {
    WildSampler::new().sample(law, p0, t, WildNodeBudget::default(), rng).map(|d| d.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoolSource {
    WildTree,
    /// `P_t = P₀` for all `t`; quantiles are exact.
    AnalyticStationary(InitialLaw),
    ExternalSample,
}

/// Sorted samples standing in for `P_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePool {
    t: f64,
    samples: Vec<f64>,
    source: PoolSource,
}

impl ReferencePool {
    pub fn from_samples(t: f64, mut samples: Vec<f64>, source: PoolSource) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("a pool needs at least one sample".into()));
        }
        if let Some(x) = samples.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("pool sample {x}")));
        }
        samples.sort_by(f64::total_cmp);
        Ok(ReferencePool { t, samples, source })
    }

    /// `M` exact quantiles at `(k − ½)/M`.
    pub fn analytic(p0: &InitialLaw, t: f64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("pool size must be at least 1".into()));
        }
        let samples = (0..m).map(|k| p0.quantile_unchecked((k as f64 + 0.5) / m as f64)).collect();
        ReferencePool::from_samples(t, samples, PoolSource::AnalyticStationary(*p0))
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn source(&self) -> PoolSource {
        self.source
    }

    /// Analytic law when the pool stands for a known stationary law.
    pub fn analytic_law(&self) -> Option<InitialLaw> {
        match self.source {
            PoolSource::AnalyticStationary(law) => Some(law),
            _ => None,
        }
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match self.source {
            PoolSource::AnalyticStationary(law) => law.quantile_unchecked(u),
            _ => empirical_quantile(&self.samples, u),
        }
    }
}

/// Left-continuous empirical quantile `samples[⌈uM⌉ − 1]` of sorted samples.
pub(crate) fn empirical_quantile(sorted: &[f64], u: f64) -> f64 {
    let m = sorted.len();
    let k = ((u * m as f64).ceil() as usize).clamp(1, m);
    sorted[k - 1]
}

fn check_unit(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain { value: u, domain: "(0, 1)" })
    }
}

pub fn pool_quantile(pool: &ReferencePool, u: f64) -> Result<f64> {
    pool.quantile(u)
}

/// `M` independent draws of `P_t` from one generator.
pub fn build_pool<R: Rng + ?Sized>(
    law: &InteractionLaw,
    p0: &InitialLaw,
    t: f64,
    m: usize,
    rng: &mut R,
) -> Result<ReferencePool> {
    if m == 0 {
        return Err(Error::InvalidParameter("pool size must be at least 1".into()));
    }
    let mut sampler = WildSampler::new();
    let budget = WildNodeBudget::default();
    let samples = (0..m)
        .map(|_| sampler.sample(law, p0, t, budget, rng).map(|d| d.value))
        .collect::<Result<Vec<_>>>()?;
    ReferencePool::from_samples(t, samples, PoolSource::WildTree)
}

/// Like [`build_pool`] but split in fixed chunks with derived seeds, so the
/// result depends only on `seed` and can be built in parallel.
pub fn build_pool_seeded(
    law: &InteractionLaw,
    p0: &InitialLaw,
    t: f64,
    m: usize,
    seed: u64,
    parallel: bool,
) -> Result<ReferencePool> {
    if m == 0 {
        return Err(Error::InvalidParameter("pool size must be at least 1".into()));
    }
    let chunks = m.div_ceil(POOL_CHUNK);
    let chunk = |c: usize| -> Result<Vec<f64>> {
        let len = POOL_CHUNK.min(m - c * POOL_CHUNK);
        let mut rng = seeded(derive_seed(&[seed, c as u64]));
        let mut sampler = WildSampler::new();
        (0..len)
            .map(|_| sampler.sample(law, p0, t, WildNodeBudget::default(), &mut rng).map(|d| d.value))
            .collect()
    };
    let parts: Vec<Vec<f64>> = if parallel {
        (0..chunks).into_par_iter().map(chunk).collect::<Result<_>>()?
    } else {
        (0..chunks).map(chunk).collect::<Result<_>>()?
    };
    ReferencePool::from_samples(t, parts.concat(), PoolSource::WildTree)
}

/// Whitelisted pairs with `P_t = P₀`: uniform-angle Kac with a centered
/// Gaussian, and conservative wealth exchange from a point mass.
pub fn is_analytically_stationary(law: &InteractionLaw, p0: &InitialLaw) -> bool {
    matches!(
        (law.kind(), p0),
        (InteractionKind::Kac(AngleLaw::Uniform), InitialLaw::Gaussian { mean, .. }) if *mean == 0.0
    ) || matches!((law.kind(), p0), (InteractionKind::WealthConservative(_), InitialLaw::PointMass(_)))
}

/// `max(4096, 4N)`.
pub fn default_pool_size(n: usize) -> usize {
    MIN_POOL_SIZE.max(4 * n)
}

/// Metadata stored in a pool file.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolHeader {
    pub model_hash: String,
    pub t: f64,
    pub m: usize,
    pub seed: u64,
}

const POOL_MAGIC: &str = "# kacsim-pool v1";

/// Writes a pool as CSV: a comment header, a `sample` column line, one
/// sample per line.
pub fn write_pool<W: Write>(mut out: W, pool: &ReferencePool, model_hash: &str, seed: u64) -> Result<()> {
    writeln!(out, "{POOL_MAGIC} model_hash={model_hash} t={} M={} seed={seed}", pool.t, pool.len())?;
    writeln!(out, "sample")?;
    for x in &pool.samples {
        writeln!(out, "{x}")?;
    }
    Ok(())
}

/// Reads a pool written by [`write_pool`]; the result is an external sample.
pub fn read_pool<R: Read>(input: R) -> Result<(PoolHeader, ReferencePool)> {
    let mut lines = BufReader::new(input).lines();
    let first = lines.next().ok_or_else(|| Error::Parse("empty pool file".into()))??;
    let fields = first
        .strip_prefix(POOL_MAGIC)
        .ok_or_else(|| Error::Parse("missing pool header".into()))?;
    let mut kv: HashMap<&str, &str> = HashMap::new();
    for item in fields.split_whitespace() {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field `{item}`")))?;
        kv.insert(k, v);
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| Error::Parse(format!("header lacks `{k}`")));
    let parse_err = |k: &str| Error::Parse(format!("bad header value for `{k}`"));
    let header = PoolHeader {
        model_hash: get("model_hash")?.to_string(),
        t: get("t")?.parse().map_err(|_| parse_err("t"))?,
        m: get("M")?.parse().map_err(|_| parse_err("M"))?,
        seed: get("seed")?.parse().map_err(|_| parse_err("seed"))?,
    };
    match lines.next() {
        Some(Ok(line)) if line.trim() == "sample" => {}
        _ => return Err(Error::Parse("expected `sample` column line".into())),
    }
    let mut samples = Vec::with_capacity(header.m);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        samples.push(line.trim().parse().map_err(|_| Error::Parse(format!("bad sample `{line}`")))?);
    }
    if samples.len() != header.m {
        return Err(Error::SizeMismatch { left: header.m, right: samples.len() });
    }
    let pool = ReferencePool::from_samples(header.t, samples, PoolSource::ExternalSample)?;
    Ok((header, pool))
}

/// What a provider hands out for one time: a pool, or a linear blend of the
/// quantile functions of two neighbouring grid pools.
#[derive(Debug, Clone)]
pub enum PoolView {
    Single(Arc<ReferencePool>),
    Blend { lo: Arc<ReferencePool>, hi: Arc<ReferencePool>, weight: f64 },
}

impl PoolView {
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match self {
            PoolView::Single(p) => p.quantile_unchecked(u),
            PoolView::Blend { lo, hi, weight } => {
                (1.0 - weight) * lo.quantile_unchecked(u) + weight * hi.quantile_unchecked(u)
            }
        }
    }

    pub fn analytic_law(&self) -> Option<InitialLaw> {
        match self {
            PoolView::Single(p) => p.analytic_law(),
            PoolView::Blend { .. } => None,
        }
    }

    /// Sorted atoms of the (equal-weight) empirical law this view represents.
    pub fn materialize(&self) -> Vec<f64> {
        match self {
            PoolView::Single(p) => p.samples.clone(),
            PoolView::Blend { lo, hi, weight } => {
                let m = lo.len().max(hi.len());
                (0..m)
                    .map(|k| {
                        let u = (k as f64 + 0.5) / m as f64;
                        (1.0 - weight) * lo.quantile_unchecked(u) + weight * hi.quantile_unchecked(u)
                    })
                    .collect()
            }
        }
    }
}

/// Source of `P_t` surrogates for the coupled systems. Must tolerate
/// concurrent queries.
pub trait PoolProvider: Send + Sync {
    fn view(&self, t: f64) -> Result<PoolView>;
}

/// Same pool at every time.
#[derive(Debug, Clone)]
pub struct FixedPool(pub Arc<ReferencePool>);

impl PoolProvider for FixedPool {
    fn view(&self, _t: f64) -> Result<PoolView> {
        Ok(PoolView::Single(self.0.clone()))
    }
}

/// Exact quantiles of a stationary law.
#[derive(Debug, Clone)]
pub struct AnalyticProvider(Arc<ReferencePool>);

impl AnalyticProvider {
    pub fn new(p0: &InitialLaw) -> Result<Self> {
        Ok(AnalyticProvider(Arc::new(ReferencePool::analytic(p0, 0.0, 1)?)))
    }
}

impl PoolProvider for AnalyticProvider {
    fn view(&self, _t: f64) -> Result<PoolView> {
        Ok(PoolView::Single(self.0.clone()))
    }
}

type Slot = Arc<OnceLock<Result<Arc<ReferencePool>>>>;

/// Wild pools at the grid times `k·δ`, built once on first use. Between two
/// grid times the quantile functions are interpolated linearly.
pub struct GridProvider {
    law: InteractionLaw,
    p0: InitialLaw,
    size: usize,
    step: f64,
    seed: u64,
    slots: RwLock<HashMap<u64, Slot>>,
}

impl GridProvider {
    pub fn new(law: InteractionLaw, p0: InitialLaw, size: usize, step: f64, seed: u64) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("pool size must be at least 1".into()));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParameter(format!("bad pool grid step {step}")));
        }
        Ok(GridProvider { law, p0, size, step, seed, slots: RwLock::new(HashMap::new()) })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn pool_size(&self) -> usize {
        self.size
    }

    /// Seed of the pool at grid index `k`.
    pub fn grid_seed(&self, k: u64) -> u64 {
        derive_seed(&[self.seed, k])
    }

    fn slot(&self, k: u64) -> Slot {
        if let Some(s) = self.slots.read().expect("pool map poisoned").get(&k) {
            return s.clone();
        }
        self.slots.write().expect("pool map poisoned").entry(k).or_default().clone()
    }

    /// Pool at grid index `k`, built sequentially on first request.
    pub fn grid_pool(&self, k: u64) -> Result<Arc<ReferencePool>> {
        self.slot(k)
            .get_or_init(|| {
                let t = k as f64 * self.step;
                build_pool_seeded(&self.law, &self.p0, t, self.size, self.grid_seed(k), false).map(Arc::new)
            })
            .clone()
    }

    /// Builds every grid pool needed up to `t_end` in parallel.
    pub fn prebuild(&self, t_end: f64) -> Result<()> {
        let last = (t_end / self.step).ceil() as u64 + 1;
        (0..=last).into_par_iter().try_for_each(|k| self.grid_pool(k).map(|_| ()))
    }

    fn locate(&self, t: f64) -> (u64, f64) {
        let x = t / self.step;
        let nearest = x.round();
        if (x - nearest).abs() < 1e-9 {
            return (nearest as u64, 0.0);
        }
        let k = x.floor();
        (k as u64, x - k)
    }
}

impl PoolProvider for GridProvider {
    fn view(&self, t: f64) -> Result<PoolView> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain { value: t, domain: "t >= 0" });
        }
        let (k, weight) = self.locate(t);
        let lo = self.grid_pool(k)?;
        if weight == 0.0 {
            return Ok(PoolView::Single(lo));
        }
        Ok(PoolView::Blend { lo, hi: self.grid_pool(k + 1)?, weight })
    }
}

/// A fresh pool at every queried time. Slow; for checking the grid bias.
pub struct ExactProvider {
    law: InteractionLaw,
    p0: InitialLaw,
    size: usize,
    seed: u64,
}

impl ExactProvider {
    pub fn new(law: InteractionLaw, p0: InitialLaw, size: usize, seed: u64) -> Self {
        ExactProvider { law, p0, size, seed }
    }
}

impl PoolProvider for ExactProvider {
    fn view(&self, t: f64) -> Result<PoolView> {
        let seed = derive_seed(&[self.seed, t.to_bits()]);
        let pool = build_pool_seeded(&self.law, &self.p0, t, self.size, seed, false)?;
        Ok(PoolView::Single(Arc::new(pool)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Order;
    use crate::rng::seeded;

    fn sorted_w1(a: &[f64], b: &[f64]) -> f64 {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
    }

    #[test]
    fn zero_time_is_a_plain_draw() {
        let law = InteractionLaw::kac(Order::Two);
        let p0 = InitialLaw::Uniform { low: 2.0, high: 3.0 };
        let mut sampler = WildSampler::new();
        let mut rng = seeded(1);
        for _ in 0..100 {
            let d = sampler.sample(&law, &p0, 0.0, WildNodeBudget::default(), &mut rng).unwrap();
            assert_eq!(d.leaves, 1);
            assert!((2.0..3.0).contains(&d.value));
        }
    }

    #[test]
    fn wealth_point_mass_is_exactly_one() {
        let law = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
        let mut rng = seeded(2);
        for _ in 0..1000 {
            assert_eq!(wild_sample(&law, &InitialLaw::PointMass(1.0), 3.0, &mut rng).unwrap(), 1.0);
        }
    }

    #[test]
    fn kac_gaussian_matches_direct_normal_draws() {
        let law = InteractionLaw::kac(Order::Two);
        let p0 = InitialLaw::standard_gaussian();
        let pool = build_pool(&law, &p0, 2.0, 10_000, &mut seeded(3)).unwrap();
        let direct = p0.sample_n(10_000, &mut seeded(4));
        assert!(sorted_w1(pool.samples(), &direct) <= 0.05);
    }

    #[test]
    fn mean_leaf_count_is_exponential() {
        let law = InteractionLaw::kac(Order::Two);
        let p0 = InitialLaw::standard_gaussian();
        let mut sampler = WildSampler::new();
        let mut rng = seeded(5);
        for t in [0.5, 1.0, 2.0] {
            let counts: Vec<f64> = (0..10_000)
                .map(|_| sampler.sample(&law, &p0, t, WildNodeBudget::default(), &mut rng).unwrap().leaves as f64)
                .collect();
            let n = counts.len() as f64;
            let mean = counts.iter().sum::<f64>() / n;
            let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let se = (var / n).sqrt();
            assert!((mean - WildNodeBudget::expected_leaves_hint(t)).abs() < 3.0 * se, "t={t} mean={mean}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let law = InteractionLaw::kac(Order::Two);
        let p0 = InitialLaw::standard_gaussian();
        let err = WildSampler::new().sample(&law, &p0, 30.0, WildNodeBudget { max_leaves: 100 }, &mut seeded(6));
        assert!(matches!(err, Err(Error::BudgetExceeded { cap: 100, .. })));
    }

    #[test]
    fn pool_quantile_examples() {
        let pool = ReferencePool::from_samples(0.0, vec![4.0, 2.0, 3.0, 1.0], PoolSource::ExternalSample).unwrap();
        assert_eq!(pool_quantile(&pool, 0.3).unwrap(), 2.0);
        assert_eq!(pool_quantile(&pool, 1e-9).unwrap(), 1.0);
        assert_eq!(pool_quantile(&pool, 0.75).unwrap(), 3.0);
        let single = ReferencePool::from_samples(0.0, vec![5.0], PoolSource::ExternalSample).unwrap();
        assert_eq!(pool_quantile(&single, 0.99).unwrap(), 5.0);
        assert!(pool_quantile(&single, 0.0).is_err());
        assert!(pool_quantile(&single, 1.0).is_err());
    }

    #[test]
    fn analytic_pool_uses_midpoint_quantiles() {
        let p0 = InitialLaw::standard_gaussian();
        let pool = ReferencePool::analytic(&p0, 1.0, 4).unwrap();
        for (x, u) in pool.samples().iter().zip([0.125, 0.375, 0.625, 0.875]) {
            assert!((x - p0.quantile(u).unwrap()).abs() < 1e-12);
        }
        assert_eq!(pool_quantile(&pool, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn build_pool_of_one() {
        let law = InteractionLaw::kac(Order::Two);
        let pool = build_pool(&law, &InitialLaw::standard_gaussian(), 1.0, 1, &mut seeded(7)).unwrap();
        assert_eq!(pool.len(), 1);
        assert!(build_pool(&law, &InitialLaw::standard_gaussian(), 1.0, 0, &mut seeded(7)).is_err());
    }

    #[test]
    fn independent_pools_are_close() {
        let law = InteractionLaw::kac(Order::Two);
        let p0 = InitialLaw::standard_gaussian();
        let a = build_pool_seeded(&law, &p0, 1.0, 4096, 10, false).unwrap();
        let b = build_pool_seeded(&law, &p0, 1.0, 4096, 11, true).unwrap();
        assert!(sorted_w1(a.samples(), b.samples()) <= 0.06);
    }

    #[test]
    fn seeded_pools_do_not_depend_on_parallelism() {
        let law = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
        let p0 = InitialLaw::Exponential { rate: 1.0 };
        let a = build_pool_seeded(&law, &p0, 0.5, 10_000, 12, false).unwrap();
        let b = build_pool_seeded(&law, &p0, 0.5, 10_000, 12, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stationary_whitelist() {
        let kac = InteractionLaw::kac(Order::Two);
        let wealth = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
        assert!(is_analytically_stationary(&kac, &InitialLaw::Gaussian { mean: 0.0, variance: 2.0 }));
        assert!(is_analytically_stationary(&wealth, &InitialLaw::PointMass(3.0)));
        assert!(!is_analytically_stationary(&kac, &InitialLaw::Uniform { low: 0.0, high: 1.0 }));
        assert!(!is_analytically_stationary(&kac, &InitialLaw::Gaussian { mean: 1.0, variance: 1.0 }));
    }

    #[test]
    fn pool_file_round_trip() {
        let pool = ReferencePool::from_samples(1.5, vec![0.25, -1.0, 3.5], PoolSource::WildTree).unwrap();
        let mut buf = Vec::new();
        write_pool(&mut buf, &pool, "abc", 9).unwrap();
        let (header, back) = read_pool(&buf[..]).unwrap();
        assert_eq!(header, PoolHeader { model_hash: "abc".into(), t: 1.5, m: 3, seed: 9 });
        assert_eq!(back.samples(), pool.samples());
        assert_eq!(back.source(), PoolSource::ExternalSample);
        assert!(read_pool(&b"sample\n1\n"[..]).is_err());
    }

    #[test]
    fn grid_provider_snaps_and_interpolates() {
        let law = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
        let p0 = InitialLaw::Exponential { rate: 1.0 };
        let provider = GridProvider::new(law, p0, 64, 0.01, 3).unwrap();
        assert!(matches!(provider.view(0.3).unwrap(), PoolView::Single(_)));
        assert!(matches!(provider.view(0.3 + 1e-12).unwrap(), PoolView::Single(_)));
        let view = provider.view(0.305).unwrap();
        let PoolView::Blend { lo, hi, weight } = &view else { panic!("expected a blend") };
        assert!((weight - 0.5).abs() < 1e-9);
        let q = view.quantile(0.5).unwrap();
        assert!((q - 0.5 * (lo.quantile(0.5).unwrap() + hi.quantile(0.5).unwrap())).abs() < 1e-12);
        // memoized: same allocation on the second request
        assert!(Arc::ptr_eq(&provider.grid_pool(30).unwrap(), lo));
    }

    #[test]
    fn providers_agree_with_their_pools() {
        let p0 = InitialLaw::standard_gaussian();
        let a = AnalyticProvider::new(&p0).unwrap();
        assert_eq!(a.view(7.0).unwrap().quantile(0.5).unwrap(), 0.0);
        assert_eq!(a.view(7.0).unwrap().analytic_law(), Some(p0));
        let law = InteractionLaw::kac(Order::Two);
        let e = ExactProvider::new(law, p0, 16, 1);
        let v1 = e.view(0.5).unwrap().materialize();
        let v2 = e.view(0.5).unwrap().materialize();
        assert_eq!(v1, v2);
    }
}
