//! Exact one-dimensional Wasserstein distances, moment statistics, the
//! `ε_{n,p}` estimator, an audit of the exchangeable-vector inequality and
//! least-squares rate fits.
//!
//! In 1D the monotone (quantile) coupling is optimal for `|x − y|^p`,
//! `p ≥ 1`, so every distance here is a sort followed by a linear pass.
//! Functions named `wpp_*` return `W_p^p`; `w_p_*` return `W_p`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InitialLaw, Order};

pub fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().find(|x| !x.is_finite()) {
        Some(x) => Err(Error::NonFinite(format!("sample value {x}"))),
        None => Ok(()),
    }
}

/// `W_p^p` between two equal-size samples: mean cost of the sorted matching.
pub fn wpp_sorted(a: &[f64], b: &[f64], p: Order) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::InvalidParameter("empty samples; use w_p_quantile for unequal sizes".into()));
    }
    check_finite(a)?;
    check_finite(b)?;
    Ok(wpp_presorted_equal(&sorted(a), &sorted(b), p))
}

pub(crate) fn wpp_presorted_equal(a: &[f64], b: &[f64], p: Order) -> f64 {
    a.iter().zip(b).map(|(x, y)| p.cost(x - y)).sum::<f64>() / a.len() as f64
}

pub fn w_p_sorted(a: &[f64], b: &[f64], p: Order) -> Result<f64> {
    wpp_sorted(a, b, p).map(|c| p.root(c))
}

/// `W_p^p` between the empirical laws of two samples of any sizes,
/// integrating the quantile gap over the merged breakpoints `i/n ∪ j/m`.
pub fn wpp_quantile(a: &[f64], b: &[f64], p: Order) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    check_finite(a)?;
    check_finite(b)?;
    Ok(wpp_presorted(&sorted(a), &sorted(b), p))
}

pub(crate) fn wpp_presorted(a: &[f64], b: &[f64], p: Order) -> f64 {
    let (n, m) = (a.len() as u128, b.len() as u128);
    // positions in units of 1/(n·m): a steps every m, b every n
    let total = n * m;
    let (mut ia, mut ib, mut pos) = (0usize, 0usize, 0u128);
    let mut acc = 0.0;
    while pos < total {
        let next_a = (ia as u128 + 1) * m;
        let next_b = (ib as u128 + 1) * n;
        let next = next_a.min(next_b);
        acc += (next - pos) as f64 * p.cost(a[ia] - b[ib]);
        if next == next_a {
            ia += 1;
        }
        if next == next_b {
            ib += 1;
        }
        pos = next;
    }
    acc / total as f64
}

pub fn w_p_quantile(a: &[f64], b: &[f64], p: Order) -> Result<f64> {
    wpp_quantile(a, b, p).map(|c| p.root(c))
}

/// `W_p^p` between the empirical law of `sample` and a known law, by exact
/// integration against the law's quantile integrals.
pub fn wpp_vs_law(sample: &[f64], law: &InitialLaw, p: Order) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    check_finite(sample)?;
    Ok(wpp_presorted_vs_law(&sorted(sample), law, p))
}

pub(crate) fn wpp_presorted_vs_law(xs: &[f64], law: &InitialLaw, p: Order) -> f64 {
    let n = xs.len() as f64;
    if let InitialLaw::PointMass(c) = *law {
        return xs.iter().map(|x| p.cost(x - c)).sum::<f64>() / n;
    }
    let mut acc = 0.0;
    let mut u0 = 0.0;
    let mut a0 = law.quantile_integrals(0.0);
    for (k, &x) in xs.iter().enumerate() {
        let u1 = if k + 1 == xs.len() { 1.0 } else { (k + 1) as f64 / n };
        let a1 = law.quantile_integrals(u1);
        let cell = match p {
            Order::Two => x * x * (u1 - u0) - 2.0 * x * (a1.0 - a0.0) + (a1.1 - a0.1),
            Order::One => {
                let us = law.cdf(x).clamp(u0, u1);
                let ms = law.quantile_integrals(us).0;
                (x * (us - u0) - (ms - a0.0)) + ((a1.0 - ms) - x * (u1 - us))
            }
        };
        acc += cell.max(0.0);
        u0 = u1;
        a0 = a1;
    }
    acc
}

pub fn w_p_vs_law(sample: &[f64], law: &InitialLaw, p: Order) -> Result<f64> {
    wpp_vs_law(sample, law, p).map(|c| p.root(c))
}

/// Minimum mean cost over all bijections, by enumeration. Only for tiny `n`.
pub fn brute_force_wpp(a: &[f64], b: &[f64], p: Order) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() || a.len() > 10 {
        return Err(Error::InvalidParameter(format!("brute force needs 1..=10 points, got {}", a.len())));
    }
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let cost = |perm: &[usize]| perm.iter().enumerate().map(|(i, &j)| p.cost(a[i] - b[j])).sum::<f64>();
    let mut best = cost(&perm);
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(cost(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WassersteinMethod {
    SortedEqual,
    QuantileGrid,
    VsAnalytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WassersteinReport {
    pub p: Order,
    pub value: f64,
    pub left_size: usize,
    /// `None` against an analytic law.
    pub right_size: Option<usize>,
    pub method: WassersteinMethod,
}

impl WassersteinReport {
    /// Picks the sorted matching for equal sizes, the quantile grid otherwise.
    pub fn between(a: &[f64], b: &[f64], p: Order) -> Result<Self> {
        let (value, method) = if a.len() == b.len() {
            (w_p_sorted(a, b, p)?, WassersteinMethod::SortedEqual)
        } else {
            (w_p_quantile(a, b, p)?, WassersteinMethod::QuantileGrid)
        };
        Ok(WassersteinReport { p, value, left_size: a.len(), right_size: Some(b.len()), method })
    }

    pub fn against_law(sample: &[f64], law: &InitialLaw, p: Order) -> Result<Self> {
        Ok(WassersteinReport {
            p,
            value: w_p_vs_law(sample, law, p)?,
            left_size: sample.len(),
            right_size: None,
            method: WassersteinMethod::VsAnalytic,
        })
    }
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

impl McEstimate {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return McEstimate { mean: f64::NAN, stderr: f64::NAN, count: 0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        McEstimate { mean, stderr, count: n }
    }

    /// `|self − other| ≤ k` combined standard errors.
    pub fn agrees_with(&self, other: &McEstimate, k: f64) -> bool {
        (self.mean - other.mean).abs() <= k * self.stderr.hypot(other.stderr)
    }

    /// `|self − value| ≤ k` standard errors.
    pub fn agrees_with_value(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

/// Target law of `ε_{n,p}`: a known law, or the empirical law of sorted
/// pool samples.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Law(InitialLaw),
    Pool(&'a [f64]),
}

impl Target<'_> {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Target::Law(law) => law.sample(rng),
            Target::Pool(s) => s[rng.random_range(0..s.len())],
        }
    }

    fn wpp_presorted(&self, xs: &[f64], p: Order) -> f64 {
        match self {
            Target::Law(law) => wpp_presorted_vs_law(xs, law, p),
            Target::Pool(s) => wpp_presorted(xs, s, p),
        }
    }
}

/// `E W_p^p(empirical law of n i.i.d. μ-draws, μ)` estimated over `reps`
/// replicas. `ε_{0,p} = 0` by convention.
pub fn eps_n_p<R: Rng + ?Sized>(mu: Target<'_>, n: usize, p: Order, reps: usize, rng: &mut R) -> Result<McEstimate> {
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    if let Target::Pool(s) = mu {
        if s.is_empty() {
            return Err(Error::InvalidParameter("empty pool".into()));
        }
    }
    if n == 0 {
        return Ok(McEstimate { mean: 0.0, stderr: 0.0, count: reps });
    }
    let mut buf = vec![0.0; n];
    let values: Vec<f64> = (0..reps)
        .map(|_| {
            buf.iter_mut().for_each(|x| *x = mu.draw(rng));
            buf.sort_by(f64::total_cmp);
            mu.wpp_presorted(&buf, p)
        })
        .collect();
    Ok(McEstimate::from_values(&values))
}

/// Source of an exchangeable vector `Y` together with a vector `Z` of i.i.d.
/// `μ` draws, such that the pairs `(Y^i, Z^i)` are jointly exchangeable.
/// `Z` only serves to build a coupling of blocks of `Y` with `μ^{⊗n}`.
pub trait ExchangeableGenerator {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (Vec<f64>, Vec<f64>);
}

/// `Y^i = Z^i + a·W + b·ξ^i` with `W`, `ξ^i` standard normal: exchangeable,
/// not independent when `a ≠ 0`.
#[derive(Debug, Clone)]
pub struct PerturbedIid {
    pub law: InitialLaw,
    pub m: usize,
    pub common: f64,
    pub idiosyncratic: f64,
}

impl ExchangeableGenerator for PerturbedIid {
    fn len(&self) -> usize {
        self.m
    }

    fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        let gauss = InitialLaw::standard_gaussian();
        let z = self.law.sample_n(self.m, rng);
        let w = gauss.sample(rng);
        let y = z
            .iter()
            .map(|zi| zi + self.common * w + self.idiosyncratic * gauss.sample(rng))
            .collect();
        (y, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma7Report {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub rhs_stderr: f64,
    /// `lhs ≤ rhs + 3` combined standard errors.
    pub holds: bool,
}

/// Audits `2^{1−p} E W_p^p(Ȳ, μ) ≤ (kn/m)(J_n + ε_n) + (ℓ/m)(J_ℓ + ε_ℓ)`
/// with `m = kn + ℓ`, `ℓ < n`. The joint-law terms `J` are replaced by the
/// cost of the sorted matching of each block of `Y` with the same block of
/// `Z`, which is the cost of an admissible coupling and hence an upper
/// bound.
pub fn lemma7_check<G, R>(generator: &mut G, mu: &InitialLaw, n: usize, p: Order, reps: usize, rng: &mut R) -> Result<Lemma7Report>
where
    G: ExchangeableGenerator,
    R: Rng + ?Sized,
{
    let m = generator.len();
    if n == 0 || n > m {
        return Err(Error::InvalidParameter(format!("need 1 ≤ n ≤ m, got n={n}, m={m}")));
    }
    if reps < 2 {
        return Err(Error::InvalidParameter("need at least 2 replicas".into()));
    }
    let (k, ell) = (m / n, m % n);
    let scale = 2f64.powi(1 - p.as_u32() as i32);
    let mut lhs = Vec::with_capacity(reps);
    let mut joint = Vec::with_capacity(reps);
    for _ in 0..reps {
        let (y, z) = generator.draw(rng);
        if y.len() != m || z.len() != m {
            return Err(Error::SizeMismatch { left: m, right: y.len().min(z.len()) });
        }
        check_finite(&y)?;
        lhs.push(scale * wpp_presorted_vs_law(&sorted(&y), mu, p));
        let block = |lo: usize, len: usize| wpp_presorted_equal(&sorted(&y[lo..lo + len]), &sorted(&z[lo..lo + len]), p);
        let full: f64 = (0..k).map(|b| block(b * n, n)).sum::<f64>() / k as f64;
        let tail = if ell > 0 { block(k * n, ell) } else { 0.0 };
        joint.push((k * n) as f64 / m as f64 * full + ell as f64 / m as f64 * tail);
    }
    let lhs = McEstimate::from_values(&lhs);
    let joint = McEstimate::from_values(&joint);
    let target = Target::Law(*mu);
    let eps_n = eps_n_p(target, n, p, reps, rng)?;
    let eps_l = eps_n_p(target, ell, p, reps, rng)?;
    let (wn, wl) = ((k * n) as f64 / m as f64, ell as f64 / m as f64);
    let rhs = joint.mean + wn * eps_n.mean + wl * eps_l.mean;
    let rhs_stderr = (joint.stderr.powi(2) + (wn * eps_n.stderr).powi(2) + (wl * eps_l.stderr).powi(2)).sqrt();
    let holds = lhs.mean <= rhs + 3.0 * lhs.stderr.hypot(rhs_stderr);
    Ok(Lemma7Report { m, n, k, ell, lhs: lhs.mean, lhs_stderr: lhs.stderr, rhs, rhs_stderr, holds })
}

/// `(1/n) Σ |x_i|^q`.
pub fn moment_q(sample: &[f64], q: f64) -> Result<f64> {
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::Domain { value: q, domain: "q >= 0" });
    }
    if sample.is_empty() {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    let sum: f64 = match q {
        0.0 => return Ok(1.0),
        1.0 => sample.iter().map(|x| x.abs()).sum(),
        2.0 => sample.iter().map(|x| x * x).sum(),
        _ => sample.iter().map(|x| x.abs().powf(q)).sum(),
    };
    Ok(sum / sample.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFitResult {
    /// Negated slope of `log value` against `log N`.
    pub gamma_hat: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Least-squares fit of `log value = intercept − rate·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-300 || xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::DegenerateDesign("all abscissae are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if ss_tot <= 1e-300 { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok((slope, intercept, r2))
}

fn log_points(points: &[(f64, f64)], what: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!("{what} needs at least 3 points, got {}", points.len())));
    }
    if let Some(&(_, v)) = points.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Domain { value: v, domain: "value > 0" });
    }
    Ok(points.iter().map(|&(x, v)| (x, v.ln())).unzip())
}

/// OLS on `(log N, log value)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<RateFitResult> {
    let (ns, ys) = log_points(points, "a power-law fit")?;
    if let Some(&n) = ns.iter().find(|n| !(n.is_finite() && **n > 0.0)) {
        return Err(Error::Domain { value: n, domain: "N > 0" });
    }
    let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let (slope, intercept, r_squared) = ols(&xs, &ys)?;
    Ok(RateFitResult { gamma_hat: -slope, intercept, r_squared, n_points: points.len() })
}

/// OLS on `(t, log value)`.
pub fn fit_exponential_decay(points: &[(f64, f64)]) -> Result<DecayFit> {
    let (ts, ys) = log_points(points, "a decay fit")?;
    let (slope, intercept, r_squared) = ols(&ts, &ys)?;
    Ok(DecayFit { rate: -slope, intercept, r_squared, n_points: points.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    #[test]
    fn sorted_examples() {
        assert_eq!(w_p_sorted(&[0.0, 1.0], &[1.0, 0.0], Order::One).unwrap(), 0.0);
        assert_eq!(w_p_sorted(&[0.0], &[3.0], Order::One).unwrap(), 3.0);
        assert_eq!(w_p_sorted(&[1.0, 3.0], &[2.0, 4.0], Order::Two).unwrap(), 1.0);
        assert!(matches!(w_p_sorted(&[1.0], &[1.0, 2.0], Order::One), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn quantile_examples() {
        assert!((w_p_quantile(&[0.0], &[0.0, 1.0], Order::One).unwrap() - 0.5).abs() < 1e-15);
        for p in [Order::One, Order::Two] {
            assert_eq!(w_p_quantile(&[2.5], &[2.5, 2.5, 2.5], p).unwrap(), 0.0);
        }
        let a = [0.3, -1.2, 4.0, 2.2];
        let b = [1.0, 0.0, -3.0, 0.5];
        for p in [Order::One, Order::Two] {
            let d = w_p_quantile(&a, &b, p).unwrap() - w_p_sorted(&a, &b, p).unwrap();
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn quantile_grid_matches_replicated_sorting() {
        // sizes 2 and 3: replicating each atom to size 6 gives the same law
        let a = [0.0, 5.0];
        let b = [1.0, 2.0, 7.0];
        let a6: Vec<f64> = a.iter().flat_map(|&x| [x; 3]).collect();
        let b6: Vec<f64> = b.iter().flat_map(|&x| [x; 2]).collect();
        for p in [Order::One, Order::Two] {
            let d = wpp_quantile(&a, &b, p).unwrap() - wpp_sorted(&a6, &b6, p).unwrap();
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn vs_law_matches_fine_pool() {
        let law = InitialLaw::Exponential { rate: 2.0 };
        let sample = [0.1, 0.4, 0.05, 1.3, 0.7];
        let m = 200_000;
        let fine: Vec<f64> = (0..m).map(|k| law.quantile((k as f64 + 0.5) / m as f64).unwrap()).collect();
        for p in [Order::One, Order::Two] {
            let exact = wpp_vs_law(&sample, &law, p).unwrap();
            let approx = wpp_quantile(&sample, &fine, p).unwrap();
            assert!((exact - approx).abs() < 1e-4, "p={p} {exact} {approx}");
        }
    }

    #[test]
    fn vs_point_mass_and_two_point() {
        assert_eq!(wpp_vs_law(&[3.0, 3.0], &InitialLaw::PointMass(3.0), Order::One).unwrap(), 0.0);
        let two = InitialLaw::TwoPoint { x0: 0.0, x1: 1.0, w: 0.5 };
        for z in [0.0, 1.0] {
            assert!((wpp_vs_law(&[z], &two, Order::One).unwrap() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn eps_examples() {
        let mut rng = seeded(1);
        let e = eps_n_p(Target::Law(InitialLaw::PointMass(2.0)), 10, Order::One, 20, &mut rng).unwrap();
        assert_eq!(e.mean, 0.0);
        let two = InitialLaw::TwoPoint { x0: 0.0, x1: 1.0, w: 0.5 };
        let e = eps_n_p(Target::Law(two), 1, Order::One, 50, &mut rng).unwrap();
        assert!((e.mean - 0.5).abs() < 1e-12);
        let g = Target::Law(InitialLaw::standard_gaussian());
        let e100 = eps_n_p(g, 100, Order::One, 400, &mut rng).unwrap();
        let e400 = eps_n_p(g, 400, Order::One, 400, &mut rng).unwrap();
        let ratio = e400.mean / e100.mean;
        assert!((0.35..=0.65).contains(&ratio), "{ratio}");
    }

    #[test]
    fn eps_against_pool() {
        let pool = [0.0, 1.0];
        let e = eps_n_p(Target::Pool(&pool), 1, Order::One, 30, &mut seeded(2)).unwrap();
        assert!((e.mean - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exchangeable_bound_examples() {
        let mut rng = seeded(3);
        let law = InitialLaw::standard_gaussian();
        let mut iid = PerturbedIid { law, m: 8, common: 0.0, idiosyncratic: 0.0 };
        let r = lemma7_check(&mut iid, &law, 8, Order::Two, 500, &mut rng).unwrap();
        assert_eq!(r.k, 1);
        assert_eq!(r.ell, 0);
        assert!(r.holds);
        let point = InitialLaw::PointMass(1.5);
        let mut constant = PerturbedIid { law: point, m: 6, common: 0.0, idiosyncratic: 0.0 };
        let r = lemma7_check(&mut constant, &point, 4, Order::One, 10, &mut rng).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.holds);
    }

    #[test]
    fn moments() {
        assert_eq!(moment_q(&[-2.0, 2.0], 2.0).unwrap(), 4.0);
        assert_eq!(moment_q(&[0.0, 7.0], 0.0).unwrap(), 1.0);
        assert!((moment_q(&[-8.0], 1.0 / 3.0).unwrap() - 2.0).abs() < 1e-12);
        let xs = InitialLaw::standard_gaussian().sample_n(100_000, &mut seeded(4));
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let est = McEstimate::from_values(&sq);
        assert!(est.agrees_with_value(1.0, 3.0));
        assert!((moment_q(&xs, 2.0).unwrap() - est.mean).abs() < 1e-12);
        assert!(moment_q(&xs, -1.0).is_err());
    }

    #[test]
    fn power_law_examples() {
        let exact: Vec<(f64, f64)> = [64.0, 128.0, 256.0].iter().map(|&n: &f64| (n, 7.0 * n.powf(-0.5))).collect();
        let fit = fit_power_law(&exact).unwrap();
        assert!((fit.gamma_hat - 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let flat = fit_power_law(&[(2.0, 3.0), (4.0, 3.0), (8.0, 3.0)]).unwrap();
        assert!(flat.gamma_hat.abs() < 1e-12);
        assert_eq!(flat.r_squared, 1.0);
        assert!(matches!(fit_power_law(&[(4.0, 1.0), (4.0, 2.0), (4.0, 3.0)]), Err(Error::DegenerateDesign(_))));
        assert!(fit_power_law(&[(4.0, 1.0), (8.0, 0.0), (16.0, 3.0)]).is_err());
        assert!(fit_power_law(&[(4.0, 1.0), (8.0, 2.0)]).is_err());
    }

    #[test]
    fn noisy_power_law_calibration() {
        let mut rng = seeded(5);
        let gauss = InitialLaw::standard_gaussian();
        let ns = [64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0];
        let ok = (0..100)
            .filter(|_| {
                let pts: Vec<(f64, f64)> = ns
                    .iter()
                    .map(|&n: &f64| (n, 7.0 * n.powf(-1.0 / 3.0) * (1.0 + 0.05 * gauss.sample(&mut rng))))
                    .collect();
                let fit = fit_power_law(&pts).unwrap();
                (0.25..=0.42).contains(&fit.gamma_hat) && fit.r_squared >= 0.9
            })
            .count();
        assert!(ok >= 95, "{ok}");
    }

    #[test]
    fn decay_fit_recovers_rate() {
        let pts: Vec<(f64, f64)> = [0.5, 1.0, 2.0, 4.0].iter().map(|&t: &f64| (t, (-0.42 * t).exp())).collect();
        let fit = fit_exponential_decay(&pts).unwrap();
        assert!((fit.rate - 0.42).abs() < 1e-12);
    }

    #[test]
    fn brute_force_small_example() {
        assert_eq!(brute_force_wpp(&[1.0, 3.0], &[4.0, 2.0], Order::Two).unwrap(), 1.0);
    }

    proptest! {
        #[test]
        fn sorted_matches_brute_force(pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..=6)) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            for p in [Order::One, Order::Two] {
                let s = wpp_sorted(&a, &b, p).unwrap();
                let bf = brute_force_wpp(&a, &b, p).unwrap();
                prop_assert!((s - bf).abs() <= 1e-12 * (1.0 + bf));
            }
        }

        #[test]
        fn metric_axioms(v in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0), 1..20), c in -3.0f64..3.0) {
            let a: Vec<f64> = v.iter().map(|t| t.0).collect();
            let b: Vec<f64> = v.iter().map(|t| t.1).collect();
            let d: Vec<f64> = v.iter().map(|t| t.2).collect();
            for p in [Order::One, Order::Two] {
                let ab = w_p_sorted(&a, &b, p).unwrap();
                prop_assert!((ab - w_p_sorted(&b, &a, p).unwrap()).abs() < 1e-12);
                prop_assert!(ab <= w_p_sorted(&a, &d, p).unwrap() + w_p_sorted(&d, &b, p).unwrap() + 1e-12);
                let shift = |x: &[f64]| x.iter().map(|y| y + c).collect::<Vec<_>>();
                let scale = |x: &[f64]| x.iter().map(|y| y * c).collect::<Vec<_>>();
                prop_assert!((w_p_sorted(&shift(&a), &shift(&b), p).unwrap() - ab).abs() < 1e-9);
                prop_assert!((w_p_sorted(&scale(&a), &scale(&b), p).unwrap() - c.abs() * ab).abs() < 1e-9);
            }
        }
    }
}
