use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use statrs::distribution::{ContinuousCDF, Normal as NormalCdf};

use super::{parse_f64, Order};
use crate::error::{Error, Result};

/// Law `P₀` of the initial states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialLaw {
    PointMass(f64),
    Uniform { low: f64, high: f64 },
    Gaussian { mean: f64, variance: f64 },
    Exponential { rate: f64 },
    /// Density `α x_m^α / x^{α+1}` on `[x_m, ∞)`.
    Pareto { index: f64, scale: f64 },
    /// `x0` with probability `1 − w`, `x1` with probability `w`.
    TwoPoint { x0: f64, x1: f64, w: f64 },
}

impl InitialLaw {
    pub fn validate(self) -> Result<Self> {
        let ok = match self {
            InitialLaw::PointMass(c) => c.is_finite(),
            InitialLaw::Uniform { low, high } => low.is_finite() && high.is_finite() && low < high,
            InitialLaw::Gaussian { mean, variance } => mean.is_finite() && variance.is_finite() && variance > 0.0,
            InitialLaw::Exponential { rate } => rate.is_finite() && rate > 0.0,
            InitialLaw::Pareto { index, scale } => index > 0.0 && scale > 0.0 && index.is_finite() && scale.is_finite(),
            InitialLaw::TwoPoint { x0, x1, w } => x0.is_finite() && x1.is_finite() && (0.0..=1.0).contains(&w),
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidModel(format!("invalid initial law {self}")))
        }
    }

    pub fn standard_gaussian() -> Self {
        InitialLaw::Gaussian { mean: 0.0, variance: 1.0 }
    }

    /// Largest `q` with `M_q(P₀) < ∞`.
    pub fn moment_finite_up_to(&self) -> f64 {
        match self {
            InitialLaw::Pareto { index, .. } => *index,
            _ => f64::INFINITY,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InitialLaw::PointMass(c) => c,
            InitialLaw::Uniform { low, high } => low + (high - low) * rng.random::<f64>(),
            InitialLaw::Gaussian { mean, variance } => {
                Normal::new(mean, variance.sqrt()).expect("validated").sample(rng)
            }
            InitialLaw::Exponential { rate } => Exp::new(rate).expect("validated").sample(rng),
            InitialLaw::Pareto { .. } | InitialLaw::TwoPoint { .. } => self.quantile_unchecked(rng.random::<f64>()),
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Left-continuous quantile `F⁻¹(u) = inf{x : F(x) ≥ u}` on `(0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain { value: u, domain: "(0, 1)" });
        }
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match *self {
            InitialLaw::PointMass(c) => c,
            InitialLaw::Uniform { low, high } => low + (high - low) * u,
            InitialLaw::Gaussian { mean, variance } => {
                let sd = variance.sqrt();
                if u == 0.5 {
                    return mean;
                }
                mean + sd * std_normal_quantile(u)
            }
            InitialLaw::Exponential { rate } => -(-u).ln_1p() / rate,
            InitialLaw::Pareto { index, scale } => scale * (1.0 - u).powf(-1.0 / index),
            InitialLaw::TwoPoint { x0, x1, w } => {
                if u <= 1.0 - w {
                    x0
                } else {
                    x1
                }
            }
        }
    }

    /// `F(x) = P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            InitialLaw::PointMass(c) => f64::from(u8::from(x >= c)),
            InitialLaw::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
            InitialLaw::Gaussian { mean, variance } => std_normal().cdf((x - mean) / variance.sqrt()),
            InitialLaw::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            InitialLaw::Pareto { index, scale } => {
                if x <= scale {
                    0.0
                } else {
                    1.0 - (scale / x).powf(index)
                }
            }
            InitialLaw::TwoPoint { x0, x1, w } => {
                let mut f = 0.0;
                if x >= x0 {
                    f += 1.0 - w;
                }
                if x >= x1 {
                    f += w;
                }
                f.min(1.0)
            }
        }
    }

    /// `(∫₀ᵘ Q(s) ds, ∫₀ᵘ Q(s)² ds)` for the quantile function `Q`.
    /// Either entry may be infinite when the corresponding moment is.
    pub fn quantile_integrals(&self, u: f64) -> (f64, f64) {
        let u = u.clamp(0.0, 1.0);
        match *self {
            InitialLaw::PointMass(c) => (c * u, c * c * u),
            InitialLaw::Uniform { low, high } => {
                let w = high - low;
                (low * u + 0.5 * w * u * u, low * low * u + low * w * u * u + w * w * u * u * u / 3.0)
            }
            InitialLaw::Gaussian { mean, variance } => {
                let sd = variance.sqrt();
                let (phi, z_phi) = if u <= 0.0 || u >= 1.0 {
                    (0.0, 0.0)
                } else {
                    let z = std_normal_quantile(u);
                    let phi = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
                    (phi, z * phi)
                };
                let a1 = mean * u - sd * phi;
                let a2 = mean * mean * u - 2.0 * mean * sd * phi + variance * (u - z_phi);
                (a1, a2)
            }
            InitialLaw::Exponential { rate } => {
                let v = 1.0 - u;
                let (lv, l2v) = if v > 0.0 { (v * v.ln(), v * v.ln() * v.ln()) } else { (0.0, 0.0) };
                let a1 = (u + lv) / rate;
                let a2 = (2.0 - (l2v - 2.0 * lv + 2.0 * v)) / (rate * rate);
                (a1, a2)
            }
            InitialLaw::Pareto { index, scale } => {
                let v = 1.0 - u;
                let power_integral = |k: f64| -> f64 {
                    // ∫₀ᵘ (1−s)^{−k} ds
                    if (k - 1.0).abs() < 1e-15 {
                        if v > 0.0 {
                            -v.ln()
                        } else {
                            f64::INFINITY
                        }
                    } else if v > 0.0 {
                        (1.0 - v.powf(1.0 - k)) / (1.0 - k)
                    } else if k < 1.0 {
                        1.0 / (1.0 - k)
                    } else {
                        f64::INFINITY
                    }
                };
                (scale * power_integral(1.0 / index), scale * scale * power_integral(2.0 / index))
            }
            InitialLaw::TwoPoint { x0, x1, w } => {
                let lo = u.min(1.0 - w);
                let hi = (u - (1.0 - w)).max(0.0);
                (x0 * lo + x1 * hi, x0 * x0 * lo + x1 * x1 * hi)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        self.quantile_integrals(1.0).0
    }

    pub fn second_moment(&self) -> f64 {
        self.quantile_integrals(1.0).1
    }

    /// `M_p(P₀) = E|X|^p`.
    pub fn absolute_moment(&self, order: Order) -> f64 {
        match order {
            Order::Two => self.second_moment(),
            Order::One => match *self {
                InitialLaw::PointMass(c) => c.abs(),
                InitialLaw::Uniform { low, high } => {
                    if low >= 0.0 || high <= 0.0 {
                        (0.5 * (low + high)).abs()
                    } else {
                        (low * low + high * high) / (2.0 * (high - low))
                    }
                }
                InitialLaw::Gaussian { mean, variance } => {
                    let sd = variance.sqrt();
                    let z = mean / sd;
                    sd * (2.0 / std::f64::consts::PI).sqrt() * (-0.5 * z * z).exp()
                        + mean * (1.0 - 2.0 * std_normal().cdf(-z))
                }
                InitialLaw::Exponential { .. } | InitialLaw::Pareto { .. } => self.mean(),
                InitialLaw::TwoPoint { x0, x1, w } => (1.0 - w) * x0.abs() + w * x1.abs(),
            },
        }
    }

    /// Whether all mass sits on finitely many atoms.
    pub fn is_discrete(&self) -> bool {
        matches!(self, InitialLaw::PointMass(_) | InitialLaw::TwoPoint { .. })
    }
}

fn std_normal() -> NormalCdf {
    NormalCdf::new(0.0, 1.0).expect("standard normal")
}

fn std_normal_quantile(u: f64) -> f64 {
    std_normal().inverse_cdf(u)
}

impl fmt::Display for InitialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialLaw::PointMass(c) => write!(f, "point:{c}"),
            InitialLaw::Uniform { low, high } => write!(f, "uniform:{low}:{high}"),
            InitialLaw::Gaussian { mean, variance } => write!(f, "gaussian:{mean}:{variance}"),
            InitialLaw::Exponential { rate } => write!(f, "exponential:{rate}"),
            InitialLaw::Pareto { index, scale } => write!(f, "pareto:{index}:{scale}"),
            InitialLaw::TwoPoint { x0, x1, w } => write!(f, "two-point:{x0}:{x1}:{w}"),
        }
    }
}

/// `point:<c> | uniform:<a>:<b> | gaussian:<mean>:<var> | exponential:<rate>
/// | pareto:<index>:<scale> | two-point:<x0>:<x1>:<w>`
impl FromStr for InitialLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |k: usize, what: &str| -> Result<f64> {
            parts
                .get(k)
                .ok_or_else(|| Error::Parse(format!("initial law `{s}` is missing {what}")))
                .and_then(|v| parse_f64(v, what))
        };
        let expect_len = |n: usize| -> Result<()> {
            if parts.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("initial law `{s}` expects {} parameters", n - 1)))
            }
        };
        let law = match parts[0] {
            "point" => {
                expect_len(2)?;
                InitialLaw::PointMass(num(1, "c")?)
            }
            "uniform" => {
                expect_len(3)?;
                InitialLaw::Uniform { low: num(1, "low")?, high: num(2, "high")? }
            }
            "gaussian" => {
                expect_len(3)?;
                InitialLaw::Gaussian { mean: num(1, "mean")?, variance: num(2, "variance")? }
            }
            "exponential" => {
                expect_len(2)?;
                InitialLaw::Exponential { rate: num(1, "rate")? }
            }
            "pareto" => {
                expect_len(3)?;
                InitialLaw::Pareto { index: num(1, "index")?, scale: num(2, "scale")? }
            }
            "two-point" => {
                expect_len(4)?;
                InitialLaw::TwoPoint { x0: num(1, "x0")?, x1: num(2, "x1")?, w: num(3, "w")? }
            }
            other => return Err(Error::Parse(format!("unknown initial law `{other}`"))),
        };
        law.validate()
    }
}
