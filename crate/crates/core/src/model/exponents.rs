use std::fmt;

use super::{InitialLaw, InteractionLaw, Order};
use crate::error::Result;

/// Values of `c` this close to zero are treated as zero.
const ZERO_TOL: f64 = 1e-12;
/// Upper end of the bracket search for the root of `c`.
pub const Q_CAP: f64 = 128.0;

/// `q* = sup{q : M_q(P₀) < ∞, c(q) > 0}` as an extended real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QStar {
    Finite(f64),
    /// No root of `c` up to [`Q_CAP`]. `certified` holds when every
    /// coefficient is bounded by 1, so `c` is increasing and stays positive.
    Infinite { certified: bool },
    /// The defining set is empty.
    NegInfinite,
}

impl QStar {
    pub fn value(self) -> f64 {
        match self {
            QStar::Finite(q) => q,
            QStar::Infinite { .. } => f64::INFINITY,
            QStar::NegInfinite => f64::NEG_INFINITY,
        }
    }
}

impl fmt::Display for QStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QStar::Finite(q) => write!(f, "{q}"),
            QStar::Infinite { certified: true } => write!(f, "+inf"),
            QStar::Infinite { certified: false } => write!(f, "+inf (capped at q={Q_CAP})"),
            QStar::NegInfinite => write!(f, "-inf"),
        }
    }
}

/// Computes `q*` for the law's order `p`.
///
/// `c` is concave, so once `c(q) > 0` for some `q ≥ p` the positive set above
/// `p` is an interval ending at the unique root, located by doubling the
/// bracket `[p, 2p]` and bisecting.
pub fn q_star(law: &InteractionLaw, p0: &InitialLaw) -> Result<QStar> {
    let p = law.order().value();
    let moment_cap = p0.moment_finite_up_to();
    let c_p = law.c_of_q(p)?;
    if c_p < -ZERO_TOL || moment_cap <= p {
        return Ok(QStar::NegInfinite);
    }
    let start = if c_p > ZERO_TOL {
        p
    } else {
        // c(p) = 0: positive region above p exists iff c grows to the right
        let h = 1e-6 * p;
        if law.c_of_q(p + h)? > ZERO_TOL {
            p + h
        } else {
            return Ok(QStar::NegInfinite);
        }
    };

    let mut lo = start;
    let mut hi = (2.0 * p).max(2.0 * start);
    let root = loop {
        if law.c_of_q(hi)? <= 0.0 {
            break Some(bisect(law, lo, hi)?);
        }
        if hi >= Q_CAP {
            break None;
        }
        lo = hi;
        hi = (2.0 * hi).min(Q_CAP);
    };

    Ok(match root {
        Some(r) => QStar::Finite(r.min(moment_cap)),
        None if moment_cap.is_finite() => QStar::Finite(moment_cap),
        None => QStar::Infinite { certified: law.coefficient_bound() <= 1.0 },
    })
}

fn bisect(law: &InteractionLaw, mut lo: f64, mut hi: f64) -> Result<f64> {
    // invariant: c(lo) > 0 >= c(hi)
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if law.c_of_q(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `c(p)`, `q*` and `c̄(p, q) = min(c(p), c(q))` for one model.
#[derive(Debug, Clone)]
pub struct ExponentProfile {
    law: InteractionLaw,
    pub c_of_p: f64,
    pub q_star: QStar,
}

impl ExponentProfile {
    pub fn new(law: &InteractionLaw, p0: &InitialLaw) -> Result<Self> {
        Ok(ExponentProfile {
            law: law.clone(),
            c_of_p: law.c_of_q(law.order().value())?,
            q_star: q_star(law, p0)?,
        })
    }

    pub fn c_bar(&self, q: f64) -> Result<f64> {
        Ok(self.c_of_p.min(self.law.c_of_q(q)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flag {
    pub passed: bool,
    pub value: f64,
}

impl Flag {
    fn new(passed: bool, value: f64) -> Self {
        Flag { passed, value }
    }
}

/// Outcome of checking the rate theorem's hypotheses for a model.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub order: Order,
    /// `c(p) ≥ 0`
    pub c_of_p: Flag,
    /// `M_p(P₀) < ∞`
    pub moment_p: Flag,
    /// `E(|R| + |R̃|) > 0`
    pub non_degenerate: Flag,
    /// `E(L R + L̃ R̃) = 0`, only for `p = 2`.
    pub cross_moment: Option<Flag>,
    /// `q* > 2`, only for `p = 2`.
    pub q_star_above_two: Option<Flag>,
}

impl HypothesisReport {
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.c_of_p.passed {
            out.push("c(p) >= 0");
        }
        if !self.moment_p.passed {
            out.push("M_p(P0) < inf");
        }
        if !self.non_degenerate.passed {
            out.push("E(|R|+|R~|) > 0");
        }
        if matches!(self.cross_moment, Some(f) if !f.passed) {
            out.push("E(LR + L~R~) = 0");
        }
        if matches!(self.q_star_above_two, Some(f) if !f.passed) {
            out.push("q* > 2");
        }
        out
    }

    pub fn all_passed(&self) -> bool {
        self.failures().is_empty()
    }
}

const CROSS_MOMENT_TOL: f64 = 1e-9;

pub fn check_theorem_hypotheses(law: &InteractionLaw, p0: &InitialLaw) -> Result<HypothesisReport> {
    let order = law.order();
    let c_p = law.c_of_q(order.value())?;
    let m_p = p0.absolute_moment(order);
    let strength = law.interaction_strength()?;
    let (cross_moment, q_star_above_two) = match order {
        Order::One => (None, None),
        Order::Two => {
            let cross = law.cross_moment()?;
            let qs = q_star(law, p0)?.value();
            (Some(Flag::new(cross.abs() <= CROSS_MOMENT_TOL, cross)), Some(Flag::new(qs > 2.0, qs)))
        }
    };
    Ok(HypothesisReport {
        order,
        c_of_p: Flag::new(c_p >= -ZERO_TOL, c_p),
        moment_p: Flag::new(m_p.is_finite() && p0.moment_finite_up_to() > order.value(), m_p),
        non_degenerate: Flag::new(strength > 0.0, strength),
        cross_moment,
        q_star_above_two,
    })
}
