//! Interaction laws, initial laws and the moment exponents that drive the
//! rate bounds.

mod exponents;
mod initial;
mod interaction;

pub use exponents::{check_theorem_hypotheses, q_star, ExponentProfile, Flag, HypothesisReport, QStar};
pub use initial::InitialLaw;
pub use interaction::{
    AngleLaw, Coefficients, ConservedQuantity, InteractionKind, InteractionLaw, MixingLaw, TableAtom,
};

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Wasserstein order targeted by a model; the theory covers `p ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Order {
    One,
    Two,
}

impl Order {
    pub fn value(self) -> f64 {
        match self {
            Order::One => 1.0,
            Order::Two => 2.0,
        }
    }

    pub fn as_u32(self) -> u32 {
        match self {
            Order::One => 1,
            Order::Two => 2,
        }
    }

    /// `|x|^p` without going through `powf`.
    #[inline]
    pub fn cost(self, x: f64) -> f64 {
        match self {
            Order::One => x.abs(),
            Order::Two => x * x,
        }
    }

    /// Inverse of [`Order::cost`] on non-negative inputs.
    #[inline]
    pub fn root(self, x: f64) -> f64 {
        match self {
            Order::One => x,
            Order::Two => x.sqrt(),
        }
    }
}

impl TryFrom<u32> for Order {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self, Error> {
        match p {
            1 => Ok(Order::One),
            2 => Ok(Order::Two),
            other => Err(Error::InvalidParameter(format!("p must be 1 or 2, got {other}"))),
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let p: u32 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad order `{s}`")))?;
        Order::try_from(p)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u32())
    }
}

pub(crate) fn parse_f64(s: &str, what: &str) -> Result<f64, Error> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number `{s}` for {what}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("{what} must be finite")));
    }
    Ok(v)
}

/// Short content hash of a model: first 16 hex digits of the SHA-256 of
/// `"<law>|<p0>|p=<p>"`.
pub fn model_hash(law: &InteractionLaw, p0: &InitialLaw) -> String {
    use sha2::{Digest, Sha256};
    let canonical = format!("{law}|{p0}|p={}", law.order());
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_hash_is_stable_and_order_sensitive() {
        let law = InteractionLaw::kac(Order::Two);
        let p0 = InitialLaw::standard_gaussian();
        let h = model_hash(&law, &p0);
        assert_eq!(h.len(), 16);
        assert_eq!(h, model_hash(&law, &p0));
        assert_ne!(h, model_hash(&law.with_order(Order::One), &p0));
    }
}
