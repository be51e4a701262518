use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{parse_f64, Order};
use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

/// Absolute tolerance for expectations computed by quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;
const PROBABILITY_TOL: f64 = 1e-12;
const CONSERVATION_TOL: f64 = 1e-12;

/// One draw `(L, R, L̃, R̃)` of the interaction law.
///
/// A collision between `u` (first slot) and `v` (second slot) maps them to
/// `(l u + r v, l̃ v + r̃ u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub l: f64,
    pub r: f64,
    pub l_tilde: f64,
    pub r_tilde: f64,
}

impl Coefficients {
    pub const fn new(l: f64, r: f64, l_tilde: f64, r_tilde: f64) -> Self {
        Coefficients { l, r, l_tilde, r_tilde }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.l, self.r, self.l_tilde, self.r_tilde]
    }

    /// `|L|^q + |R|^q + |L̃|^q + |R̃|^q`, with `0^0 = 1`.
    pub fn abs_power_sum(&self, q: f64) -> f64 {
        self.as_array().iter().map(|c| c.abs().powf(q)).sum()
    }

    /// Post-collision pair for pre-collision states `(u, v)`.
    #[inline]
    pub fn collide(&self, u: f64, v: f64) -> (f64, f64) {
        (self.l * u + self.r * v, self.l_tilde * v + self.r_tilde * u)
    }

    fn kac(theta: f64, inelasticity: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let l = c * c.abs().powf(inelasticity);
        let r = -s * s.abs().powf(inelasticity);
        Coefficients::new(l, r, l, -r)
    }

    fn wealth(lambda: f64) -> Self {
        Coefficients::new(lambda, 1.0 - lambda, lambda, 1.0 - lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleLaw {
    /// θ uniform on `[0, 2π)`.
    Uniform,
    /// θ fixed.
    Fixed(f64),
}

/// Law of the mixing weight λ of a conservative wealth exchange.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MixingLaw {
    Fixed(f64),
    Uniform { low: f64, high: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableAtom {
    pub prob: f64,
    pub coeffs: Coefficients,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InteractionKind {
    /// `L = cos θ = L̃`, `R = −sin θ = −R̃`.
    Kac(AngleLaw),
    /// `L = cos θ |cos θ|^e = L̃`, `R = −sin θ |sin θ|^e = −R̃`.
    InelasticKac { angle: AngleLaw, inelasticity: f64 },
    /// `(L, R, L̃, R̃) = (λ, 1−λ, λ, 1−λ)`.
    WealthConservative(MixingLaw),
    /// Finite law given atom by atom.
    DiscreteTable(Vec<TableAtom>),
}

/// Whether a quantity is preserved exactly by every collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConservedQuantity {
    /// `Σ x^i`
    Sum,
    /// `Σ (x^i)²`
    SumOfSquares,
}

impl ConservedQuantity {
    pub fn evaluate(self, states: &[f64]) -> f64 {
        match self {
            ConservedQuantity::Sum => states.iter().sum(),
            ConservedQuantity::SumOfSquares => states.iter().map(|x| x * x).sum(),
        }
    }

    #[inline]
    pub fn term(self, x: f64) -> f64 {
        match self {
            ConservedQuantity::Sum => x,
            ConservedQuantity::SumOfSquares => x * x,
        }
    }
}

/// The law Λ of `(L, R, L̃, R̃)` together with the targeted order `p`.
///
/// Construction validates the structural constraints (probabilities,
/// parameter ranges). Non-degeneracy and `c(p) ≥ 0` are hypotheses of the
/// rate theory and are reported by
/// [`check_theorem_hypotheses`](super::check_theorem_hypotheses).
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionLaw {
    kind: InteractionKind,
    order: Order,
    cumulative: Vec<f64>,
}

impl InteractionLaw {
    pub fn new(kind: InteractionKind, order: Order) -> Result<Self> {
        let mut cumulative = Vec::new();
        match &kind {
            InteractionKind::Kac(angle) => validate_angle(angle)?,
            InteractionKind::InelasticKac { angle, inelasticity } => {
                validate_angle(angle)?;
                if !(inelasticity.is_finite() && *inelasticity >= 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "inelasticity must be finite and non-negative, got {inelasticity}"
                    )));
                }
            }
            InteractionKind::WealthConservative(mixing) => match *mixing {
                MixingLaw::Fixed(lambda) => {
                    if !(0.0..=1.0).contains(&lambda) {
                        return Err(Error::InvalidModel(format!("mixing weight {lambda} outside [0,1]")));
                    }
                }
                MixingLaw::Uniform { low, high } => {
                    if !(0.0 <= low && low < high && high <= 1.0) {
                        return Err(Error::InvalidModel(format!(
                            "mixing law must satisfy 0 <= low < high <= 1, got [{low}, {high}]"
                        )));
                    }
                }
            },
            InteractionKind::DiscreteTable(atoms) => {
                if atoms.is_empty() {
                    return Err(Error::InvalidModel("empty interaction table".into()));
                }
                let mut acc = 0.0;
                for atom in atoms {
                    if !(atom.prob > 0.0 && atom.prob.is_finite()) {
                        return Err(Error::InvalidModel(format!("table probability {} is not positive", atom.prob)));
                    }
                    if atom.coeffs.as_array().iter().any(|c| !c.is_finite()) {
                        return Err(Error::InvalidModel("table coefficients must be finite".into()));
                    }
                    acc += atom.prob;
                    cumulative.push(acc);
                }
                if (acc - 1.0).abs() > PROBABILITY_TOL {
                    return Err(Error::InvalidModel(format!("table probabilities sum to {acc}, not 1")));
                }
            }
        }
        Ok(InteractionLaw { kind, order, cumulative })
    }

    pub fn kac(order: Order) -> Self {
        InteractionLaw::new(InteractionKind::Kac(AngleLaw::Uniform), order).expect("uniform Kac is valid")
    }

    pub fn wealth_fixed(lambda: f64, order: Order) -> Result<Self> {
        InteractionLaw::new(InteractionKind::WealthConservative(MixingLaw::Fixed(lambda)), order)
    }

    pub fn table(atoms: &[(f64, [f64; 4])], order: Order) -> Result<Self> {
        let atoms = atoms
            .iter()
            .map(|&(prob, [l, r, lt, rt])| TableAtom { prob, coeffs: Coefficients::new(l, r, lt, rt) })
            .collect();
        InteractionLaw::new(InteractionKind::DiscreteTable(atoms), order)
    }

    pub fn kind(&self) -> &InteractionKind {
        &self.kind
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// Same law targeting another order.
    pub fn with_order(&self, order: Order) -> Self {
        InteractionLaw { order, ..self.clone() }
    }

    /// One draw of `(L, R, L̃, R̃)`.
    pub fn sample_alpha<R: Rng + ?Sized>(&self, rng: &mut R) -> Coefficients {
        match &self.kind {
            InteractionKind::Kac(angle) => Coefficients::kac(draw_angle(angle, rng), 0.0),
            InteractionKind::InelasticKac { angle, inelasticity } => {
                Coefficients::kac(draw_angle(angle, rng), *inelasticity)
            }
            InteractionKind::WealthConservative(MixingLaw::Fixed(lambda)) => Coefficients::wealth(*lambda),
            InteractionKind::WealthConservative(MixingLaw::Uniform { low, high }) => {
                let u: f64 = rng.random();
                Coefficients::wealth(low + (high - low) * u)
            }
            InteractionKind::DiscreteTable(atoms) => {
                if atoms.len() == 1 {
                    return atoms[0].coeffs;
                }
                let u: f64 = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
                let k = self.cumulative.partition_point(|&c| c <= u).min(atoms.len() - 1);
                atoms[k].coeffs
            }
        }
    }

    /// Expectation of `f(L, R, L̃, R̃)`: exact for atomic laws, adaptive
    /// Simpson for continuous ones.
    pub fn expect<F: Fn(&Coefficients) -> f64>(&self, f: F) -> Result<f64> {
        let value = match &self.kind {
            InteractionKind::Kac(angle) => expect_over_angle(angle, 0.0, &f),
            InteractionKind::InelasticKac { angle, inelasticity } => expect_over_angle(angle, *inelasticity, &f),
            InteractionKind::WealthConservative(MixingLaw::Fixed(lambda)) => f(&Coefficients::wealth(*lambda)),
            InteractionKind::WealthConservative(MixingLaw::Uniform { low, high }) => {
                let g = |lambda: f64| f(&Coefficients::wealth(lambda));
                adaptive_simpson(&g, *low, *high, QUADRATURE_TOL * (high - low)) / (high - low)
            }
            InteractionKind::DiscreteTable(atoms) => atoms.iter().map(|a| a.prob * f(&a.coeffs)).sum(),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite(format!("expectation over {self} is {value}")))
        }
    }

    /// `c(q) = 1 − ½ E(|L|^q + |R|^q + |L̃|^q + |R̃|^q)`.
    pub fn c_of_q(&self, q: f64) -> Result<f64> {
        if q.is_nan() || q < 0.0 {
            return Err(Error::Domain { value: q, domain: "q >= 0" });
        }
        Ok(1.0 - 0.5 * self.expect(|c| c.abs_power_sum(q))?)
    }

    /// `E(L R + L̃ R̃)`, required to vanish for `p = 2`.
    pub fn cross_moment(&self) -> Result<f64> {
        self.expect(|c| c.l * c.r + c.l_tilde * c.r_tilde)
    }

    /// `E(|R| + |R̃|)`; the model is non-degenerate when positive.
    pub fn interaction_strength(&self) -> Result<f64> {
        self.expect(|c| c.r.abs() + c.r_tilde.abs())
    }

    /// Almost-sure bound on `max(|L|, |R|, |L̃|, |R̃|)`.
    pub fn coefficient_bound(&self) -> f64 {
        match &self.kind {
            InteractionKind::Kac(_) | InteractionKind::InelasticKac { .. } | InteractionKind::WealthConservative(_) => {
                1.0
            }
            InteractionKind::DiscreteTable(atoms) => atoms
                .iter()
                .flat_map(|a| a.coeffs.as_array())
                .fold(0.0, |m, c| m.max(c.abs())),
        }
    }

    /// Quantity preserved exactly by every collision, if any.
    pub fn conserved_quantity(&self) -> Option<ConservedQuantity> {
        let check_atoms = |atoms: &[Coefficients]| {
            if atoms.iter().all(conserves_sum) {
                Some(ConservedQuantity::Sum)
            } else if atoms.iter().all(conserves_squares) {
                Some(ConservedQuantity::SumOfSquares)
            } else {
                None
            }
        };
        match &self.kind {
            InteractionKind::Kac(AngleLaw::Uniform) => Some(ConservedQuantity::SumOfSquares),
            InteractionKind::Kac(AngleLaw::Fixed(theta)) => check_atoms(&[Coefficients::kac(*theta, 0.0)]),
            InteractionKind::InelasticKac { angle: AngleLaw::Uniform, inelasticity } => {
                (*inelasticity == 0.0).then_some(ConservedQuantity::SumOfSquares)
            }
            InteractionKind::InelasticKac { angle: AngleLaw::Fixed(theta), inelasticity } => {
                check_atoms(&[Coefficients::kac(*theta, *inelasticity)])
            }
            InteractionKind::WealthConservative(_) => Some(ConservedQuantity::Sum),
            InteractionKind::DiscreteTable(atoms) => {
                check_atoms(&atoms.iter().map(|a| a.coeffs).collect::<Vec<_>>())
            }
        }
    }
}

fn conserves_sum(c: &Coefficients) -> bool {
    (c.l + c.r_tilde - 1.0).abs() <= CONSERVATION_TOL && (c.l_tilde + c.r - 1.0).abs() <= CONSERVATION_TOL
}

fn conserves_squares(c: &Coefficients) -> bool {
    (c.l * c.l + c.r_tilde * c.r_tilde - 1.0).abs() <= CONSERVATION_TOL
        && (c.l_tilde * c.l_tilde + c.r * c.r - 1.0).abs() <= CONSERVATION_TOL
        && (c.l * c.r + c.l_tilde * c.r_tilde).abs() <= CONSERVATION_TOL
}

fn validate_angle(angle: &AngleLaw) -> Result<()> {
    match angle {
        AngleLaw::Fixed(theta) if !theta.is_finite() => {
            Err(Error::InvalidModel(format!("angle {theta} is not finite")))
        }
        _ => Ok(()),
    }
}

fn draw_angle<R: Rng + ?Sized>(angle: &AngleLaw, rng: &mut R) -> f64 {
    match angle {
        AngleLaw::Uniform => 2.0 * PI * rng.random::<f64>(),
        AngleLaw::Fixed(theta) => *theta,
    }
}

fn expect_over_angle<F: Fn(&Coefficients) -> f64>(angle: &AngleLaw, inelasticity: f64, f: &F) -> f64 {
    match angle {
        AngleLaw::Fixed(theta) => f(&Coefficients::kac(*theta, inelasticity)),
        AngleLaw::Uniform => {
            // quadrant-wise so that the kinks of |cos|, |sin| sit on endpoints
            let g = |theta: f64| f(&Coefficients::kac(theta, inelasticity));
            let tol = QUADRATURE_TOL * 2.0 * PI / 4.0;
            (0..4)
                .map(|k| {
                    let a = k as f64 * PI / 2.0;
                    adaptive_simpson(&g, a, a + PI / 2.0, tol)
                })
                .sum::<f64>()
                / (2.0 * PI)
        }
    }
}

impl fmt::Display for InteractionLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InteractionKind::Kac(AngleLaw::Uniform) => write!(f, "kac"),
            InteractionKind::Kac(AngleLaw::Fixed(theta)) => write!(f, "kac:theta={theta}"),
            InteractionKind::InelasticKac { angle: AngleLaw::Uniform, inelasticity } => {
                write!(f, "inelastic-kac:e={inelasticity}")
            }
            InteractionKind::InelasticKac { angle: AngleLaw::Fixed(theta), inelasticity } => {
                write!(f, "inelastic-kac:e={inelasticity}:theta={theta}")
            }
            InteractionKind::WealthConservative(MixingLaw::Fixed(lambda)) => write!(f, "wealth:{lambda}"),
            InteractionKind::WealthConservative(MixingLaw::Uniform { low, high }) => {
                write!(f, "wealth:uniform:{low}:{high}")
            }
            InteractionKind::DiscreteTable(atoms) => {
                write!(f, "table:")?;
                for (k, a) in atoms.iter().enumerate() {
                    if k > 0 {
                        write!(f, ";")?;
                    }
                    let c = a.coeffs;
                    write!(f, "{}@{},{},{},{}", a.prob, c.l, c.r, c.l_tilde, c.r_tilde)?;
                }
                Ok(())
            }
        }
    }
}

/// Parses the textual model syntax:
///
/// ```text
/// kac | kac:theta=<θ>
/// inelastic-kac:e=<e>[:theta=<θ>]
/// wealth:<λ> | wealth:uniform:<low>:<high>
/// table:<prob>@<l>,<r>,<l̃>,<r̃>[;...]
/// ```
impl FromStr for InteractionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let keyed = |part: &str, key: &str| -> Result<f64> {
            let value = part
                .strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .ok_or_else(|| Error::Parse(format!("expected `{key}=<value>` in `{s}`")))?;
            parse_f64(value, key)
        };
        match head {
            "kac" if rest.is_empty() => Ok(InteractionKind::Kac(AngleLaw::Uniform)),
            "kac" => Ok(InteractionKind::Kac(AngleLaw::Fixed(keyed(rest, "theta")?))),
            "inelastic-kac" => {
                let mut parts = rest.split(':');
                let inelasticity = keyed(parts.next().unwrap_or(""), "e")?;
                let angle = match parts.next() {
                    Some(p) => AngleLaw::Fixed(keyed(p, "theta")?),
                    None => AngleLaw::Uniform,
                };
                Ok(InteractionKind::InelasticKac { angle, inelasticity })
            }
            "wealth" => {
                let parts: Vec<&str> = rest.split(':').collect();
                match parts.as_slice() {
                    ["uniform", low, high] => Ok(InteractionKind::WealthConservative(MixingLaw::Uniform {
                        low: parse_f64(low, "low")?,
                        high: parse_f64(high, "high")?,
                    })),
                    [lambda] => Ok(InteractionKind::WealthConservative(MixingLaw::Fixed(parse_f64(
                        lambda, "lambda",
                    )?))),
                    _ => Err(Error::Parse(format!("bad wealth model `{s}`"))),
                }
            }
            "table" => {
                let atoms = rest
                    .split(';')
                    .map(|atom| {
                        let (prob, coeffs) = atom
                            .split_once('@')
                            .ok_or_else(|| Error::Parse(format!("table atom `{atom}` lacks `@`")))?;
                        let c: Vec<f64> = coeffs
                            .split(',')
                            .map(|v| parse_f64(v, "coefficient"))
                            .collect::<Result<_>>()?;
                        if c.len() != 4 {
                            return Err(Error::Parse(format!("table atom `{atom}` needs 4 coefficients")));
                        }
                        Ok(TableAtom {
                            prob: parse_f64(prob, "probability")?,
                            coeffs: Coefficients::new(c[0], c[1], c[2], c[3]),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(InteractionKind::DiscreteTable(atoms))
            }
            _ => Err(Error::Parse(format!("unknown model `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::f64::consts::FRAC_PI_2;

    fn risky() -> InteractionLaw {
        InteractionLaw::table(&[(0.5, [1.2, 0.1, 0.6, 0.1]), (0.5, [0.4, 0.1, 0.6, 0.1])], Order::One).unwrap()
    }

    #[test]
    fn degenerate_angle_gives_quarter_turn() {
        let law = InteractionLaw::new(InteractionKind::Kac(AngleLaw::Fixed(FRAC_PI_2)), Order::Two).unwrap();
        let mut rng = seeded(1);
        for _ in 0..10 {
            let c = law.sample_alpha(&mut rng);
            assert!(c.l.abs() < 1e-15 && c.l_tilde.abs() < 1e-15);
            assert_eq!((c.r, c.r_tilde), (-1.0, 1.0));
        }
    }

    #[test]
    fn fixed_mixing_weight() {
        let law = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
        let mut rng = seeded(2);
        let c = law.sample_alpha(&mut rng);
        assert_eq!(c.as_array(), [0.7, 1.0 - 0.7, 0.7, 1.0 - 0.7]);
    }

    #[test]
    fn table_frequencies_match_probabilities() {
        let law = InteractionLaw::table(
            &[(0.2, [1.0, 0.0, 0.0, 1.0]), (0.5, [0.5, 0.5, 0.5, 0.5]), (0.3, [0.0, 1.0, 1.0, 0.0])],
            Order::One,
        )
        .unwrap();
        let probs = [0.2, 0.5, 0.3];
        let n = 100_000;
        let mut counts = [0usize; 3];
        let mut rng = seeded(3);
        for _ in 0..n {
            let c = law.sample_alpha(&mut rng);
            let k = if c.l == 1.0 { 0 } else if c.l == 0.5 { 1 } else { 2 };
            counts[k] += 1;
        }
        for (k, &p) in probs.iter().enumerate() {
            let freq = counts[k] as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() < 3.0 * se, "atom {k}: {freq} vs {p}");
        }
    }

    #[test]
    fn c_of_q_reference_values() {
        assert!(InteractionLaw::kac(Order::Two).c_of_q(2.0).unwrap().abs() < 1e-10);
        let wealth = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
        assert!(wealth.c_of_q(1.0).unwrap().abs() < 1e-15);
        assert!((wealth.c_of_q(2.0).unwrap() - 0.42).abs() < 1e-15);
        assert!(matches!(wealth.c_of_q(-1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn kac_quadrature_matches_gamma_closed_form() {
        // E|cos θ|^s = Γ((s+1)/2) / (√π Γ(s/2 + 1))
        use statrs::function::gamma::gamma;
        let law = InteractionLaw::kac(Order::Two);
        for &q in &[0.5, 1.0, 1.5, 3.0, 4.0, 7.25] {
            let moment = gamma((q + 1.0) / 2.0) / (PI.sqrt() * gamma(q / 2.0 + 1.0));
            let expected = 1.0 - 2.0 * moment;
            let got = law.c_of_q(q).unwrap();
            assert!((got - expected).abs() < 1e-9, "q={q}: {got} vs {expected}");
        }
    }

    #[test]
    fn cross_moment_and_strength() {
        let kac = InteractionLaw::kac(Order::Two);
        assert!(kac.cross_moment().unwrap().abs() < 1e-10);
        assert!((kac.interaction_strength().unwrap() - 4.0 / PI).abs() < 1e-9);
        let wealth = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
        assert!((wealth.cross_moment().unwrap() - 0.42).abs() < 1e-15);
        let identity = InteractionLaw::table(&[(1.0, [1.0, 0.0, 1.0, 0.0])], Order::One).unwrap();
        assert_eq!(identity.interaction_strength().unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(InteractionLaw::table(&[(0.5, [1.0; 4]), (0.4, [1.0; 4])], Order::One).is_err());
        assert!(InteractionLaw::table(&[(1.0, [1.0; 4]), (0.0, [1.0; 4])], Order::One).is_err());
        assert!(InteractionLaw::table(&[], Order::One).is_err());
        assert!(InteractionLaw::wealth_fixed(1.5, Order::One).is_err());
    }

    #[test]
    fn conservation_classification() {
        assert_eq!(InteractionLaw::kac(Order::Two).conserved_quantity(), Some(ConservedQuantity::SumOfSquares));
        assert_eq!(
            InteractionLaw::wealth_fixed(0.3, Order::One).unwrap().conserved_quantity(),
            Some(ConservedQuantity::Sum)
        );
        assert_eq!(risky().conserved_quantity(), None);
        let inelastic = InteractionLaw::new(
            InteractionKind::InelasticKac { angle: AngleLaw::Uniform, inelasticity: 0.5 },
            Order::Two,
        )
        .unwrap();
        assert_eq!(inelastic.conserved_quantity(), None);
    }

    #[test]
    fn model_syntax_round_trips() {
        for text in [
            "kac",
            "kac:theta=1.5",
            "inelastic-kac:e=0.25",
            "inelastic-kac:e=0.25:theta=0.5",
            "wealth:0.7",
            "wealth:uniform:0:1",
            "table:0.5@1.2,0.1,0.6,0.1;0.5@0.4,0.1,0.6,0.1",
        ] {
            let kind: InteractionKind = text.parse().unwrap();
            assert_eq!(kind.to_string(), text);
        }
        assert!("boltzmann".parse::<InteractionKind>().is_err());
        assert!("table:1@1,2,3".parse::<InteractionKind>().is_err());
    }
}
