//! Experiment configuration: a TOML document, optionally overridden from the
//! command line.
//!
//! ```toml
//! experiment = "chaos-rate"      # see ExperimentKind
//! model = "wealth:0.7"           # interaction law
//! p0 = "exponential:1"           # initial law
//! p = 1                          # 1 or 2
//! n_grid = [64, 128, 256]
//! t_grid = [1.0]
//! replicas = 200
//! pool_size = 262144             # optional, default max(4096, 4·max N)
//! ref_time_step = 0.01
//! seed = 42
//! exact_pool = false
//! k = 2                          # decoupling only
//! lemma7_reps = 400              # lemma7-audit only
//! output = "chaos.csv"           # optional
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InitialLaw, InteractionKind, InteractionLaw, Order};
use crate::reference::{default_pool_size, DEFAULT_REF_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ChaosRate,
    MomentDecay,
    CouplingDistance,
    Decoupling,
    NanbuVsBird,
    SupDistance,
    Lemma7Audit,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::ChaosRate,
        ExperimentKind::MomentDecay,
        ExperimentKind::CouplingDistance,
        ExperimentKind::Decoupling,
        ExperimentKind::NanbuVsBird,
        ExperimentKind::SupDistance,
        ExperimentKind::Lemma7Audit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ChaosRate => "chaos-rate",
            ExperimentKind::MomentDecay => "moment-decay",
            ExperimentKind::CouplingDistance => "coupling-distance",
            ExperimentKind::Decoupling => "decoupling",
            ExperimentKind::NanbuVsBird => "nanbu-vs-bird",
            ExperimentKind::SupDistance => "sup-distance",
            ExperimentKind::Lemma7Audit => "lemma7-audit",
        }
    }

    /// Stable tag mixed into cell seeds.
    pub fn tag(self) -> u64 {
        self as u64 + 1
    }

    /// Kinds whose statistic is governed by the rate theorem.
    pub fn needs_hypotheses(self) -> bool {
        matches!(
            self,
            ExperimentKind::ChaosRate
                | ExperimentKind::CouplingDistance
                | ExperimentKind::Decoupling
                | ExperimentKind::SupDistance
        )
    }

    /// Kinds that consume `P_t` surrogates.
    pub fn needs_pools(self) -> bool {
        self.needs_hypotheses()
    }

    /// Kinds summarized by a fit over `N`; the others by a fit over `t`.
    pub fn fits_over_n(self) -> bool {
        self.needs_hypotheses()
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown experiment kind `{s}`")))
    }
}

fn default_step() -> f64 {
    DEFAULT_REF_STEP
}

fn default_k() -> usize {
    2
}

fn default_lemma7_reps() -> usize {
    400
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub model: String,
    pub p0: String,
    pub p: u32,
    pub n_grid: Vec<usize>,
    pub t_grid: Vec<f64>,
    pub replicas: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<usize>,
    #[serde(default = "default_step")]
    pub ref_time_step: f64,
    pub seed: u64,
    #[serde(default)]
    pub exact_pool: bool,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_lemma7_reps")]
    pub lemma7_reps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::ChaosRate,
            model: "kac".into(),
            p0: "gaussian:0:1".into(),
            p: 2,
            n_grid: vec![64, 128, 256],
            t_grid: vec![1.0],
            replicas: 20,
            pool_size: None,
            ref_time_step: DEFAULT_REF_STEP,
            seed: 1,
            exact_pool: false,
            k: 2,
            lemma7_reps: default_lemma7_reps(),
            output: None,
        }
    }
}

/// Parsed and checked model of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedModel {
    pub law: InteractionLaw,
    pub p0: InitialLaw,
    pub order: Order,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
        ExperimentConfig::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn resolve(&self) -> Result<ResolvedModel> {
        let order = Order::try_from(self.p)?;
        let kind: InteractionKind = self.model.parse()?;
        let law = InteractionLaw::new(kind, order)?;
        let p0: InitialLaw = self.p0.parse()?;
        Ok(ResolvedModel { law, p0: p0.validate()?, order })
    }

    pub fn validate(&self) -> Result<ResolvedModel> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_grid.is_empty() || self.t_grid.is_empty() {
            return bad("n_grid and t_grid must be non-empty".into());
        }
        if let Some(n) = self.n_grid.iter().find(|&&n| n < 2) {
            return bad(format!("N must be at least 2, got {n}"));
        }
        if let Some(t) = self.t_grid.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return bad(format!("grid times must be positive, got {t}"));
        }
        if self.replicas == 0 {
            return bad("replicas must be at least 1".into());
        }
        if self.pool_size == Some(0) {
            return bad("pool_size must be at least 1".into());
        }
        if !(self.ref_time_step.is_finite() && self.ref_time_step > 0.0) {
            return bad(format!("ref_time_step must be positive, got {}", self.ref_time_step));
        }
        if self.experiment == ExperimentKind::Decoupling {
            if let Some(n) = self.n_grid.iter().find(|&&n| n < self.k) {
                return bad(format!("k={} exceeds N={n}", self.k));
            }
            if self.k < 2 {
                return bad(format!("k must be at least 2, got {}", self.k));
            }
        }
        if self.experiment == ExperimentKind::Lemma7Audit && self.lemma7_reps < 2 {
            return bad("lemma7_reps must be at least 2".into());
        }
        self.resolve()
    }

    pub fn max_n(&self) -> usize {
        self.n_grid.iter().copied().max().unwrap_or(2)
    }

    pub fn max_t(&self) -> f64 {
        self.t_grid.iter().copied().fold(0.0, f64::max)
    }

    /// Pool size actually used.
    pub fn effective_pool_size(&self) -> usize {
        self.pool_size.unwrap_or_else(|| default_pool_size(self.max_n()))
    }
}

/// Parses `64,128,256`.
pub fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse().map_err(|_| Error::Parse(format!("bad {what} entry `{p}`"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
experiment = "decoupling"
model = "wealth:0.7"
p0 = "exponential:1"
p = 1
n_grid = [64, 128]
t_grid = [0.5, 1.0]
replicas = 10
seed = 7
k = 3
"#;

    #[test]
    fn parses_and_fills_defaults() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Decoupling);
        assert_eq!(cfg.ref_time_step, DEFAULT_REF_STEP);
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.effective_pool_size(), 4096);
        let model = cfg.validate().unwrap();
        assert_eq!(model.order, Order::One);
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        cfg.n_grid = vec![1];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        cfg.t_grid = vec![0.0];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        cfg.replicas = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        cfg.p = 3;
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::from_toml_str("experiment = \"chaos-rate\"\nbogus = 1").is_err());
    }

    #[test]
    fn kinds_round_trip() {
        for kind in ExperimentKind::ALL {
            assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
        }
        assert_eq!(parse_list::<usize>("4, 8,16", "N").unwrap(), vec![4, 8, 16]);
        assert!(parse_list::<f64>("1,x", "t").is_err());
    }
}
