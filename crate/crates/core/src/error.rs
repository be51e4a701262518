use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("size mismatch ({left} vs {right}); use w_p_quantile for unequal sizes")]
    SizeMismatch { left: usize, right: usize },

    #[error("atom at t={atom_time} precedes the ensemble time {current}")]
    OutOfOrder { atom_time: f64, current: f64 },

    #[error("non-finite state after atom #{atom_index}")]
    Overflow { atom_index: u64 },

    #[error("wild tree exceeded the leaf budget ({leaves} leaves attempted, cap {cap})")]
    BudgetExceeded { leaves: u64, cap: u64 },

    #[error("expectation diverges: {0}")]
    NonFinite(String),

    #[error("degenerate regression design: {0}")]
    DegenerateDesign(String),

    #[error("theorem hypotheses not satisfied: {0}")]
    HypothesesFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
