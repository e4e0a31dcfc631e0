use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {x} lies outside domain [{lo}, {hi}]")]
    Domain { x: String, lo: String, hi: String },
    #[error("invalid clasp (a={a}, b={b}) for domain [{c}, {d}]: need c <= a <= b <= d")]
    Clasp { a: String, b: String, c: String, d: String },
    #[error("intervals do not come from a legal fold: {0}")]
    InconsistentIntervals(String),
    #[error("exact coordinate overflow: {0}")]
    Overflow(String),
    #[error("node {0} does not exist")]
    UnknownNode(String),
    #[error("node {0} is already expanded")]
    AlreadyExpanded(String),
    #[error("{tau} is not an ancestor of {tau_prime}")]
    NotAncestor { tau: String, tau_prime: String },
    #[error("chain {tau}..{tau_prime} is inverted (M > m)")]
    InvertedChain { tau: String, tau_prime: String },
    #[error("node {0} is not an [A, eps-W] function: neither c = M nor d = m")]
    NotAw(String),
    #[error("{0}")]
    Geometry(String),
    #[error("no center found: {0}")]
    InfeasibleCenter(String),
    #[error("step {h} too large for domain of length {len}")]
    StepTooLarge { h: f64, len: f64 },
    #[error("schedule does not reach target radius within {0} steps")]
    Divergence(u64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("strategy cannot continue: {0}")]
    Strategy(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
