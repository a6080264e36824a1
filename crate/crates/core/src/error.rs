use thiserror::Error;

/// Errors raised by graph construction, spectral analysis, stability checks
/// and simulation.
///
/// Node indices carried in error payloads are 1-based, matching every
/// user-facing output of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid edge ({tail}, {head}): {reason}")]
    InvalidEdge {
        tail: usize,
        head: usize,
        reason: String,
    },

    #[error("node {index} out of range for a graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("edge ({tail}, {head}) already present")]
    EdgeExists { tail: usize, head: usize },

    #[error("edge ({tail}, {head}) not present")]
    EdgeMissing { tail: usize, head: usize },

    #[error("graph must have at least {min} nodes, got {n}")]
    TooFewNodes { n: usize, min: usize },

    #[error("{family}: network size N = {n} not supported: {reason}")]
    IncompatibleSize {
        family: String,
        n: usize,
        reason: String,
    },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph must be undirected")]
    NotUndirected,

    #[error("exhaustive subset search refused for N = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("eigenvalue iteration did not converge on a {dim}x{dim} matrix")]
    NoConvergence { dim: usize },

    #[error("matrix dimension {dim} exceeds the dense solver limit {limit}")]
    MatrixTooLarge { dim: usize, limit: usize },

    #[error("zero eigenvalue has multiplicity {0}, expected exactly 1")]
    ZeroMultiplicity(usize),

    #[error("invalid gains: {0}")]
    InvalidGains(String),

    #[error("condition {name} does not apply: {reason}")]
    NotApplicable { name: String, reason: String },

    #[error("bound {bound} requires a {class} graph")]
    ClassMismatch { bound: String, class: String },

    #[error("no instability found for N in {lo}..={hi}")]
    NoInstability { lo: usize, hi: usize },

    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph json: {0}")]
    Json(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
