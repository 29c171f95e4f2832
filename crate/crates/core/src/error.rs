use thiserror::Error;

/// Failures raised by the evaluation kernels and the zero atlas.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pole at {at}")]
    Pole { at: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision loss: at least {needed} bits required, {available} available")]
    PrecisionLoss { needed: u32, available: u32 },

    #[error("{what} did not converge within {limit} terms")]
    NonConvergence { what: &'static str, limit: usize },

    #[error("quadrature refinement limit reached after {nodes} nodes")]
    RefinementLimit { nodes: usize },

    #[error("truncation height for the vertical integral exceeds the node budget ({nodes} nodes)")]
    InsufficientHeight { nodes: usize },

    #[error("s*Lambda(s) vanishes on or next to the contour near {at}")]
    BoundaryZero { at: String },

    #[error("accumulated phase {turns} turns is not an integer")]
    NonClosure { turns: f64 },

    #[error("Newton iteration from {seed} left the box {bounds:?}")]
    Divergence { seed: String, bounds: [f64; 4] },

    #[error("child boxes of {bounds:?} count {children} zeros, parent counts {parent}")]
    SuspectedMissedZero {
        bounds: [f64; 4],
        parent: i64,
        children: i64,
    },

    #[error("x = {x} exceeds the certified atlas height {coverage}")]
    IncompleteAtlas { x: f64, coverage: f64 },

    #[error("constant-phase step failed on the critical line at t = {t}")]
    StepFailure { t: f64 },

    #[error("zero table line {line}: {msg}")]
    Table { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Domain-type failures: poles and arguments outside an operation's domain.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Pole { .. } | Error::Domain(_))
    }

    pub fn is_precision_loss(&self) -> bool {
        matches!(self, Error::PrecisionLoss { .. })
    }

    pub(crate) fn pole(at: impl std::fmt::Display) -> Self {
        Error::Pole { at: at.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
