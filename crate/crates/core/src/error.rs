use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two grid nodes coincide, so a chord length vanishes.
    #[error("curve degenerate: nodes {i} and {j} coincide")]
    CurveDegenerate { i: usize, j: usize },

    #[error("linear solve did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("energy order k={k} exceeds resolution limit N/4 = {}", .n / 4)]
    ResolutionExceeded { k: usize, n: usize },

    #[error("step rejected: dt {dt:e} exceeds allowed {allowed:e}")]
    StepRejected { dt: f64, allowed: f64 },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("initial curve self-intersects on the grid")]
    SelfIntersecting,

    #[error("invalid grid size {0}: need a power of two >= 16")]
    InvalidGrid(usize),

    #[error("fields live on different grids ({0} vs {1} nodes)")]
    GridMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
