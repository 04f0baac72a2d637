use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("singular system: non-positive pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },

    #[error("requested {requested} eigenvalues but the operator has dimension {available}")]
    Dimension { requested: usize, available: usize },

    #[error("inverse iteration did not converge for λ = {lambda} after {iterations} iterations (residual {residual:e})")]
    Convergence {
        lambda: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("spectral window exhausted: found {found} of {requested} roots below {upper}")]
    Window {
        found: usize,
        requested: usize,
        upper: f64,
    },

    #[error("no zero wells: harmonic predictions are empty")]
    EmptyPrediction,

    #[error("problem too large: {nodes} nodes exceeds the cap of {cap}")]
    TooLarge { nodes: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors raised by the numerical solvers rather than by bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::Convergence { .. } | Error::Window { .. }
        )
    }
}
