use crate::linsolve::SolveStats;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear solve did not converge after {} iterations (residual {:.3e})",
            stats.iterations, stats.final_residual)]
    SolveFailed { stats: SolveStats },

    #[error("run diverged at step {step} (t = {t:.6})")]
    Diverged { step: usize, t: f64 },

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
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
