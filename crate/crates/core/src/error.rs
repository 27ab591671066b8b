use std::path::PathBuf;

use crate::coupling::SolveStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    /// The load fixed point did not converge.
    #[error("load fixed point {status:?} after {iterations} iterations (residual {residual:e})")]
    Solver {
        status: SolveStatus,
        iterations: usize,
        residual: f64,
    },

    /// An optimizer was handed a load vector that violates the full-load constraint.
    #[error("input load is infeasible: max load {max_load}")]
    InfeasibleInput { max_load: f64 },

    /// Full-load power for the non-JT baseline exceeds the cap of a cell.
    #[error("demand infeasible at full load: cell {cell} needs {required_w:e} W per RU, cap {cap_w:e} W")]
    InfeasibleDemand {
        cell: usize,
        required_w: f64,
        cap_w: f64,
    },

    #[error("{algorithm} did not terminate within {limit} rounds")]
    RoundCap {
        algorithm: &'static str,
        limit: usize,
        trace: Box<crate::optimizer::OptimizerTrace>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
