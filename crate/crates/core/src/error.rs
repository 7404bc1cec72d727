use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("unsupported orbit: {0}")]
    UnsupportedOrbit(String),

    #[error("encounter model invalid: {0}")]
    EncounterModelInvalid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),

    #[error("schema mismatch in {path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SolverFailure(_) | Error::UnsupportedOrbit(_) | Error::EncounterModelInvalid(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
