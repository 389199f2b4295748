use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] rakegame::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    /// Output was written, but some cells have no feasible closed form.
    #[error("{0}")]
    Infeasible(String),
    /// Output was written, but some ensembles exceeded the non-convergence limit.
    #[error("{0}")]
    EnsembleFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::Parse { .. }
            | CliError::Io { .. }
            | CliError::Csv(_) => 1,
            CliError::Model(rakegame::Error::Infeasible { .. }) | CliError::Infeasible(_) => 2,
            CliError::Model(_) => 1,
            CliError::EnsembleFailed(_) => 3,
        }
    }
}
