use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// `line` is 0 for errors found after parsing.
    #[error("config error (line {line}): {msg}")]
    Config { line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Spectral(#[from] spectral_core::SpectralError),
    #[error(transparent)]
    Kernel(#[from] kernels::KernelError),
    #[error(transparent)]
    Qnorm(#[from] qnorms::QnormError),
    #[error(transparent)]
    Tent(#[from] tentspace::TentError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        LabError::Io { path: path.to_path_buf(), source }
    }

    /// Process exit code; assertion failures are not errors and exit with 1 elsewhere.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
