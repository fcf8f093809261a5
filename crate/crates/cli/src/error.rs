use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] newstag::Error),

    #[error("state directory {} is in use by another run (remove {} if that run is gone)", dir.display(), dir.join(crate::output::LOCK_FILE).display())]
    Locked { dir: PathBuf },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot serialize {what}: {message}")]
    Internal { what: &'static str, message: String },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for usage and configuration problems, 2 for bad or unreadable data,
    /// 3 for internal failures.
    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            CliError::Locked { .. } => 1,
            CliError::Core(e) if e.is_config() => 1,
            CliError::Core(e) if e.is_data() => 2,
            CliError::Core(e) if matches!(e.root(), newstag::Error::Io { .. }) => 2,
            CliError::Io { .. } => 2,
            CliError::Core(_) | CliError::Internal { .. } => 3,
        };
        ExitCode::from(code)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Internal {
            what: "csv output",
            message: e.to_string(),
        }
    }
}
