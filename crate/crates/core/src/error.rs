use std::path::PathBuf;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("annotation coverage error: {0}")]
    Coverage(String),

    #[error("incompatible state format version {found} (expected {expected})")]
    IncompatibleVersion { found: u32, expected: u32 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("generation error: {0}")]
    Generation(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Wrap the error with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors caused by bad configuration or missing inputs rather than bad data.
    pub fn is_config(&self) -> bool {
        matches!(self.root(), Error::Config(_))
    }

    /// True for errors caused by the content of input data.
    pub fn is_data(&self) -> bool {
        matches!(
            self.root(),
            Error::Parse { .. }
                | Error::Integrity(_)
                | Error::Validation(_)
                | Error::Precondition(_)
                | Error::Training(_)
                | Error::UndefinedMetric(_)
                | Error::Coverage(_)
                | Error::IncompatibleVersion { .. }
                | Error::Generation(_)
        )
    }
}
